#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace swdist {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// On-disk element type of an .npy matrix. Compute is always 64-bit.
enum class Dtype { F4, F8 };

inline constexpr double kUnitNormTolerance = 1e-3;

/// Non-owning row-major view used by the compute kernels.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const { return {data + i * cols, cols}; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// N x d empirical sample. Immutable after construction; the constructor
/// rejects empty or non-finite data.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(RowMatrix data, std::string dataset_id = {}, std::string backbone_id = {},
                        Dtype dtype = Dtype::F8);

  /// Builds a set from nested rows (convenience for fixtures and small inputs).
  static EmbeddingSet from_rows(const std::vector<std::vector<double>>& rows,
                                std::string dataset_id = {});

  std::size_t rows() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }
  const RowMatrix& data() const { return data_; }
  MatrixView view() const { return {data_.data(), rows(), dim()}; }
  const std::string& dataset_id() const { return dataset_id_; }
  const std::string& backbone_id() const { return backbone_id_; }
  Dtype dtype() const { return dtype_; }
  /// True when every row has unit l2 norm within kUnitNormTolerance.
  bool normalized() const { return normalized_; }

  /// New set made of the given rows, in order.
  EmbeddingSet subset(std::span<const std::size_t> indices) const;

 private:
  RowMatrix data_;
  std::string dataset_id_;
  std::string backbone_id_;
  Dtype dtype_ = Dtype::F8;
  bool normalized_ = false;
};

EmbeddingSet load_matrix(const std::filesystem::path& path);

/// Writes a little-endian, C-order .npy v1.0 file in the set's dtype unless
/// `dtype` overrides it.
void save_matrix(const EmbeddingSet& set, const std::filesystem::path& path,
                 std::optional<Dtype> dtype = std::nullopt);

struct SplitPair {
  std::vector<std::size_t> a_indices;
  std::vector<std::size_t> b_indices;
  std::size_t split_id = 0;
  std::uint64_t seed = 0;
};

/// `r` disjoint equal-size pairs drawn without replacement from [0, n).
/// Pair i depends only on (n, half_size, seed, i).
std::vector<SplitPair> random_splits(std::size_t n, std::size_t r, std::size_t half_size,
                                     std::uint64_t seed);

inline std::vector<SplitPair> random_splits(const EmbeddingSet& set, std::size_t r,
                                            std::size_t half_size, std::uint64_t seed) {
  return random_splits(set.rows(), r, half_size, seed);
}

/// `count` distinct indices from [0, n), drawn from a stream keyed by the seed list.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::initializer_list<std::uint64_t> seed);

struct ManifestEntry {
  std::string dataset;
  std::string condition;  // "clean" or a degradation name
  std::optional<double> severity;
  std::filesystem::path path;
  std::string backbone;

  bool is_clean() const { return condition == "clean"; }
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

/// Parses a manifest JSON array. Relative paths resolve against the
/// manifest's directory; every referenced file must exist.
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);

}  // namespace swdist
