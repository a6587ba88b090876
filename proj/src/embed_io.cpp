#include "swdist/embed_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "swdist/error.hpp"
#include "swdist/random.hpp"

namespace swdist {

static_assert(std::endian::native == std::endian::little, "npy I/O assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;

bool rows_unit_norm(const RowMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row(i).norm() - 1.0) > kUnitNormTolerance) return false;
  }
  return true;
}

struct NpyHeader {
  Dtype dtype = Dtype::F8;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

NpyHeader parse_header(const std::string& header, const std::string& where) {
  NpyHeader h;
  std::smatch m;
  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex fortran_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");

  if (!std::regex_search(header, m, descr_re)) {
    throw Error(ErrorKind::Format, where + ": header has no 'descr'");
  }
  const std::string descr = m[1];
  if (descr == "<f4") {
    h.dtype = Dtype::F4;
  } else if (descr == "<f8") {
    h.dtype = Dtype::F8;
  } else {
    throw Error(ErrorKind::Format,
                where + ": unsupported dtype '" + descr + "' (expected <f4 or <f8)");
  }

  if (!std::regex_search(header, m, fortran_re)) {
    throw Error(ErrorKind::Format, where + ": header has no 'fortran_order'");
  }
  h.fortran_order = m[1] == "True";
  if (h.fortran_order) {
    throw Error(ErrorKind::Format, where + ": Fortran-ordered arrays are not supported");
  }

  if (!std::regex_search(header, m, shape_re)) {
    throw Error(ErrorKind::Format, where + ": header has no 'shape'");
  }
  std::stringstream dims(m[1].str());
  std::string item;
  while (std::getline(dims, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    if (item.back() == 'L') item.pop_back();
    if (item.empty() || !std::all_of(item.begin(), item.end(), ::isdigit)) {
      throw Error(ErrorKind::Format, where + ": bad shape entry '" + item + "'");
    }
    h.shape.push_back(std::stoull(item));
  }
  return h;
}

}  // namespace

EmbeddingSet::EmbeddingSet(RowMatrix data, std::string dataset_id, std::string backbone_id,
                           Dtype dtype)
    : data_(std::move(data)),
      dataset_id_(std::move(dataset_id)),
      backbone_id_(std::move(backbone_id)),
      dtype_(dtype) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw Error(ErrorKind::Shape, "embedding set must have N >= 1 and d >= 1, got " +
                                      std::to_string(data_.rows()) + "x" +
                                      std::to_string(data_.cols()));
  }
  if (!data_.allFinite()) {
    throw Error(ErrorKind::Data, "embedding set contains NaN or Inf entries");
  }
  normalized_ = rows_unit_norm(data_);
}

EmbeddingSet EmbeddingSet::from_rows(const std::vector<std::vector<double>>& rows,
                                     std::string dataset_id) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorKind::Shape, "embedding set must have N >= 1 and d >= 1");
  }
  const std::size_t d = rows.front().size();
  RowMatrix m(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) throw Error(ErrorKind::Shape, "ragged rows");
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return EmbeddingSet(std::move(m), std::move(dataset_id));
}

EmbeddingSet EmbeddingSet::subset(std::span<const std::size_t> indices) const {
  RowMatrix m(indices.size(), data_.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows()) throw Error(ErrorKind::Input, "subset index out of range");
    m.row(i) = data_.row(indices[i]);
  }
  return EmbeddingSet(std::move(m), dataset_id_, backbone_id_, dtype_);
}

EmbeddingSet load_matrix(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Format, where + ": cannot open file");

  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw Error(ErrorKind::Format, where + ": not an .npy file (bad magic)");
  }
  unsigned char version[2];
  in.read(reinterpret_cast<char*>(version), 2);
  std::size_t header_len = 0;
  if (version[0] == 1) {
    unsigned char len[2];
    in.read(reinterpret_cast<char*>(len), 2);
    header_len = len[0] | (static_cast<std::size_t>(len[1]) << 8);
  } else if (version[0] == 2 || version[0] == 3) {
    unsigned char len[4];
    in.read(reinterpret_cast<char*>(len), 4);
    header_len = len[0] | (static_cast<std::size_t>(len[1]) << 8) |
                 (static_cast<std::size_t>(len[2]) << 16) | (static_cast<std::size_t>(len[3]) << 24);
  } else {
    throw Error(ErrorKind::Format, where + ": unsupported .npy version " +
                                       std::to_string(version[0]));
  }
  if (!in) throw Error(ErrorKind::Format, where + ": truncated header");

  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw Error(ErrorKind::Format, where + ": truncated header");

  const NpyHeader h = parse_header(header, where);
  if (h.shape.size() != 2) {
    throw Error(ErrorKind::Shape, where + ": expected a 2-D array, got " +
                                      std::to_string(h.shape.size()) + " dimensions");
  }
  const std::size_t rows = h.shape[0];
  const std::size_t cols = h.shape[1];
  if (rows == 0 || cols == 0) {
    throw Error(ErrorKind::Shape, where + ": empty matrix " + std::to_string(rows) + "x" +
                                      std::to_string(cols));
  }

  RowMatrix data(rows, cols);
  const std::size_t count = rows * cols;
  if (h.dtype == Dtype::F8) {
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * 8));
  } else {
    std::vector<float> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * 4));
    std::copy(buf.begin(), buf.end(), data.data());
  }
  if (!in) throw Error(ErrorKind::Format, where + ": truncated data section");
  if (!data.allFinite()) throw Error(ErrorKind::Data, where + ": contains NaN or Inf entries");

  return EmbeddingSet(std::move(data), {}, {}, h.dtype);
}

void save_matrix(const EmbeddingSet& set, const std::filesystem::path& path,
                 std::optional<Dtype> dtype) {
  if (set.rows() < 1 || set.dim() < 1) {
    throw Error(ErrorKind::Shape, "refusing to write an empty matrix");
  }
  const Dtype out_type = dtype.value_or(set.dtype());
  std::string header = "{'descr': '";
  header += out_type == Dtype::F4 ? "<f4" : "<f8";
  header += "', 'fortran_order': False, 'shape': (" + std::to_string(set.rows()) + ", " +
            std::to_string(set.dim()) + "), }";
  // magic(6) + version(2) + len(2) + header + '\n' padded to a multiple of 64
  const std::size_t unpadded = kMagicLen + 2 + 2 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Write, path.string() + ": cannot open for writing");
  out.write(kMagic, kMagicLen);
  const unsigned char version[2] = {1, 0};
  out.write(reinterpret_cast<const char*>(version), 2);
  const unsigned char len[2] = {static_cast<unsigned char>(header.size() & 0xff),
                                static_cast<unsigned char>(header.size() >> 8)};
  out.write(reinterpret_cast<const char*>(len), 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  const std::size_t count = set.rows() * set.dim();
  if (out_type == Dtype::F8) {
    out.write(reinterpret_cast<const char*>(set.data().data()),
              static_cast<std::streamsize>(count * 8));
  } else {
    std::vector<float> buf(set.data().data(), set.data().data() + count);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(count * 4));
  }
  out.flush();
  if (!out) throw Error(ErrorKind::Write, path.string() + ": write failed");
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::initializer_list<std::uint64_t> seed) {
  if (count > n) {
    throw Error(ErrorKind::Capacity, "cannot draw " + std::to_string(count) +
                                         " distinct indices from " + std::to_string(n));
  }
  auto engine = make_engine(seed);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // partial Fisher-Yates
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(engine)]);
  }
  pool.resize(count);
  return pool;
}

std::vector<SplitPair> random_splits(std::size_t n, std::size_t r, std::size_t half_size,
                                     std::uint64_t seed) {
  if (half_size == 0) throw Error(ErrorKind::Input, "half_size must be positive");
  if (2 * half_size > n) {
    throw Error(ErrorKind::Capacity, "2*half_size = " + std::to_string(2 * half_size) +
                                         " exceeds set size " + std::to_string(n));
  }
  std::vector<SplitPair> out;
  out.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    auto drawn = sample_without_replacement(n, 2 * half_size, {seed, i});
    SplitPair p;
    p.split_id = i;
    p.seed = seed;
    p.a_indices.assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(half_size));
    p.b_indices.assign(drawn.begin() + static_cast<std::ptrdiff_t>(half_size), drawn.end());
    out.push_back(std::move(p));
  }
  return out;
}

DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Format, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::Format, "manifest must be a top-level JSON array");

  DatasetManifest manifest;
  std::set<std::tuple<std::string, std::string, double, bool, std::string>> seen;
  for (const auto& item : doc) {
    ManifestEntry e;
    try {
      e.dataset = item.at("dataset").get<std::string>();
      e.condition = item.at("condition").get<std::string>();
      e.path = item.at("path").get<std::string>();
      e.backbone = item.at("backbone").get<std::string>();
      if (item.contains("severity") && !item.at("severity").is_null()) {
        e.severity = item.at("severity").get<double>();
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::Format, std::string("bad manifest entry: ") + ex.what());
    }
    if (e.path.is_relative()) e.path = base_dir / e.path;
    if (!std::filesystem::exists(e.path)) {
      throw Error(ErrorKind::Input, "manifest references missing file: " + e.path.string());
    }
    auto key = std::make_tuple(e.dataset, e.condition, e.severity.value_or(0.0),
                               e.severity.has_value(), e.backbone);
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::Input, "duplicate manifest entry for dataset '" + e.dataset +
                                        "', condition '" + e.condition + "', backbone '" +
                                        e.backbone + "'");
    }
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Input, "cannot open manifest: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

}  // namespace swdist
