#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swdist/embed_io.hpp"
#include "swdist/error.hpp"
#include "test_util.hpp"

using namespace swdist;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected swdist::Error";
  return ErrorKind::Input;
}

}  // namespace

TEST(EmbedIo, LoadFlagsUnitRows) {
  testutil::TempDir dir;
  testutil::write_raw_npy(dir / "a.npy", "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }",
                          {1, 0, 0, 0, 1, 0});
  const auto set = load_matrix(dir / "a.npy");
  EXPECT_EQ(set.rows(), 2u);
  EXPECT_EQ(set.dim(), 3u);
  EXPECT_TRUE(set.normalized());
  EXPECT_EQ(set.dtype(), Dtype::F8);
}

TEST(EmbedIo, LoadNonUnitRow) {
  testutil::TempDir dir;
  testutil::write_raw_npy(dir / "a.npy", "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 2), }", {3, 4});
  EXPECT_FALSE(load_matrix(dir / "a.npy").normalized());
}

TEST(EmbedIo, LoadRejectsNaN) {
  testutil::TempDir dir;
  testutil::write_raw_npy(dir / "a.npy", "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 2), }",
                          {1.0, std::nan("")});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "a.npy"); }), ErrorKind::Data);
}

TEST(EmbedIo, LoadRejectsNon2D) {
  testutil::TempDir dir;
  testutil::write_raw_npy(dir / "a.npy", "{'descr': '<f8', 'fortran_order': False, 'shape': (3,), }", {1, 2, 3});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "a.npy"); }), ErrorKind::Shape);
  testutil::write_raw_npy(dir / "b.npy", "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 1, 2), }", {1, 2});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "b.npy"); }), ErrorKind::Shape);
}

TEST(EmbedIo, LoadRejectsMalformedHeader) {
  testutil::TempDir dir;
  testutil::write_raw_npy(dir / "a.npy", "{'descr': '>f8', 'fortran_order': False, 'shape': (1, 2), }", {1, 2});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "a.npy"); }), ErrorKind::Format);
  testutil::write_raw_npy(dir / "b.npy", "{'fortran_order': False, 'shape': (1, 2), }", {1, 2});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "b.npy"); }), ErrorKind::Format);
  testutil::write_raw_npy(dir / "c.npy", "{'descr': '<f8', 'fortran_order': True, 'shape': (1, 2), }", {1, 2});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "c.npy"); }), ErrorKind::Format);
  std::ofstream(dir / "d.npy") << "not numpy";
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "d.npy"); }), ErrorKind::Format);
  // declared shape larger than payload
  testutil::write_raw_npy(dir / "e.npy", "{'descr': '<f8', 'fortran_order': False, 'shape': (4, 2), }", {1, 2});
  EXPECT_EQ(kind_of([&] { load_matrix(dir / "e.npy"); }), ErrorKind::Format);
}

TEST(EmbedIo, RoundTripPreservesDataShapeDtype) {
  testutil::TempDir dir;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto data = oracle::gaussian(5 + seed, 8, seed);
    for (Dtype dtype : {Dtype::F4, Dtype::F8}) {
      RowMatrix stored = data;
      if (dtype == Dtype::F4) stored = data.cast<float>().cast<double>();
      const EmbeddingSet set(stored, "ds", "bb", dtype);
      const auto path = dir / ("m" + std::to_string(seed) + ".npy");
      save_matrix(set, path);
      const auto back = load_matrix(path);
      EXPECT_EQ(back.dtype(), dtype);
      ASSERT_EQ(back.rows(), set.rows());
      ASSERT_EQ(back.dim(), set.dim());
      EXPECT_TRUE(back.data() == set.data());
    }
  }
}

TEST(EmbedIo, SaveAsFloat32IsBitExactAtSinglePrecision) {
  testutil::TempDir dir;
  const EmbeddingSet set(oracle::gaussian(5, 8, 3));
  save_matrix(set, dir / "f.npy", Dtype::F4);
  const auto back = load_matrix(dir / "f.npy");
  EXPECT_TRUE(back.data().cast<float>() == set.data().cast<float>());
  // header padded so the data section starts on a 64-byte boundary
  EXPECT_EQ((testutil::read_file(dir / "f.npy").size() - 5 * 8 * 4) % 64, 0u);
}

TEST(EmbedIo, SaveErrors) {
  const EmbeddingSet set(oracle::gaussian(2, 2, 1));
  EXPECT_EQ(kind_of([&] { save_matrix(set, "/nonexistent_dir_swdist/x.npy"); }), ErrorKind::Write);
  EXPECT_EQ(kind_of([&] { EmbeddingSet(RowMatrix(0, 3)); }), ErrorKind::Shape);
}

TEST(EmbedIo, RandomSplitsStructure) {
  const auto splits = random_splits(10, 3, 5, 7);
  ASSERT_EQ(splits.size(), 3u);
  for (const auto& s : splits) {
    EXPECT_EQ(s.a_indices.size(), 5u);
    EXPECT_EQ(s.b_indices.size(), 5u);
    std::set<std::size_t> all(s.a_indices.begin(), s.a_indices.end());
    all.insert(s.b_indices.begin(), s.b_indices.end());
    EXPECT_EQ(all.size(), 10u);
    EXPECT_LT(*all.rbegin(), 10u);
  }
}

TEST(EmbedIo, RandomSplitsDeterministicAndKeyedBySplitIndex) {
  const auto a = random_splits(100, 5, 20, 42);
  const auto b = random_splits(100, 5, 20, 42);
  const auto longer = random_splits(100, 8, 20, 42);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].a_indices, b[i].a_indices);
    EXPECT_EQ(a[i].b_indices, b[i].b_indices);
    EXPECT_EQ(a[i].a_indices, longer[i].a_indices);
  }
  EXPECT_NE(random_splits(100, 1, 20, 43)[0].a_indices, a[0].a_indices);
}

TEST(EmbedIo, RandomSplitsDisjointProperty) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed * 3;
    const std::size_t half = 1 + seed % (n / 2);
    for (const auto& s : random_splits(n, 4, half, seed)) {
      std::set<std::size_t> a(s.a_indices.begin(), s.a_indices.end());
      for (auto j : s.b_indices) EXPECT_FALSE(a.contains(j));
      EXPECT_EQ(a.size(), half);
    }
  }
}

TEST(EmbedIo, RandomSplitsCapacityError) {
  EXPECT_EQ(kind_of([] { random_splits(4, 1, 3, 0); }), ErrorKind::Capacity);
}

TEST(EmbedIo, ManifestParsing) {
  testutil::TempDir dir;
  save_matrix(EmbeddingSet(oracle::gaussian(3, 2, 0)), dir / "clean.npy");
  save_matrix(EmbeddingSet(oracle::gaussian(3, 2, 1)), dir / "noise1.npy");
  const std::string text = R"([
    {"dataset": "coco", "condition": "clean", "severity": null, "path": "clean.npy", "backbone": "clip"},
    {"dataset": "coco", "condition": "gaussian_noise", "severity": 1, "path": "noise1.npy", "backbone": "clip"}
  ])";
  const auto m = parse_manifest(text, dir.path());
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_TRUE(m.entries[0].is_clean());
  EXPECT_FALSE(m.entries[0].severity.has_value());
  EXPECT_DOUBLE_EQ(*m.entries[1].severity, 1.0);
  EXPECT_EQ(m.entries[1].path, dir / "noise1.npy");
}

TEST(EmbedIo, ManifestErrors) {
  testutil::TempDir dir;
  save_matrix(EmbeddingSet(oracle::gaussian(3, 2, 0)), dir / "clean.npy");
  const std::string dup = R"([
    {"dataset": "a", "condition": "clean", "severity": null, "path": "clean.npy", "backbone": "clip"},
    {"dataset": "a", "condition": "clean", "severity": null, "path": "clean.npy", "backbone": "clip"}])";
  EXPECT_EQ(kind_of([&] { parse_manifest(dup, dir.path()); }), ErrorKind::Input);
  const std::string missing = R"([
    {"dataset": "a", "condition": "clean", "severity": null, "path": "nope.npy", "backbone": "clip"}])";
  EXPECT_EQ(kind_of([&] { parse_manifest(missing, dir.path()); }), ErrorKind::Input);
  EXPECT_EQ(kind_of([&] { parse_manifest("{}", dir.path()); }), ErrorKind::Format);
  EXPECT_EQ(kind_of([&] { parse_manifest("[{\"dataset\": 1}]", dir.path()); }), ErrorKind::Format);
}
