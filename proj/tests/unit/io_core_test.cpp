#include <gtest/gtest.h>

#include <cstring>

#include "salrank/binary_io.hpp"
#include "salrank/checkpoint.hpp"
#include "salrank/errors.hpp"
#include "salrank/feature_blob.hpp"
#include "salrank/manifest.hpp"
#include "salrank/mlp.hpp"
#include "salrank/pgm.hpp"
#include "salrank/ranker.hpp"
#include "salrank/rng.hpp"
#include "test_support.hpp"

namespace salrank {
namespace {

using testing::TempDir;

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

FeatureStore small_store() {
  FeatureStore s(4);
  s.append(std::vector<float>{1.0f, -2.5f, 3.25f, 0.0f});
  s.append(std::vector<float>{1e-30f, 7.0f, -0.125f, 42.0f});
  return s;
}

// ---- feature blob

TEST(FeatureBlob, RoundTripTwoVectors) {
  TempDir dir;
  const FeatureStore s = small_store();
  write_feature_blob(s, dir.file("f.srf"));
  const FeatureStore back = read_feature_blob(dir.file("f.srf"));
  ASSERT_EQ(back.count(), 2u);
  ASSERT_EQ(back.dim(), 4u);
  EXPECT_EQ(std::memcmp(back.raw().data(), s.raw().data(), s.raw().size() * sizeof(float)), 0);
}

TEST(FeatureBlob, TruncatedFileNamesByteCounts) {
  TempDir dir;
  write_feature_blob(small_store(), dir.file("f.srf"));
  auto bytes = testing::slurp(dir.path() / "f.srf");
  bytes.resize(bytes.size() - 3);
  testing::spit(dir.path() / "f.srf", std::string(bytes.begin(), bytes.end()));
  const std::string msg = error_of([&] { (void)read_feature_blob(dir.file("f.srf")); });
  EXPECT_NE(msg.find("truncated"), std::string::npos) << msg;
  EXPECT_NE(msg.find("expected 44 bytes"), std::string::npos) << msg;
  EXPECT_NE(msg.find("found 41"), std::string::npos) << msg;
}

TEST(FeatureBlob, PayloadForNarrowerDimIsDimMismatch) {
  TempDir dir;
  detail::ByteWriter w;
  w.bytes("SRF1");
  w.put<std::uint32_t>(2);
  w.put<std::uint32_t>(4096);
  for (int i = 0; i < 2 * 4095; ++i) w.put<float>(0.5f);
  detail::write_file_bytes(dir.file("f.srf"), w.buffer());
  const std::string msg = error_of([&] { (void)read_feature_blob(dir.file("f.srf")); });
  EXPECT_NE(msg.find("dim mismatch"), std::string::npos) << msg;
}

TEST(FeatureBlob, BadMagic) {
  TempDir dir;
  testing::spit(dir.path() / "f.srf", std::string("XXXX\0\0\0\0\0\0\0\0", 12));
  EXPECT_THROW((void)read_feature_blob(dir.file("f.srf")), ValidationError);
}

TEST(FeatureBlob, StoreRejectsWrongDimAndNonFinite) {
  FeatureStore s(4);
  EXPECT_THROW(s.append(std::vector<float>(3, 0.0f)), ValidationError);
  EXPECT_THROW(s.append(std::vector<float>{0, 0, NAN, 0}), ValidationError);
  EXPECT_THROW((void)s[0], ValidationError);
}

TEST(FeatureBlob, SerializationIsDeterministic) {
  TempDir dir;
  write_feature_blob(small_store(), dir.file("a.srf"));
  write_feature_blob(small_store(), dir.file("b.srf"));
  EXPECT_EQ(testing::slurp(dir.path() / "a.srf"), testing::slurp(dir.path() / "b.srf"));
}

// ---- PGM

TEST(Pgm, DecodesIntensitiesAsOver255) {
  std::string text = "P5\n2 2\n255\n";
  text += std::string{'\x00', '\xff', '\x80', '\x40'};
  const SaliencyMap m = decode_pgm(std::vector<std::uint8_t>(text.begin(), text.end()));
  ASSERT_EQ(m.width, 2);
  ASSERT_EQ(m.height, 2);
  EXPECT_EQ(m.data[0], 0.0f);
  EXPECT_EQ(m.data[1], 1.0f);
  EXPECT_FLOAT_EQ(m.data[2], 128.0f / 255.0f);
  EXPECT_FLOAT_EQ(m.data[3], 64.0f / 255.0f);
}

TEST(Pgm, AllZeroRoundTrip) {
  TempDir dir;
  const SaliencyMap m(7, 3, 0.0f);
  write_map(m, dir.file("z.pgm"));
  EXPECT_EQ(read_map(dir.file("z.pgm")), m);
}

TEST(Pgm, CanonicalFileRoundTripsByteForByte) {
  TempDir dir;
  std::string text = "P5\n3 2\n255\n";
  for (int v : {0, 1, 127, 128, 254, 255}) text.push_back(static_cast<char>(v));
  testing::spit(dir.path() / "a.pgm", text);
  write_map(read_map(dir.file("a.pgm")), dir.file("b.pgm"));
  EXPECT_EQ(testing::slurp(dir.path() / "a.pgm"), testing::slurp(dir.path() / "b.pgm"));
}

TEST(Pgm, QuantizationErrorAtMostOneStep) {
  Rng rng(5);
  SaliencyMap m(16, 16);
  for (auto& v : m.data) v = static_cast<float>(rng.uniform());
  const auto back = decode_pgm(encode_pgm(m));
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_LE(std::fabs(back.data[i] - m.data[i]), 1.0f / 255.0f);
}

TEST(Pgm, RejectsMaxvalOtherThan255) {
  std::string text = "P5\n1 1\n15\n";
  text.push_back('\x03');
  const std::string msg = error_of([&] { (void)decode_pgm(std::vector<std::uint8_t>(text.begin(), text.end())); });
  EXPECT_NE(msg.find("unsupported format"), std::string::npos) << msg;
}

TEST(Pgm, RejectsAsciiAndShortPayload) {
  const std::string ascii = "P2\n1 1\n255\n0\n";
  EXPECT_THROW((void)decode_pgm(std::vector<std::uint8_t>(ascii.begin(), ascii.end())), ValidationError);
  std::string shortp = "P5\n2 2\n255\n";
  shortp += "ab";
  const std::string msg = error_of([&] { (void)decode_pgm(std::vector<std::uint8_t>(shortp.begin(), shortp.end())); });
  EXPECT_NE(msg.find("dimension header mismatch"), std::string::npos) << msg;
}

TEST(Pgm, MissingFileIsIoError) { EXPECT_THROW((void)read_map("/nonexistent/x.pgm"), IoError); }

// ---- checkpoint

TEST(Checkpoint, FreshModelForwardIsBitIdenticalAfterReload) {
  TempDir dir;
  const RankerModel m = RankerModel::random({12, 8, 4, 1}, 99);
  save_checkpoint(to_checkpoint(m, 99), dir.file("m.srm"));
  const RankerModel back = from_checkpoint(load_checkpoint(dir.file("m.srm")));
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    std::vector<float> x(12);
    for (auto& v : x) v = static_cast<float>(rng.normal());
    const float a = m.forward(x);
    const float b = back.forward(x);
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  }
}

TEST(Checkpoint, ResaveIsByteIdentical) {
  TempDir dir;
  save_checkpoint(to_checkpoint(RankerModel::random({6, 5, 1}, 3), 3, 7, 0.25), dir.file("a.srm"));
  save_checkpoint(load_checkpoint(dir.file("a.srm")), dir.file("b.srm"));
  EXPECT_EQ(testing::slurp(dir.path() / "a.srm"), testing::slurp(dir.path() / "b.srm"));
}

TEST(Checkpoint, DimsDisagreeingWithWeightBlocksAreRejected) {
  // Header claims 8192 -> 1024 -> 7 but the blocks are sized for 8192 -> 1024 -> 1.
  RankerCheckpoint ck;
  ck.layer_dims = {8192, 1024, 1};
  ck.weights = {std::vector<float>(8192 * 1024, 0.0f), std::vector<float>(1024, 0.0f)};
  ck.biases = {std::vector<float>(1024, 0.0f), std::vector<float>(1, 0.0f)};
  auto bytes = encode_checkpoint(ck);
  const std::uint32_t seven = 7;
  std::memcpy(bytes.data() + 4 + 4 + 2 * 4, &seven, 4);
  const std::string msg = error_of([&] { (void)decode_checkpoint(bytes); });
  EXPECT_NE(msg.find("layer-chain inconsistency"), std::string::npos) << msg;

  ck.layer_dims = {8192, 1024, 7};
  EXPECT_THROW(ck.validate(), ValidationError);
}

TEST(Checkpoint, MagicMismatch) {
  std::vector<std::uint8_t> bytes{'S', 'R', 'F', '1', 0, 0, 0, 0};
  const std::string msg = error_of([&] { (void)decode_checkpoint(bytes); });
  EXPECT_NE(msg.find("magic mismatch"), std::string::npos) << msg;
}

// ---- manifest

TEST(Manifest, EmptyManifestGivesEmptyDataset) {
  TempDir dir;
  testing::spit(dir.path() / "m.json", R"({"version": 1, "images": []})");
  EXPECT_EQ(load_manifest(dir.file("m.json")).size(), 0u);
}

class ManifestFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    FeatureStore s(4);
    for (int i = 0; i < 7; ++i) s.append(std::vector<float>(4, static_cast<float>(i)));
    write_feature_blob(s, dir.file("features.srf"));
  }

  std::string write(const std::string& box2) {
    const std::string text = R"({"version": 1, "feature_dim": 4, "feature_blob": "features.srf",
      "images": [{"id": "img0", "width": 40, "height": 30, "gt": "gt/img0.pgm", "maps": ["maps/a.pgm"],
        "image_feature": 0,
        "proposals": [
          {"id": "p0", "box": [0, 0, 10, 10], "confidence": 0.9, "feature": 1, "enlarged_feature": 2},
          {"id": "p1", "box": [5, 5, 10, 10], "confidence": 0.5, "feature": 3, "enlarged_feature": 4},
          {"id": "p2", "box": )" + box2 + R"(, "confidence": 0.1, "feature": 5, "enlarged_feature": 6}]}]})";
    testing::spit(dir.path() / "m.json", text);
    return dir.file("m.json");
  }

  TempDir dir;
};

TEST_F(ManifestFixture, OneImageThreeProposalsRoundTrips) {
  const Dataset ds = load_manifest(write("[20, 10, 20, 20]"));
  ASSERT_EQ(ds.size(), 1u);
  const auto& r = ds[0];
  EXPECT_EQ(r.id, "img0");
  ASSERT_EQ(r.proposals.size(), 3u);
  EXPECT_EQ(r.proposals[2].box, (BBox{20, 10, 20, 20}));
  EXPECT_EQ(r.proposals[1].feature_ref, 3u);
  EXPECT_EQ(*r.image_feature_ref, 0u);
  EXPECT_EQ(ds.features()[6][0], 6.0f);

  write_manifest(ds, dir.file("again.json"));
  const Dataset again = load_manifest(dir.file("again.json"));
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].proposals.size(), 3u);
  EXPECT_EQ(again[0].gt_path, r.gt_path);
  EXPECT_EQ(again[0].candidate_map_paths, r.candidate_map_paths);
  write_manifest(again, dir.file("third.json"));
  EXPECT_EQ(testing::slurp(dir.path() / "again.json"), testing::slurp(dir.path() / "third.json"));
}

TEST_F(ManifestFixture, BoxOutsideImageIsSchemaViolation) {
  const std::string path = write("[35, 10, 10, 10]");
  const std::string msg = error_of([&] { (void)load_manifest(path); });
  EXPECT_NE(msg.find("schema violation"), std::string::npos) << msg;
  EXPECT_NE(msg.find("box"), std::string::npos) << msg;
}

TEST_F(ManifestFixture, DanglingFeatureReference) {
  std::string text = R"({"feature_dim": 4, "feature_blob": "features.srf", "images": [{"id": "a", "width": 5,
    "height": 5, "proposals": [{"id": "p", "box": [0,0,1,1], "confidence": 1, "feature": 7, "enlarged_feature": 0}]}]})";
  testing::spit(dir.path() / "d.json", text);
  const std::string msg = error_of([&] { (void)load_manifest(dir.file("d.json")); });
  EXPECT_NE(msg.find("dangling feature reference"), std::string::npos) << msg;
}

TEST_F(ManifestFixture, GtWithWrongDimsIsRejectedOnLoad) {
  const Dataset ds = load_manifest(write("[20, 10, 20, 20]"));
  std::filesystem::create_directories(dir.path() / "gt");
  write_map(SaliencyMap(4, 4, 1.0f), dir.file("gt/img0.pgm"));
  EXPECT_THROW((void)ds.load_gt(0), ValidationError);
}

TEST(Manifest, MissingFileIsIoError) { EXPECT_THROW((void)load_manifest("/nonexistent/m.json"), IoError); }

}  // namespace
}  // namespace salrank
