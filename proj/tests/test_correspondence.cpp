#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hipose/correspondence.hpp"
#include "hipose/error.hpp"
#include "test_util.hpp"

using namespace hipose;

TEST(Quantize, Examples) {
  EXPECT_EQ(quantize(std::vector<double>{0.9, 0.1}), (std::vector<std::uint8_t>{1, 0}));
  EXPECT_EQ(quantize(std::vector<double>{0.5, 0.5}), (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(quantize(std::vector<double>(16, 0.0)), std::vector<std::uint8_t>(16, 0));
}

TEST(Quantize, PackedIsMsbFirst) {
  EXPECT_EQ(quantize_packed(std::vector<double>{0.9, 0.1, 0.2, 0.6}), 0b1001u);
  EXPECT_EQ(quantize_packed(std::vector<double>{}), 0u);
}

TEST(Confidence, Examples) {
  EXPECT_EQ(confidence(std::vector<double>{1, 0, 0, 1}), std::vector<double>(4, 1.0));
  EXPECT_DOUBLE_EQ(confidence(std::vector<double>{0.7})[0], 0.7);
  EXPECT_DOUBLE_EQ(confidence(std::vector<double>{0.48})[0], 0.52);
}

TEST(Confidence, RangeProperty) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> soft(1000);
  for (auto& s : soft) s = u(rng);
  for (double p : confidence(soft)) {
    EXPECT_GE(p, 0.5);
    EXPECT_LE(p, 1.0);
  }
}

TEST(TrustBit, Examples) {
  EXPECT_EQ(trust_bit(std::vector<double>(16, 1.0), 0.02), 16);
  EXPECT_EQ(trust_bit(std::vector<double>{0.9, 0.9, 0.51, 0.9, 0.9}, 0.02), 2);
  EXPECT_EQ(trust_bit(std::vector<double>{0.51, 0.9, 0.9}, 0.02), 0);
}

TEST(TrustBit, ThresholdIsInclusive) {
  EXPECT_EQ(trust_bit(std::vector<double>{0.52, 0.5}, 0.02), 1);
}

TEST(TrustBit, BadTau) {
  const std::vector<double> p(4, 1.0);
  EXPECT_THROW(trust_bit(p, 0.0), InvalidArgument);
  EXPECT_THROW(trust_bit(p, 0.5), InvalidArgument);
}

TEST(TrustBit, FusedAgreesWithComposition) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> soft(16);
    // Mostly confident values so prefixes of various lengths occur.
    for (auto& s : soft) s = u(rng) < 0.9 ? (u(rng) < 0.5 ? 0.01 : 0.99) : u(rng);
    for (double tau : {0.02, 0.1, 0.3}) {
      ASSERT_EQ(trust_bit_of_soft(soft, tau), trust_bit(confidence(soft), tau));
    }
  }
}

TEST(InitialBit, Examples) {
  EXPECT_EQ(initial_bit(4, 10, 16), 10);
  EXPECT_EQ(initial_bit(13, 10, 16), 13);
  EXPECT_EQ(initial_bit(16, 10, 16), 16);
  EXPECT_EQ(initial_bit(0, 20, 16), 16);
}

TEST(SoftCode, RejectsOutOfRange) {
  EXPECT_THROW(SoftCode({0.1, 1.2}), InvalidArgument);
  EXPECT_THROW(SoftCode({-0.01}), InvalidArgument);
  EXPECT_THROW(SoftCode({std::nan("")}), InvalidArgument);
  EXPECT_NO_THROW(SoftCode({0.0, 1.0}));
}

TEST(CorrespondenceIo, RoundTripIsExact) {
  std::vector<Correspondence> corrs(3);
  corrs[0] = {Vec3(1.0 / 3.0, -2.5e-7, 1234.5678901234), SoftCode({0.1, 0.123456789012345}), 17u};
  corrs[1] = {Vec3(0, 0, 0), SoftCode({1.0, 0.0}), std::nullopt};
  corrs[2] = {Vec3(-1, 2, 3), SoftCode({0.5, 0.5}), 0u};
  std::stringstream ss;
  write_correspondences(ss, corrs);
  const auto back = read_correspondences(ss);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].point, corrs[i].point);
    EXPECT_EQ(back[i].code, corrs[i].code);
    EXPECT_EQ(back[i].gt_vertex, corrs[i].gt_vertex);
  }
}

TEST(CorrespondenceIo, BlankLinesSkipped) {
  std::istringstream in("\n{\"p\":[1,2,3],\"code\":[0.2]}\n\n");
  EXPECT_EQ(read_correspondences(in).size(), 1u);
}

TEST(CorrespondenceIo, MalformedNamesLine) {
  for (const char* name : {"bad_point.jsonl", "not_json.jsonl"}) {
    try {
      read_correspondences(test::data_path(name));
      FAIL() << name;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(CorrespondenceIo, CodeOutOfRangeIsParseError) {
  std::istringstream in("{\"p\":[1,2,3],\"code\":[1.5]}\n");
  EXPECT_THROW(read_correspondences(in), ParseError);
}
