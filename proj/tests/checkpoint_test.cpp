// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <doctest.h>
#include <json.hpp>

#include "evomerge/checkpoint.hpp"
#include "evomerge/errors.hpp"
#include "test_util.hpp"

using namespace evomerge;
using evomerge::testing::vec;

namespace {

// Hand-assembled container: magic, u32 header length, header, payload.
std::vector<char> raw_container(const nlohmann::json& header, const std::vector<float>& payload) {
  const std::string h = header.dump();
  std::vector<char> bytes = {'P', 'M', 'R', 'G'};
  const auto len = static_cast<std::uint32_t>(h.size());
  for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
  bytes.insert(bytes.end(), h.begin(), h.end());
  const auto* p = reinterpret_cast<const char*>(payload.data());
  bytes.insert(bytes.end(), p, p + payload.size() * sizeof(float));
  return bytes;
}

std::string message_of(const std::vector<char>& bytes) {
  try {
    decode_checkpoint(bytes);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("single tensor round-trip") {
  Checkpoint c;
  c.tensors["w"] = Tensor({2}, Eigen::ArrayXf::LinSpaced(2, 1.0f, 2.0f));
  const auto back = decode_checkpoint(encode_checkpoint(c));
  CHECK(back == c);
  CHECK(back.tensors.at("w").data[1] == 2.0f);
}

TEST_CASE("empty tensor map is rejected") {
  const auto msg = message_of(raw_container({{"tensors", nlohmann::json::object()}}, {}));
  CHECK(msg.find("at least one tensor") != std::string::npos);
  CHECK_THROWS_AS(encode_checkpoint(Checkpoint{}), Error);
}

TEST_CASE("declared extent beyond payload is a truncation error") {
  nlohmann::json header = {
      {"tensors", {{"w", {{"shape", {2}}, {"dtype", "f32"}, {"offset", 0}, {"nbytes", 8}}}}}};
  const auto msg = message_of(raw_container(header, {1.0f}));
  CHECK(msg.find("truncated") != std::string::npos);
  CHECK(msg.find("'w'") != std::string::npos);
}

TEST_CASE("malformed containers") {
  SUBCASE("bad magic") {
    auto bytes = encode_checkpoint({{{"w", vec({1.0f})}}, {}});
    bytes[0] = 'X';
    CHECK(message_of(bytes).find("magic") != std::string::npos);
  }
  SUBCASE("header length past end of file") {
    auto bytes = encode_checkpoint({{{"w", vec({1.0f})}}, {}});
    bytes.resize(12);
    CHECK(message_of(bytes).find("truncated header") != std::string::npos);
  }
  SUBCASE("nbytes disagrees with shape") {
    nlohmann::json header = {
        {"tensors", {{"w", {{"shape", {2}}, {"dtype", "f32"}, {"offset", 0}, {"nbytes", 4}}}}}};
    CHECK(message_of(raw_container(header, {1.0f, 2.0f})).find("mismatch") != std::string::npos);
  }
  SUBCASE("unsupported dtype") {
    nlohmann::json header = {
        {"tensors", {{"w", {{"shape", {1}}, {"dtype", "f16"}, {"offset", 0}, {"nbytes", 4}}}}}};
    CHECK(message_of(raw_container(header, {1.0f})).find("dtype") != std::string::npos);
  }
  SUBCASE("overlapping tensors") {
    nlohmann::json header = {
        {"tensors",
         {{"a", {{"shape", {2}}, {"dtype", "f32"}, {"offset", 0}, {"nbytes", 8}}},
          {"b", {{"shape", {2}}, {"dtype", "f32"}, {"offset", 0}, {"nbytes", 8}}}}}};
    CHECK(message_of(raw_container(header, {1.0f, 2.0f})).find("overlap") != std::string::npos);
  }
}

TEST_CASE("non-finite values rejected unless validation is off") {
  Checkpoint c;
  c.tensors["w"] = vec({1.0f, std::numeric_limits<float>::quiet_NaN()});
  const auto bytes = encode_checkpoint(c);
  const auto msg = message_of(bytes);
  CHECK(msg.find("non-finite") != std::string::npos);
  CHECK(msg.find("'w'") != std::string::npos);
  const auto loose = decode_checkpoint(bytes, {.validate_finite = false});
  CHECK(std::isnan(loose.tensors.at("w").data[1]));
}

TEST_CASE("save and load through the file system") {
  const auto dir = evomerge::testing::scratch_dir("checkpoint");
  std::mt19937_64 rng(7);
  auto c = evomerge::testing::random_checkpoint(rng, 3, 100);
  c.metadata["origin"] = "unit";
  const auto path = dir / "c.pmrg";
  save_checkpoint(c, path);
  CHECK(load_checkpoint(path) == c);

  SUBCASE("reload is byte-identical") {
    save_checkpoint(load_checkpoint(path), dir / "d.pmrg");
    std::ifstream a(path, std::ios::binary), b(dir / "d.pmrg", std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), {});
    const std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
  }
  SUBCASE("overwrite replaces old content") {
    Checkpoint other;
    other.tensors["x"] = vec({5.0f});
    save_checkpoint(other, path);
    CHECK(load_checkpoint(path) == other);
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(save_checkpoint(c, dir / "missing" / "sub" / "c.pmrg"), Error);
    CHECK_THROWS_AS(load_checkpoint(dir / "nope.pmrg"), Error);
  }
}

TEST_CASE("round-trip identity on random checkpoints") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> tensors(1, 10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = evomerge::testing::random_checkpoint(rng, tensors(rng), 10000);
    REQUIRE(decode_checkpoint(encode_checkpoint(c)) == c);
  }
}

TEST_CASE("compatibility") {
  Checkpoint a, b;
  a.tensors["w1"] = vec({1.0f, 2.0f});
  a.tensors["w2"] = vec({1.0f});
  b = a;
  CHECK(check_compatible(a, b).compatible());

  b.tensors.erase("w2");
  auto r = check_compatible(a, b);
  CHECK_FALSE(r.compatible());
  CHECK(r.missing == std::vector<std::string>{"w2"});
  CHECK(check_compatible(b, a).compatible() == r.compatible());

  Checkpoint c, d;
  c.tensors["w"] = vec({1.0f, 2.0f});
  d.tensors["w"] = vec({1.0f, 2.0f, 3.0f});
  r = check_compatible(c, d);
  CHECK_FALSE(r.compatible());
  CHECK(r.shape_mismatch == std::vector<std::string>{"w"});
  CHECK_FALSE(check_compatible(d, c).compatible());
}
