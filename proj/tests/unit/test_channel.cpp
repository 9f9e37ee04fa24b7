#include <random>

#include "doctest.h"
#include "remctl/channel.hpp"
#include "remctl/error.hpp"
#include "test_support.hpp"

using namespace remctl;
using remctl::testing::read_file;
using remctl::testing::scratch;

namespace {

Bytes frame_with(std::uint8_t fill, std::uint32_t addr) {
  Bytes b(36, fill);
  const auto a = KeyAddress{addr}.to_bytes();
  std::copy(a.begin(), a.end(), b.begin() + 32);
  return b;
}

}  // namespace

TEST_CASE("perfect channel delivers unchanged") {
  Channel ch({0.0, 0.0, TamperModel::flip_one_random_byte, 1});
  const auto f = frame_with(7, 3);
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto d = ch.transmit(f, i);
    CHECK(d.outcome == Outcome::delivered);
    CHECK(d.bytes == f);
  }
  CHECK(ch.intercepts().size() == 100);
}

TEST_CASE("loss probability 1 drops everything, yet the tap sees it all") {
  Channel ch({1.0, 0.0, TamperModel::flip_one_random_byte, 1});
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto d = ch.transmit(frame_with(static_cast<std::uint8_t>(i), static_cast<std::uint32_t>(i)), i);
    CHECK(d.outcome == Outcome::dropped);
    CHECK(d.bytes.empty());
  }
  REQUIRE(ch.intercepts().size() == 50);
  CHECK(ch.intercepts()[49].frame == frame_with(49, 49));
  CHECK(ch.intercepts()[49].outcome == Outcome::dropped);
}

TEST_CASE("drop count at loss 0.2 over 1e4 frames lies within the 3-sigma binomial band") {
  Channel ch({0.2, 0.0, TamperModel::flip_one_random_byte, 12345});
  int dropped = 0;
  for (std::uint64_t i = 0; i < 10'000; ++i) dropped += ch.transmit(frame_with(0, 0), i).outcome == Outcome::dropped;
  CHECK(dropped >= 2000 - 120);
  CHECK(dropped <= 2000 + 120);
}

TEST_CASE("flip tamper changes exactly one payload byte and never the address") {
  Channel ch({0.0, 1.0, TamperModel::flip_one_random_byte, 9});
  const auto f = frame_with(0x55, 0xDEADBEEF);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    auto d = ch.transmit(f, i);
    REQUIRE(d.outcome == Outcome::tampered);
    int diffs = 0;
    for (std::size_t p = 0; p < 32; ++p) diffs += d.bytes[p] != f[p];
    CHECK(diffs == 1);
    CHECK(std::equal(f.begin() + 32, f.end(), d.bytes.begin() + 32));
  }
}

TEST_CASE("randomize tamper rewrites the payload and keeps the address") {
  Channel ch({0.0, 1.0, TamperModel::randomize_payload, 9});
  const auto f = frame_with(0x55, 77);
  auto d = ch.transmit(f, 0);
  CHECK(d.outcome == Outcome::tampered);
  CHECK(!std::equal(f.begin(), f.begin() + 32, d.bytes.begin()));
  CHECK(std::equal(f.begin() + 32, f.end(), d.bytes.begin() + 32));
}

TEST_CASE("identical seeds give identical schedules") {
  const ChannelConfig cfg{0.3, 0.3, TamperModel::flip_one_random_byte, 42};
  Channel a(cfg), b(cfg);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto f = frame_with(static_cast<std::uint8_t>(i), static_cast<std::uint32_t>(i));
    auto da = a.transmit(f, i);
    auto db = b.transmit(f, i);
    CHECK(da.outcome == db.outcome);
    CHECK(da.bytes == db.bytes);
  }
}

TEST_CASE("probabilities outside [0, 1] are rejected") {
  CHECK_THROWS_AS(Channel({1.5, 0.0, TamperModel::flip_one_random_byte, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Channel({0.0, -0.1, TamperModel::flip_one_random_byte, 0}), std::invalid_argument);
}

TEST_CASE("export/import of intercepts") {
  Channel ch({0.5, 0.2, TamperModel::flip_one_random_byte, 3});
  for (std::uint64_t i = 0; i < 5; ++i) ch.transmit(frame_with(static_cast<std::uint8_t>(i), static_cast<std::uint32_t>(i)), 100 + i);
  const auto path = scratch("five.corpus");
  export_intercepts(ch.intercepts(), path);
  CHECK(read_file(path).size() == 180);

  const auto back = import_intercepts(path);
  REQUIRE(back.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(back[i].seq == ch.intercepts()[i].seq);
    CHECK(back[i].frame == ch.intercepts()[i].frame);
    CHECK(back[i].outcome == ch.intercepts()[i].outcome);
  }

  std::ifstream idx(sidecar_path(path));
  std::string first;
  std::getline(idx, first);
  CHECK(first.starts_with("100, 0, "));
}

TEST_CASE("empty log exports a valid empty corpus") {
  const auto path = scratch("empty.corpus");
  export_intercepts({}, path);
  CHECK(read_file(path).empty());
  CHECK(import_intercepts(path).empty());
}

TEST_CASE("corpus without sidecar imports with sequential numbering") {
  const auto path = scratch("bare.corpus");
  remctl::testing::write_file(path, Bytes(72, 1));
  std::filesystem::remove(sidecar_path(path));
  const auto log = import_intercepts(path);
  REQUIRE(log.size() == 2);
  CHECK(log[1].seq == 1);
  CHECK_FALSE(log[1].outcome.has_value());

  remctl::testing::write_file(path, Bytes(71, 1));
  CHECK_THROWS_AS(import_intercepts(path), BadLength);
}

TEST_CASE("export to an unwritable path is an I/O error") {
  CHECK_THROWS_AS(export_intercepts({}, scratch("nope") / "deeper" / "c.bin"), IoError);
}

TEST_CASE("ciphertext extraction skips clear bytes and addresses") {
  Bytes corpus;
  for (int f = 0; f < 2; ++f) {
    for (int i = 0; i < 36; ++i) corpus.push_back(static_cast<std::uint8_t>(i));
  }
  const auto full = extract_ciphertext(corpus, CipherMode::full);
  REQUIRE(full.size() == 64);
  CHECK(full[31] == 31);
  CHECK(full[32] == 0);
  const auto sel = extract_ciphertext(corpus, CipherMode::selective);
  REQUIRE(sel.size() == 46);
  CHECK(sel[0] == 5);
  CHECK(sel[22] == 27);
  CHECK(sel[23] == 5);
}
