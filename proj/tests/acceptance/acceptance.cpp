// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "remctl/channel.hpp"
#include "remctl/entropy.hpp"
#include "remctl/error.hpp"
#include "remctl/frame.hpp"
#include "remctl/keystore.hpp"
#include "remctl/protocol.hpp"
#include "remctl/randtest.hpp"
#include "remctl/registry.hpp"
#include "test_support.hpp"

using namespace remctl;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

CommandFrame random_command(std::mt19937_64& rng) {
  std::array<std::uint16_t, kChannelCount> ch{};
  std::array<std::uint8_t, kAuxSize> aux{};
  std::array<std::uint8_t, kTrailerSize> tr{};
  for (auto& c : ch) c = static_cast<std::uint16_t>(rng());
  for (auto& a : aux) a = static_cast<std::uint8_t>(rng());
  for (auto& t : tr) t = static_cast<std::uint8_t>(rng());
  return encode_command(ch, aux, tr);
}

Bytes on_air(const WireFrame& w) {
  const auto s = w.serialize();
  return {s.begin(), s.end()};
}

// Ciphertext bits from `frames` encryptions of one fixed command with fresh keys.
Bytes ciphertext_corpus(std::uint64_t seed, std::uint32_t frames) {
  auto src = EntropySource::seeded(seed);
  auto [a, b] = charge(src, kFullBlockSize, frames);
  Controller ctrl(std::move(a));
  Controlee clee(std::move(b));
  const std::vector<CommandFrame> script(frames, CommandRegistry::defaults().at("Connection"));
  const auto log = run_session(ctrl, clee, script, {0.0, 0.0, TamperModel::flip_one_random_byte, seed});
  return extract_ciphertext(log.intercepts, CipherMode::full);
}

// ---------------------------------------------------------------------------

Verdict otp_roundtrip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  auto keys = EntropySource::seeded(102);
  std::size_t failures = 0, trials = 0;
  for (auto mode : {CipherMode::full, CipherMode::selective}) {
    for (int i = 0; i < 10'000; ++i, ++trials) {
      const auto f = random_command(rng);
      const auto key = keys.fill(key_length(mode));
      const auto wire = otp_encrypt(f, key, {static_cast<std::uint32_t>(i)}, mode);
      const auto plain = otp_decrypt(wire, key, mode);
      failures += plain != f.bytes() || !validate_frame(plain);
    }
  }
  const double s = seconds_since(t0);
  return {failures == 0 && s < 5.0, fmt("%zu pairs, %zu failures, %.2f s (limit 5 s)", trials, failures, s)};
}

Verdict captured_rows() {
  const auto reg = CommandRegistry::defaults();
  std::size_t compared = 0, mismatches = 0;
  for (std::size_t r = 0; r < remctl::testing::kCaptured.size(); ++r) {
    const auto* cmd = reg.find(remctl::testing::kCapturedNames[r]);
    if (cmd == nullptr) {
      mismatches += kFrameSize;
      compared += kFrameSize;
      continue;
    }
    for (std::size_t i = 0; i < kFrameSize; ++i, ++compared) {
      mismatches += cmd->frame.bytes()[i] != remctl::testing::kCaptured[r][i];
    }
  }
  return {compared == 160 && mismatches == 0, fmt("%zu bytes compared, %zu mismatches", compared, mismatches)};
}

Verdict sync_under_loss() {
  const auto t0 = Clock::now();
  constexpr std::uint32_t kFrames = 10'000;
  auto src = EntropySource::seeded(303);
  auto [a, b] = charge(src, kFullBlockSize, kFrames);
  Controller ctrl(std::move(a));
  Controlee clee(std::move(b));

  const auto reg = CommandRegistry::defaults();
  std::mt19937_64 pick(304);
  std::vector<CommandFrame> script;
  for (std::uint32_t i = 0; i < kFrames; ++i) script.push_back(reg.commands()[pick() % reg.size()].frame);

  const auto log = run_session(ctrl, clee, script, {0.2, 0.0, TamperModel::flip_one_random_byte, 305});

  std::size_t delivered = 0, accepted_ok = 0, wrong = 0;
  std::optional<std::uint32_t> last_delivered;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const auto& e = log.events[i];
    if (e.event == EventKind::delivered) {
      ++delivered;
      last_delivered = e.address->index;
      const auto& rx = log.events.at(i + 1);
      const bool exact = rx.event == EventKind::accepted && rx.seq == e.seq &&
                         std::equal(rx.bytes.begin(), rx.bytes.end(), script[e.seq].bytes().begin(),
                                    script[e.seq].bytes().end());
      (exact ? accepted_ok : wrong) += 1;
    }
  }
  const auto desync = log.count(DiscardReason::validation_failed);

  // ledger parity: both sides agree on every block up to the last delivery,
  // and everything after it was lost in flight
  std::size_t ledger_diff = 0;
  const std::uint32_t horizon = last_delivered ? *last_delivered + 1 : 0;
  for (std::uint32_t k = 0; k < kFrames; ++k) {
    const bool c = ctrl.store().is_consumed({k});
    const bool r = clee.store().is_consumed({k});
    ledger_diff += k < horizon ? c != r : r;
  }
  const double s = seconds_since(t0);
  const bool ok = delivered > 0 && wrong == 0 && desync == 0 && ledger_diff == 0 &&
                  clee.accepted() == delivered && s < 10.0;
  return {ok, fmt("%zu delivered, %zu accepted exactly, %zu wrong, %llu desync, ledger diff %zu, %.2f s",
                  delivered, accepted_ok, wrong, static_cast<unsigned long long>(desync), ledger_diff, s)};
}

Verdict tamper_immunity() {
  const auto t0 = Clock::now();
  constexpr std::uint32_t kFrames = 100'000;
  const auto reg = CommandRegistry::defaults();

  auto src = EntropySource::seeded(404);
  auto [a, b] = charge(src, kFullBlockSize, kFrames);
  Controller ctrl(std::move(a));
  Controlee clee(std::move(b));
  std::vector<CommandFrame> script;
  for (std::uint32_t i = 0; i < kFrames; ++i) script.push_back(reg.commands()[i % reg.size()].frame);
  const auto log = run_session(ctrl, clee, script, {0.0, 1.0, TamperModel::flip_one_random_byte, 405});
  const auto tampered = log.count(EventKind::tampered);
  const auto tampered_accepted = log.count(EventKind::accepted);

  auto src2 = EntropySource::seeded(406);
  auto [c, d] = charge(src2, kFullBlockSize, kFrames);
  (void)c;
  Controlee victim(std::move(d));
  std::size_t plain_accepted = 0;
  for (std::uint32_t addr = 0; addr < kFrames; ++addr) {
    const WireFrame plain{KeyAddress{addr}, reg.commands()[addr % reg.size()].frame.bytes()};
    plain_accepted += victim.receive(on_air(plain)).is_accepted();
  }
  const double s = seconds_since(t0);
  return {tampered == kFrames && tampered_accepted == 0 && plain_accepted == 0 && s < 30.0,
          fmt("%llu tampered -> %llu accepted; %u plaintext -> %zu accepted; %.2f s",
              static_cast<unsigned long long>(tampered), static_cast<unsigned long long>(tampered_accepted),
              kFrames, plain_accepted, s)};
}

Verdict replay_defense() {
  constexpr std::uint32_t kTrials = 1000;
  auto src = EntropySource::seeded(505);
  auto [a, b] = charge(src, kFullBlockSize, kTrials);
  Controller ctrl(std::move(a));
  Controlee clee(std::move(b));
  const auto reg = CommandRegistry::defaults();

  std::vector<Bytes> accepted;
  std::size_t stale = 0, attempts = 0;
  for (std::uint32_t i = 0; i < kTrials; ++i) {
    const auto w = on_air(ctrl.send(reg.commands()[i % reg.size()].frame));
    if (!clee.receive(w).is_accepted()) continue;
    accepted.push_back(w);
    ++attempts;
    stale += clee.receive(w).reason == DiscardReason::replay_or_stale;
  }
  for (const auto& w : accepted) {
    ++attempts;
    const auto rx = clee.receive(w);
    stale += !rx.is_accepted() && rx.reason == DiscardReason::replay_or_stale;
  }
  return {accepted.size() == kTrials && stale == attempts,
          fmt("%zu accepted frames, %zu/%zu replays ReplayOrStale", accepted.size(), stale, attempts)};
}

struct NistCounts {
  Proportion frequency, runs;
  bool pass() const { return frequency.proportion >= 0.96 && runs.proportion >= 0.96; }
};

NistCounts nist_counts(std::uint64_t seed) {
  constexpr std::size_t kSequences = 100, kBits = 100'000;
  constexpr std::uint32_t kFrames = (kSequences * kBits / 8 + kFrameSize - 1) / kFrameSize;
  auto bytes = ciphertext_corpus(seed, kFrames);
  bytes.resize(kSequences * kBits / 8);
  AuditOptions opts;
  opts.balance = opts.run_lengths = opts.autocorr = false;
  opts.sequences = kSequences;
  const auto rep = audit(bytes, opts);
  return {rep.proportions.at("frequency"), rep.proportions.at("runs")};
}

Verdict nist_proportions() {
  const auto main = nist_counts(1);
  // context only: the same gate on further corpora
  int others = 0;
  for (std::uint64_t seed = 2; seed <= 21; ++seed) others += nist_counts(seed).pass();
  return {main.pass(),
          fmt("monobit %zu/100, runs %zu/100 (need >= 0.96; interval lower bound %.5f); "
              "%d/20 further corpora also pass",
              main.frequency.passed, main.runs.passed, main.frequency.lower, others)};
}

Verdict autocorrelation_shape() {
  constexpr std::size_t kBits = 1'000'000;
  auto bytes = ciphertext_corpus(707, kBits / 8 / kFrameSize + 1);
  bytes.resize(kBits / 8);
  const auto series = autocorrelation(BitSequence::from_bytes(bytes), 1000);
  const double frac = series.fraction_within(4.0);
  double worst = 0.0;
  for (std::ptrdiff_t t = 1; t <= 1000; ++t) {
    worst = std::max(worst, std::abs(series.at(t)) * std::sqrt(static_cast<double>(kBits - static_cast<std::size_t>(t))));
  }
  return {series.at(0) == 1.0 && frac >= 0.99,
          fmt("C(0) = %.17g, %.1f%% of lags within 4/sqrt(n-tau), max |C|*sqrt(n-tau) = %.2f", series.at(0),
              100.0 * frac, worst)};
}

Verdict golomb_postulates() {
  constexpr std::size_t kBits = 1'000'000;
  auto bytes = ciphertext_corpus(808, kBits / 8 / kFrameSize + 1);
  bytes.resize(kBits / 8);
  const auto seq = BitSequence::from_bytes(bytes);
  const auto bal = golomb_balance(seq);
  const auto runs = golomb_run_lengths(seq);
  return {bal.deviation <= 0.002 && runs.pass,
          fmt("|p - 0.5| = %.6f, %zu runs, %zu run-length checks %s", bal.deviation, runs.total_runs,
              runs.checks.size(), runs.pass ? "within 3 sigma" : "OUT of bounds")};
}

Verdict store_persistence() {
  std::mt19937_64 rng(909);
  const auto path = remctl::testing::scratch("acceptance.sks");
  std::size_t roundtrip_bad = 0, magic = 0, trunc = 0, crc = 0, header = 0, silent = 0;
  constexpr int kSequences = 1000;

  for (int it = 0; it < kSequences; ++it) {
    const std::size_t bs = rng() % 2 ? kFullBlockSize : kSelectiveBlockSize;
    const auto count = static_cast<std::uint32_t>(1 + rng() % 300);
    auto src = EntropySource::seeded(rng());
    auto store = charge(src, bs, count).first;

    const int ops = static_cast<int>(rng() % 20);
    for (int k = 0; k < ops && !store.exhausted(); ++k) {
      const KeyAddress addr{static_cast<std::uint32_t>(rng() % count)};
      if (store.is_consumed(addr)) continue;
      if (rng() % 2) {
        store.take_block(addr);
      } else if (addr >= store.next_expected()) {
        store.discard_through(addr);
      }
    }
    store.save(path);
    const auto back = SksStore::load(path);
    roundtrip_bad += !(back == store) || back.serialize() != store.serialize() ||
                     back.next_expected() != store.next_expected();

    const auto image = store.serialize();
    auto expect = [&](Bytes bad, auto tag, std::size_t& counter) {
      remctl::testing::write_file(path, bad);
      try {
        (void)SksStore::load(path);
        ++silent;
      } catch (const decltype(tag)&) {
        ++counter;
      } catch (const Error&) {
        ++silent;
      }
    };

    auto bad_magic = image;
    bad_magic[rng() % 4] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    expect(bad_magic, BadMagic(""), magic);

    Bytes cut(image.begin(), image.begin() + static_cast<std::ptrdiff_t>(rng() % image.size()));
    expect(cut, TruncatedFile(""), trunc);

    auto flipped = image;
    flipped[12 + rng() % (image.size() - 12)] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    expect(flipped, ChecksumMismatch(""), crc);

    // any header field change must be rejected by some declared error
    auto hdr = image;
    hdr[4 + rng() % 8] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    remctl::testing::write_file(path, hdr);
    try {
      (void)SksStore::load(path);
      ++silent;
    } catch (const Error&) {
      ++header;
    }
  }
  const bool ok = roundtrip_bad == 0 && silent == 0 && magic == kSequences && trunc == kSequences &&
                  crc == kSequences && header == kSequences;
  return {ok, fmt("%d sequences: %zu roundtrip mismatches; BadMagic %zu, TruncatedFile %zu, ChecksumMismatch %zu, "
                  "header %zu, silent %zu",
                  kSequences, roundtrip_bad, magic, trunc, crc, header, silent)};
}

Verdict pvalue_calibration() {
  constexpr int kSequences = 1000;
  std::vector<double> p;
  p.reserve(kSequences);
  for (int s = 1; s <= kSequences; ++s) {
    const auto bits = BitSequence::from_bytes(EntropySource::seeded(10'000 + s).fill(100'000 / 8));
    p.push_back(monobit_frequency(bits).p_value);
  }
  const auto ks = ks_uniformity(p, 0.001);
  return {ks.pass, fmt("D = %.4f, critical %.4f, KS p = %.4f", ks.statistic, ks.critical, ks.p_value)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"OTP roundtrip and validation", otp_roundtrip},
      {"captured command rows", captured_rows},
      {"synchronization under loss", sync_under_loss},
      {"tamper and plaintext immunity", tamper_immunity},
      {"replay defense", replay_defense},
      {"ciphertext NIST pass proportions", nist_proportions},
      {"ciphertext autocorrelation", autocorrelation_shape},
      {"Golomb balance and run lengths", golomb_postulates},
      {"key store persistence", store_persistence},
      {"monobit P-value calibration", pvalue_calibration},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s  %2d  %-34s %s\n", v.pass ? "PASS" : "FAIL", n, name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
