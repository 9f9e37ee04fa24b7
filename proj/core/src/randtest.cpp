#include "remctl/randtest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "remctl/error.hpp"

// P-values use std::erfc. glibc evaluates it with piecewise minimax rational
// approximations (the fdlibm s_erf.c scheme), accurate to about one ulp over
// the whole real line, well inside the 1e-10 relative error this module needs.

namespace remctl {
namespace {

void require_length(const BitSequence& seq, const TestOptions& opts, const char* test) {
  if (!opts.permissive && seq.size() < kMinTestBits) {
    throw TooShort(std::string(test) + " needs at least 100 bits, got " +
                   std::to_string(seq.size()));
  }
}

std::size_t count_runs(std::span<const std::uint8_t> bits) {
  std::size_t runs = 1;
  for (std::size_t i = 1; i < bits.size(); ++i) runs += bits[i] != bits[i - 1];
  return runs;
}

}  // namespace

// ---------------------------------------------------------------- BitSequence

BitSequence::BitSequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw TooShort("empty bit sequence");
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("bit values must be 0 or 1");
    ones_ += b;
  }
}

BitSequence BitSequence::from_bytes(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> bits(bytes.size() * 8);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    for (int k = 0; k < 8; ++k) bits[8 * i + k] = (bytes[i] >> (7 - k)) & 1;
  }
  return BitSequence(std::move(bits));
}

BitSequence BitSequence::from_bits(std::vector<std::uint8_t> bits) {
  return BitSequence(std::move(bits));
}

BitSequence BitSequence::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may only contain 0 and 1");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return BitSequence(std::move(bits));
}

BitSequence BitSequence::slice(std::size_t offset, std::size_t length) const {
  if (offset > bits_.size() || length > bits_.size() - offset) {
    throw std::out_of_range("bit slice past end of sequence");
  }
  auto first = bits_.begin() + static_cast<std::ptrdiff_t>(offset);
  return BitSequence(std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(length)));
}

// ---------------------------------------------------------------- NIST tests

TestResult monobit_frequency(const BitSequence& seq, TestOptions opts) {
  require_length(seq, opts, "frequency test");
  const double n = static_cast<double>(seq.size());
  const double sum = 2.0 * static_cast<double>(seq.ones()) - n;
  const double s_obs = std::abs(sum) / std::sqrt(n);
  const double p = std::erfc(s_obs / std::numbers::sqrt2);

  TestResult r;
  r.test_name = "frequency";
  r.n = seq.size();
  r.statistic = s_obs;
  r.p_value = p;
  r.alpha = opts.alpha;
  r.pass = p >= opts.alpha;
  return r;
}

TestResult nist_runs(const BitSequence& seq, TestOptions opts) {
  require_length(seq, opts, "runs test");
  const double n = static_cast<double>(seq.size());
  const double pi = static_cast<double>(seq.ones()) / n;
  const auto v_obs = count_runs(seq.bits());

  TestResult r;
  r.test_name = "runs";
  r.n = seq.size();
  r.statistic = static_cast<double>(v_obs);
  r.alpha = opts.alpha;

  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
    r.applicable = false;
    r.p_value = 0.0;
    r.pass = false;
    r.note = "frequency prerequisite failed";
    return r;
  }
  const double q = pi * (1.0 - pi);
  const double num = std::abs(static_cast<double>(v_obs) - 2.0 * n * q);
  const double den = 2.0 * std::sqrt(2.0 * n) * q;
  r.p_value = std::erfc(num / den);
  r.pass = r.p_value >= opts.alpha;
  return r;
}

// ---------------------------------------------------------------- Golomb

Balance golomb_balance(const BitSequence& seq) {
  Balance b;
  b.n = seq.size();
  b.ones = seq.ones();
  b.proportion = static_cast<double>(b.ones) / static_cast<double>(b.n);
  b.deviation = std::abs(b.proportion - 0.5);
  return b;
}

RunLengthReport golomb_run_lengths(const BitSequence& seq, TestOptions opts) {
  require_length(seq, opts, "run-length test");
  RunLengthReport rep;
  const auto bits = seq.bits();
  std::size_t len = 1;
  for (std::size_t i = 1; i <= bits.size(); ++i) {
    if (i < bits.size() && bits[i] == bits[i - 1]) {
      ++len;
    } else {
      ++rep.histogram[len];
      ++rep.total_runs;
      len = 1;
    }
  }

  const double runs = static_cast<double>(rep.total_runs);
  const auto max_checked = static_cast<long>(std::floor(std::log2(runs))) - 2;
  rep.pass = true;
  for (long l = 1; l <= max_checked; ++l) {
    const auto length = static_cast<std::size_t>(l);
    const double expected = std::ldexp(1.0, -static_cast<int>(l));
    const auto it = rep.histogram.find(length);
    const double observed = it == rep.histogram.end() ? 0.0 : static_cast<double>(it->second) / runs;
    const double tolerance = 3.0 * std::sqrt(expected * (1.0 - expected) / runs);
    const bool ok = std::abs(observed - expected) <= tolerance;
    rep.checks.push_back({length, observed, expected, tolerance, ok});
    rep.pass = rep.pass && ok;
  }
  return rep;
}

// ---------------------------------------------------------------- autocorrelation

AutocorrSeries::AutocorrSeries(std::size_t n, std::vector<double> non_negative)
    : n_(n), values_(std::move(non_negative)) {
  if (values_.empty()) throw std::invalid_argument("autocorrelation series needs lag 0");
}

double AutocorrSeries::at(std::ptrdiff_t tau) const {
  const auto lag = static_cast<std::size_t>(tau < 0 ? -tau : tau);
  if (lag >= values_.size()) throw LagOutOfRange("lag " + std::to_string(tau) + " outside series");
  return values_[lag];
}

double AutocorrSeries::fraction_within(double sigmas) const {
  if (values_.size() < 2) return 1.0;
  std::size_t ok = 0;
  for (std::size_t tau = 1; tau < values_.size(); ++tau) {
    const double bound = sigmas / std::sqrt(static_cast<double>(n_ - tau));
    ok += std::abs(values_[tau]) <= bound;
  }
  return static_cast<double>(ok) / static_cast<double>(values_.size() - 1);
}

AutocorrSeries autocorrelation(const BitSequence& seq, std::size_t max_lag) {
  const std::size_t n = seq.size();
  if (max_lag == 0 || max_lag >= n) {
    throw LagOutOfRange("max lag must satisfy 0 < T < n (T = " + std::to_string(max_lag) +
                        ", n = " + std::to_string(n) + ")");
  }
  // bit i lives at position i % 64 of word i / 64; one spare zero word so the
  // shifted reads below never run off the end
  std::vector<std::uint64_t> words(n / 64 + 2, 0);
  const auto bits = seq.bits();
  for (std::size_t i = 0; i < n; ++i) words[i / 64] |= std::uint64_t{bits[i]} << (i % 64);

  std::vector<double> values(max_lag + 1);
  values[0] = 1.0;
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    const std::size_t overlap = n - tau;
    const std::size_t q = tau / 64;
    const unsigned r = tau % 64;
    auto shifted = [&](std::size_t w) -> std::uint64_t {
      if (r == 0) return words[w + q];
      return (words[w + q] >> r) | (words[w + q + 1] << (64 - r));
    };
    std::uint64_t mismatches = 0;
    const std::size_t full = overlap / 64;
    for (std::size_t w = 0; w < full; ++w) mismatches += std::popcount(words[w] ^ shifted(w));
    if (const unsigned rem = overlap % 64; rem != 0) {
      const std::uint64_t mask = (std::uint64_t{1} << rem) - 1;
      mismatches += std::popcount((words[full] ^ shifted(full)) & mask);
    }
    // sum of x_i x_{i+tau} = agreements - disagreements
    values[tau] = (static_cast<double>(overlap) - 2.0 * static_cast<double>(mismatches)) /
                  static_cast<double>(overlap);
  }
  return AutocorrSeries(n, std::move(values));
}

// ---------------------------------------------------------------- proportions

Proportion pass_proportion(std::size_t passed, std::size_t total, double alpha) {
  if (total == 0) throw std::invalid_argument("pass proportion of zero results");
  Proportion p;
  p.passed = passed;
  p.total = total;
  p.proportion = static_cast<double>(passed) / static_cast<double>(total);
  const double centre = 1.0 - alpha;
  const double half = 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(total));
  p.lower = centre - half;
  p.upper = centre + half;
  p.within = p.proportion >= p.lower && p.proportion <= p.upper;
  return p;
}

Proportion pass_proportion(std::span<const TestResult> results) {
  if (results.empty()) throw std::invalid_argument("pass proportion of zero results");
  const auto passed = static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const TestResult& r) { return r.pass; }));
  return pass_proportion(passed, results.size(), results.front().alpha);
}

// ---------------------------------------------------------------- KS

double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;  // series converges badly; Q is 1 to double precision here
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_uniformity(std::vector<double> samples, double alpha) {
  if (samples.empty()) throw std::invalid_argument("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = std::clamp(samples[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - x, x - static_cast<double>(i) / n});
  }
  const double sqrt_n = std::sqrt(n);
  const double scale = sqrt_n + 0.12 + 0.11 / sqrt_n;

  // invert Q(lambda) = alpha by bisection
  double lo = 0.2, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_tail(mid) > alpha ? lo : hi) = mid;
  }

  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_tail(scale * d);
  r.critical = hi / scale;
  r.pass = d < r.critical;
  return r;
}

// ---------------------------------------------------------------- audit

RandReport audit(std::span<const std::uint8_t> bytes, const AuditOptions& opts) {
  const auto stream = BitSequence::from_bytes(bytes);
  if (opts.sequences == 0) throw std::invalid_argument("need at least one sequence");

  RandReport rep;
  rep.total_bits = stream.size();
  rep.sequence_bits = stream.size() / opts.sequences;
  rep.pass = true;
  const TestOptions test_opts{opts.alpha, false};

  auto run_nist = [&](const char* name, auto&& test) {
    std::vector<TestResult> batch;
    for (std::size_t s = 0; s < opts.sequences; ++s) {
      batch.push_back(test(stream.slice(s * rep.sequence_bits, rep.sequence_bits), test_opts));
    }
    const auto prop = pass_proportion(batch);
    const bool ok = opts.sequences == 1 ? batch.front().pass : prop.within;
    rep.pass = rep.pass && ok;
    rep.proportions.emplace(name, prop);
    rep.results.insert(rep.results.end(), batch.begin(), batch.end());
  };
  if (opts.frequency) run_nist("frequency", monobit_frequency);
  if (opts.runs) run_nist("runs", nist_runs);

  if (opts.balance) {
    rep.balance = golomb_balance(stream);
    rep.pass = rep.pass &&
               rep.balance->deviation <= 2.0 / std::sqrt(static_cast<double>(stream.size()));
  }
  if (opts.run_lengths) {
    rep.run_lengths = golomb_run_lengths(stream, test_opts);
    rep.pass = rep.pass && rep.run_lengths->pass;
  }
  if (opts.autocorr) {
    const auto lag = std::min(opts.max_lag, stream.size() - 1);
    if (lag > 0) {
      rep.autocorr = autocorrelation(stream, lag);
      rep.autocorr_fraction = rep.autocorr->fraction_within(opts.autocorr_sigmas);
      rep.pass = rep.pass && *rep.autocorr_fraction >= opts.autocorr_min_fraction;
    }
  }
  return rep;
}

}  // namespace remctl
