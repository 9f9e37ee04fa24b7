#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remctl {

/// Bits expanded from bytes most-significant-bit first. Never empty.
class BitSequence {
 public:
  static BitSequence from_bytes(std::span<const std::uint8_t> bytes);
  /// Each element must be 0 or 1.
  static BitSequence from_bits(std::vector<std::uint8_t> bits);
  /// "1001..." style literal; other characters are rejected.
  static BitSequence from_string(std::string_view text);

  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t ones() const noexcept { return ones_; }

  /// Sub-sequence [offset, offset + length).
  BitSequence slice(std::size_t offset, std::size_t length) const;

 private:
  explicit BitSequence(std::vector<std::uint8_t> bits);

  std::vector<std::uint8_t> bits_;
  std::size_t ones_ = 0;
};

inline constexpr double kDefaultAlpha = 0.01;
inline constexpr std::size_t kMinTestBits = 100;

struct TestOptions {
  double alpha = kDefaultAlpha;
  /// Skips the n >= 100 guard. Only for checking formulas on tiny inputs.
  bool permissive = false;
};

struct TestResult {
  std::string test_name;
  std::size_t n = 0;
  double statistic = 0.0;
  double p_value = 0.0;
  double alpha = kDefaultAlpha;
  bool pass = false;  // p_value >= alpha, and the test was applicable
  bool applicable = true;
  std::string note;
};

/// NIST frequency (monobit): s = |#1 - #0| / sqrt(n), P = erfc(s / sqrt 2).
TestResult monobit_frequency(const BitSequence& seq, TestOptions opts = {});

/// NIST runs test. statistic is V, the number of maximal same-bit blocks.
/// When the ones-proportion fails the frequency prerequisite
/// (|pi - 1/2| >= 2/sqrt(n)) the result is marked not applicable, P = 0.
TestResult nist_runs(const BitSequence& seq, TestOptions opts = {});

struct Balance {
  std::size_t n = 0;
  std::size_t ones = 0;
  double proportion = 0.0;  // ones / n
  double deviation = 0.0;   // |proportion - 1/2|
};

Balance golomb_balance(const BitSequence& seq);

struct RunLengthCheck {
  std::size_t length;
  double observed;   // fraction of all runs with this length
  double expected;   // 2^-length
  double tolerance;  // 3 sigma of the binomial fraction
  bool ok;
};

struct RunLengthReport {
  std::map<std::size_t, std::size_t> histogram;  // run length -> count
  std::size_t total_runs = 0;
  std::vector<RunLengthCheck> checks;  // lengths 1 .. floor(log2 R) - 2
  bool pass = false;
};

/// Golomb's run postulate: half the runs have length 1, a quarter length 2...
RunLengthReport golomb_run_lengths(const BitSequence& seq, TestOptions opts = {});

/// C(tau) for tau in [-T, T], bits mapped to +/-1 and each lag normalised by
/// its own overlap length n - |tau|.
class AutocorrSeries {
 public:
  AutocorrSeries(std::size_t n, std::vector<double> non_negative);

  std::size_t n() const noexcept { return n_; }
  std::size_t max_lag() const noexcept { return values_.size() - 1; }
  double at(std::ptrdiff_t tau) const;

  /// Fraction of lags 1..T with |C(tau)| <= sigmas / sqrt(n - tau).
  double fraction_within(double sigmas = 4.0) const;

 private:
  std::size_t n_;
  std::vector<double> values_;  // index = |tau|
};

/// Throws LagOutOfRange unless 0 < max_lag < n. Bit-packed: O(n T / 64).
AutocorrSeries autocorrelation(const BitSequence& seq, std::size_t max_lag);

struct Proportion {
  std::size_t passed = 0;
  std::size_t total = 0;
  double proportion = 0.0;
  double lower = 0.0;  // (1 - a) - 3 sqrt(a (1 - a) / m)
  double upper = 0.0;  // (1 - a) + 3 sqrt(a (1 - a) / m)
  bool within = false;
};

/// Throws std::invalid_argument on an empty list. Uses the first result's alpha.
Proportion pass_proportion(std::span<const TestResult> results);
Proportion pass_proportion(std::size_t passed, std::size_t total, double alpha);

struct KsResult {
  double statistic = 0.0;  // D_n
  double p_value = 0.0;    // asymptotic Kolmogorov tail with small-n correction
  double critical = 0.0;   // D_n threshold at the requested alpha
  bool pass = false;       // statistic < critical
};

/// One-sample Kolmogorov-Smirnov test of samples against U(0, 1).
KsResult ks_uniformity(std::vector<double> samples, double alpha);

/// Tail probability Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda);

struct AuditOptions {
  bool frequency = true;
  bool runs = true;
  bool balance = true;
  bool run_lengths = true;
  bool autocorr = true;
  double alpha = kDefaultAlpha;
  /// The bitstream is cut into this many equal sequences for the NIST tests.
  std::size_t sequences = 1;
  std::size_t max_lag = 1000;
  double autocorr_sigmas = 4.0;
  double autocorr_min_fraction = 0.99;
};

/// Aggregated outcome of a randomness audit over one bitstream.
struct RandReport {
  std::size_t total_bits = 0;
  std::size_t sequence_bits = 0;
  std::vector<TestResult> results;  // per sequence, per NIST test
  std::map<std::string, Proportion> proportions;
  std::optional<Balance> balance;
  std::optional<RunLengthReport> run_lengths;
  std::optional<AutocorrSeries> autocorr;
  std::optional<double> autocorr_fraction;
  bool pass = false;
};

/// Runs the selected tests. With sequences == 1 a NIST test passes when its
/// P-value does; with more, when its pass proportion is inside the interval.
/// Balance passes when |p - 1/2| <= 2 / sqrt(n).
RandReport audit(std::span<const std::uint8_t> bytes, const AuditOptions& opts);

}  // namespace remctl
