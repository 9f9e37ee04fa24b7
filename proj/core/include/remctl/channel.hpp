#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "remctl/entropy.hpp"
#include "remctl/frame.hpp"

namespace remctl {

enum class TamperModel {
  flip_one_random_byte,  // XOR one payload byte with a random nonzero value
  randomize_payload,     // replace all 32 payload bytes; address untouched
};

const char* to_string(TamperModel model) noexcept;
TamperModel parse_tamper_model(std::string_view text);

struct ChannelConfig {
  double loss_prob = 0.0;
  double tamper_prob = 0.0;
  TamperModel tamper_model = TamperModel::flip_one_random_byte;
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument if a probability is outside [0, 1].
  void validate() const;
};

enum class Outcome { delivered, dropped, tampered };

const char* to_string(Outcome outcome) noexcept;
Outcome parse_outcome(std::string_view text);

struct Delivery {
  Outcome outcome;
  Bytes bytes;  // what reaches the receiver; empty when dropped
};

struct Intercept {
  std::uint64_t seq;
  Bytes frame;                     // exactly what was put on air
  std::optional<Outcome> outcome;  // unset until the channel decides
};

/// Everything an eavesdropper saw, whether or not it reached the receiver.
using InterceptLog = std::vector<Intercept>;

/// Simulated radio link. Each frame is tapped before its fate is drawn. The
/// event schedule is a pure function of the config and the frame sequence.
class Channel {
 public:
  explicit Channel(ChannelConfig cfg);

  Delivery transmit(std::span<const std::uint8_t> wire, std::uint64_t seq);

  const ChannelConfig& config() const noexcept { return cfg_; }
  const InterceptLog& intercepts() const noexcept { return log_; }
  InterceptLog take_intercepts() noexcept { return std::move(log_); }

 private:
  double uniform();
  std::uint64_t below(std::uint64_t bound);

  ChannelConfig cfg_;
  std::mt19937_64 rng_;
  InterceptLog log_;
};

/// Writes the frames back to back to `path` and a sidecar `path.idx` with one
/// `seq, offset, outcome` line per frame. Frames must be 36 bytes.
void export_intercepts(const InterceptLog& log, const std::filesystem::path& path);

/// Reads a corpus written by export_intercepts. The sidecar is optional;
/// without it frames are numbered 0.. and carry no outcome.
InterceptLog import_intercepts(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& corpus);

/// Concatenates the ciphered region of each 36-byte frame in `corpus`.
/// Clear header/trailer bytes and addresses are skipped.
Bytes extract_ciphertext(std::span<const std::uint8_t> corpus, CipherMode mode);
Bytes extract_ciphertext(const InterceptLog& log, CipherMode mode);

}  // namespace remctl
