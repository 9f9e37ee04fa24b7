#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace remctl {

using Bytes = std::vector<std::uint8_t>;

/// Random byte supply standing in for the quantum random number generator.
///
/// Three kinds exist:
///  - system: std::random_device, non-reproducible.
///  - seeded: mt19937_64 expanded little-endian, eight bytes per draw. The
///    output is a pure function of (seed, bytes drawn so far), so two fills of
///    16 bytes equal one fill of 32 bytes from a fresh source.
///  - file: replays a raw dump (e.g. a captured QRNG file). Never reads past
///    end-of-file; a short read is an error and consumes nothing.
///
/// A source is single-consumer. Distinct sources share no state.
class EntropySource {
 public:
  enum class Kind { system, seeded, file };

  static EntropySource system();
  static EntropySource seeded(std::uint64_t seed);
  static EntropySource file(const std::filesystem::path& path);

  /// Parses "system", "seeded:<u64>" or "file:<path>".
  static EntropySource from_spec(std::string_view spec);

  EntropySource(EntropySource&&) noexcept;
  EntropySource& operator=(EntropySource&&) noexcept;
  ~EntropySource();

  Kind kind() const noexcept { return kind_; }
  std::uint64_t bits_emitted() const noexcept { return bytes_emitted_ * 8; }
  std::uint64_t bytes_emitted() const noexcept { return bytes_emitted_; }

  /// Byte offset of the next unread byte; only meaningful for file sources.
  std::uint64_t cursor() const noexcept { return bytes_emitted_; }

  /// Bytes still available from a file source; unbounded kinds report max().
  std::uint64_t remaining() const noexcept;

  Bytes fill(std::size_t n);
  void fill(std::span<std::uint8_t> out);

  /// Writes the next n bytes to path. On I/O failure throws IoError; the
  /// bytes drawn are lost either way, as a one-time key supply would be.
  void dump(std::size_t n, const std::filesystem::path& path);

 private:
  explicit EntropySource(Kind kind);

  Kind kind_;
  std::uint64_t bytes_emitted_ = 0;

  // seeded
  std::mt19937_64 prng_{};
  std::uint64_t pending_ = 0;
  unsigned pending_bytes_ = 0;

  // system
  std::unique_ptr<std::random_device> device_;

  // file
  std::ifstream in_;
  std::uint64_t file_size_ = 0;
  std::string path_;
};

}  // namespace remctl
