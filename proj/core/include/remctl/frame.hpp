#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "remctl/keystore.hpp"

namespace remctl {

inline constexpr std::size_t kFrameSize = 32;
inline constexpr std::size_t kWireFrameSize = kFrameSize + KeyAddress::kWireSize;
inline constexpr std::size_t kChannelCount = 7;
inline constexpr std::size_t kAuxSize = 9;
inline constexpr std::size_t kTrailerSize = 4;

/// Constant prefix shared by every remote-control command.
inline constexpr std::array<std::uint8_t, 5> kFrameHeader{36, 77, 60, 16, 105};

// Byte layout of a command: header | 7 x u16le channels | aux | trailer.
inline constexpr std::size_t kChannelOffset = 5;
inline constexpr std::size_t kAuxOffset = 19;
inline constexpr std::size_t kTrailerOffset = 28;

using FrameBytes = std::array<std::uint8_t, kFrameSize>;
using WireBytes = std::array<std::uint8_t, kWireFrameSize>;

/// full ciphers all 32 bytes. selective ciphers only bytes 5..27 (channels and
/// aux), leaving the public header and the trailer in clear.
enum class CipherMode { full, selective };

struct ByteRange {
  std::size_t offset;
  std::size_t length;
};

constexpr ByteRange ciphered_range(CipherMode mode) noexcept {
  return mode == CipherMode::full ? ByteRange{0, kFrameSize}
                                  : ByteRange{kChannelOffset, kTrailerOffset - kChannelOffset};
}
constexpr std::size_t key_length(CipherMode mode) noexcept { return ciphered_range(mode).length; }

/// Maps an SKS block size back to its mode; throws InvalidBlockSize otherwise.
CipherMode mode_for_block_size(std::size_t block_size);
const char* to_string(CipherMode mode) noexcept;

/// True iff bytes 0..4 carry the fixed header. Throws BadLength unless the
/// input is exactly 32 bytes.
bool validate_frame(std::span<const std::uint8_t> bytes);

/// A 32-byte plaintext command whose header is known to be valid.
class CommandFrame {
 public:
  /// Returns nullopt when the header does not match.
  static std::optional<CommandFrame> from_bytes(std::span<const std::uint8_t, kFrameSize> bytes);

  const FrameBytes& bytes() const noexcept { return bytes_; }

  /// Channel i (0..6) decoded little-endian from bytes 5+2i, 6+2i.
  std::uint16_t channel(std::size_t i) const;
  std::array<std::uint16_t, kChannelCount> channels() const;
  std::span<const std::uint8_t, kAuxSize> aux() const noexcept {
    return std::span<const std::uint8_t, kFrameSize>(bytes_).subspan<kAuxOffset, kAuxSize>();
  }
  std::span<const std::uint8_t, kTrailerSize> trailer() const noexcept {
    return std::span<const std::uint8_t, kFrameSize>(bytes_).subspan<kTrailerOffset, kTrailerSize>();
  }

  friend bool operator==(const CommandFrame&, const CommandFrame&) = default;

 private:
  explicit CommandFrame(const FrameBytes& bytes) : bytes_(bytes) {}
  friend CommandFrame encode_command(std::span<const std::uint16_t, kChannelCount>,
                                     std::span<const std::uint8_t, kAuxSize>,
                                     std::span<const std::uint8_t, kTrailerSize>);

  FrameBytes bytes_;
};

CommandFrame encode_command(std::span<const std::uint16_t, kChannelCount> channels,
                            std::span<const std::uint8_t, kAuxSize> aux,
                            std::span<const std::uint8_t, kTrailerSize> trailer);

/// On-air unit: 32 payload bytes followed by the key address in clear.
struct WireFrame {
  KeyAddress address;
  FrameBytes payload{};

  WireBytes serialize() const noexcept;
  friend bool operator==(const WireFrame&, const WireFrame&) = default;
};

/// Splits 36 bytes into payload and big-endian address. Throws BadLength.
WireFrame parse_wire(std::span<const std::uint8_t> bytes);

/// XORs the mode's ciphered range with key; everything else is copied.
/// Throws KeyLengthMismatch when key.size() != key_length(mode).
WireFrame otp_encrypt(const CommandFrame& frame, std::span<const std::uint8_t> key,
                      KeyAddress address, CipherMode mode);

/// Inverse of otp_encrypt. The result is unvalidated.
FrameBytes otp_decrypt(const WireFrame& wire, std::span<const std::uint8_t> key, CipherMode mode);

}  // namespace remctl
