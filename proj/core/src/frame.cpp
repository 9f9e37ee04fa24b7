#include "remctl/frame.hpp"

#include <algorithm>
#include <string>

#include "remctl/error.hpp"

namespace remctl {
namespace {

void check_key(std::span<const std::uint8_t> key, CipherMode mode) {
  if (key.size() != key_length(mode)) {
    throw KeyLengthMismatch(std::string(to_string(mode)) + " mode needs a " +
                            std::to_string(key_length(mode)) + "-byte key, got " +
                            std::to_string(key.size()));
  }
}

void xor_range(FrameBytes& bytes, std::span<const std::uint8_t> key, CipherMode mode) {
  const auto range = ciphered_range(mode);
  for (std::size_t i = 0; i < range.length; ++i) bytes[range.offset + i] ^= key[i];
}

}  // namespace

CipherMode mode_for_block_size(std::size_t block_size) {
  if (block_size == kFullBlockSize) return CipherMode::full;
  if (block_size == kSelectiveBlockSize) return CipherMode::selective;
  throw InvalidBlockSize("no cipher mode uses " + std::to_string(block_size) + "-byte blocks");
}

const char* to_string(CipherMode mode) noexcept {
  return mode == CipherMode::full ? "full" : "selective";
}

bool validate_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kFrameSize) {
    throw BadLength("command frame must be 32 bytes, got " + std::to_string(bytes.size()));
  }
  return std::equal(kFrameHeader.begin(), kFrameHeader.end(), bytes.begin());
}

std::optional<CommandFrame> CommandFrame::from_bytes(
    std::span<const std::uint8_t, kFrameSize> bytes) {
  if (!validate_frame(bytes)) return std::nullopt;
  FrameBytes copy;
  std::copy(bytes.begin(), bytes.end(), copy.begin());
  return CommandFrame(copy);
}

std::uint16_t CommandFrame::channel(std::size_t i) const {
  if (i >= kChannelCount) throw std::out_of_range("channel index " + std::to_string(i));
  const auto at = kChannelOffset + 2 * i;
  return static_cast<std::uint16_t>(bytes_[at] | (bytes_[at + 1] << 8));
}

std::array<std::uint16_t, kChannelCount> CommandFrame::channels() const {
  std::array<std::uint16_t, kChannelCount> out{};
  for (std::size_t i = 0; i < kChannelCount; ++i) out[i] = channel(i);
  return out;
}

CommandFrame encode_command(std::span<const std::uint16_t, kChannelCount> channels,
                            std::span<const std::uint8_t, kAuxSize> aux,
                            std::span<const std::uint8_t, kTrailerSize> trailer) {
  FrameBytes bytes{};
  std::copy(kFrameHeader.begin(), kFrameHeader.end(), bytes.begin());
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    bytes[kChannelOffset + 2 * i] = static_cast<std::uint8_t>(channels[i] & 0xFF);
    bytes[kChannelOffset + 2 * i + 1] = static_cast<std::uint8_t>(channels[i] >> 8);
  }
  std::copy(aux.begin(), aux.end(), bytes.begin() + kAuxOffset);
  std::copy(trailer.begin(), trailer.end(), bytes.begin() + kTrailerOffset);
  return CommandFrame(bytes);
}

WireBytes WireFrame::serialize() const noexcept {
  WireBytes out{};
  std::copy(payload.begin(), payload.end(), out.begin());
  const auto addr = address.to_bytes();
  std::copy(addr.begin(), addr.end(), out.begin() + kFrameSize);
  return out;
}

WireFrame parse_wire(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kWireFrameSize) {
    throw BadLength("wire frame must be 36 bytes, got " + std::to_string(bytes.size()));
  }
  WireFrame wire;
  std::copy(bytes.begin(), bytes.begin() + kFrameSize, wire.payload.begin());
  wire.address = KeyAddress::from_bytes(bytes.subspan<kFrameSize, KeyAddress::kWireSize>());
  return wire;
}

WireFrame otp_encrypt(const CommandFrame& frame, std::span<const std::uint8_t> key,
                      KeyAddress address, CipherMode mode) {
  check_key(key, mode);
  WireFrame wire{address, frame.bytes()};
  xor_range(wire.payload, key, mode);
  return wire;
}

FrameBytes otp_decrypt(const WireFrame& wire, std::span<const std::uint8_t> key, CipherMode mode) {
  check_key(key, mode);
  FrameBytes plain = wire.payload;
  xor_range(plain, key, mode);
  return plain;
}

}  // namespace remctl
