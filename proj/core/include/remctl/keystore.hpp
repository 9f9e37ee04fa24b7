#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "remctl/entropy.hpp"

namespace remctl {

/// Index of one key block in a store. Travels in clear as 4 big-endian bytes.
struct KeyAddress {
  std::uint32_t index = 0;

  static constexpr std::size_t kWireSize = 4;

  std::array<std::uint8_t, kWireSize> to_bytes() const noexcept {
    return {static_cast<std::uint8_t>(index >> 24), static_cast<std::uint8_t>(index >> 16),
            static_cast<std::uint8_t>(index >> 8), static_cast<std::uint8_t>(index)};
  }
  static KeyAddress from_bytes(std::span<const std::uint8_t, kWireSize> b) noexcept {
    return KeyAddress{(std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
                      (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]}};
  }

  friend auto operator<=>(const KeyAddress&, const KeyAddress&) = default;
};

inline constexpr std::size_t kFullBlockSize = 32;
inline constexpr std::size_t kSelectiveBlockSize = 23;

/// Secure key storage: precharged one-time key blocks plus a consumption
/// ledger. Consumed blocks are never handed out again and never unmarked.
/// next_expected() is always the smallest unconsumed index (block_count()
/// once the store is exhausted).
///
/// Single writer. A loaded store that is not modified may be read
/// concurrently.
class SksStore {
 public:
  /// Takes ownership of key material; size must be block_size * block_count.
  SksStore(std::size_t block_size, std::uint32_t block_count, Bytes key_material);

  std::size_t block_size() const noexcept { return block_size_; }
  std::uint32_t block_count() const noexcept { return block_count_; }
  std::span<const std::uint8_t> key_material() const noexcept { return key_material_; }

  bool is_consumed(KeyAddress addr) const;
  std::uint32_t consumed_count() const noexcept { return consumed_count_; }
  std::uint32_t remaining() const noexcept { return block_count_ - consumed_count_; }
  bool exhausted() const noexcept { return consumed_count_ == block_count_; }
  KeyAddress next_expected() const noexcept { return next_expected_; }

  /// Returns the block's bytes and marks it consumed.
  /// Throws OutOfRange past the end of the store, KeyReused for a consumed block.
  Bytes take_block(KeyAddress addr);

  /// Burns every unconsumed block below addr; returns how many were newly burned.
  std::uint32_t discard_through(KeyAddress addr);

  /// Bit-exact SKS1 image, see save().
  Bytes serialize() const;
  static SksStore deserialize(std::span<const std::uint8_t> image);

  /// File layout, integers big-endian:
  ///   "SKS1" | u16 version=1 | u16 block_size | u32 block_count |
  ///   consumed bitmap ceil(count/8) bytes, MSB-first | key material |
  ///   u32 CRC-32 of everything before it
  void save(const std::filesystem::path& path) const;
  static SksStore load(const std::filesystem::path& path);

  friend bool operator==(const SksStore&, const SksStore&) = default;

 private:
  void mark(std::uint32_t index);

  std::size_t block_size_;
  std::uint32_t block_count_;
  Bytes key_material_;
  std::vector<std::uint8_t> consumed_;  // one flag per block
  std::uint32_t consumed_count_ = 0;
  KeyAddress next_expected_{};
};

/// Draws block_size * block_count bytes once and loads them into two stores
/// with identical material: the controller copy and the controlee copy.
std::pair<SksStore, SksStore> charge(EntropySource& source, std::size_t block_size,
                                     std::uint32_t block_count);

/// IEEE CRC-32 as stored in the SKS trailer.
std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept;

}  // namespace remctl
