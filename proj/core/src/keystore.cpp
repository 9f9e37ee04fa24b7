#include "remctl/keystore.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

#include "remctl/error.hpp"

namespace remctl {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'S', 'K', 'S', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 2 + 2 + 4;
constexpr std::size_t kCrcSize = 4;

void put_u16(Bytes& out, std::size_t at, std::uint16_t v) {
  out[at] = static_cast<std::uint8_t>(v >> 8);
  out[at + 1] = static_cast<std::uint8_t>(v);
}

void put_u32(Bytes& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void check_block_size(std::size_t block_size) {
  if (block_size != kFullBlockSize && block_size != kSelectiveBlockSize) {
    throw InvalidBlockSize("block size " + std::to_string(block_size) + " is neither " +
                           std::to_string(kFullBlockSize) + " nor " +
                           std::to_string(kSelectiveBlockSize));
  }
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces
  constexpr std::size_t kChunk = 1u << 30;
  while (!data.empty()) {
    auto n = std::min(data.size(), kChunk);
    crc = ::crc32(crc, data.data(), static_cast<uInt>(n));
    data = data.subspan(n);
  }
  return static_cast<std::uint32_t>(crc);
}

SksStore::SksStore(std::size_t block_size, std::uint32_t block_count, Bytes key_material)
    : block_size_(block_size),
      block_count_(block_count),
      key_material_(std::move(key_material)),
      consumed_(block_count, 0) {
  check_block_size(block_size);
  if (block_count == 0) throw InvalidBlockSize("store needs at least one block");
  if (key_material_.size() != block_size * std::size_t{block_count}) {
    throw InvalidBlockSize("key material is " + std::to_string(key_material_.size()) +
                           " bytes, expected " +
                           std::to_string(block_size * std::size_t{block_count}));
  }
}

bool SksStore::is_consumed(KeyAddress addr) const {
  if (addr.index >= block_count_) throw OutOfRange("address " + std::to_string(addr.index) +
                                                   " past end of store");
  return consumed_[addr.index] != 0;
}

void SksStore::mark(std::uint32_t index) {
  consumed_[index] = 1;
  ++consumed_count_;
  if (index == next_expected_.index) {
    auto i = index;
    while (i < block_count_ && consumed_[i]) ++i;
    next_expected_.index = i;
  }
}

Bytes SksStore::take_block(KeyAddress addr) {
  if (addr.index >= block_count_) {
    throw OutOfRange("address " + std::to_string(addr.index) + " past end of store (" +
                     std::to_string(block_count_) + " blocks)");
  }
  if (consumed_[addr.index]) {
    throw KeyReused("key block " + std::to_string(addr.index) + " already consumed");
  }
  auto first = key_material_.begin() + static_cast<std::ptrdiff_t>(addr.index * block_size_);
  Bytes block(first, first + static_cast<std::ptrdiff_t>(block_size_));
  mark(addr.index);
  return block;
}

std::uint32_t SksStore::discard_through(KeyAddress addr) {
  auto limit = std::min(addr.index, block_count_);
  std::uint32_t burned = 0;
  for (auto i = next_expected_.index; i < limit; ++i) {
    if (!consumed_[i]) {
      mark(i);
      ++burned;
    }
  }
  return burned;
}

Bytes SksStore::serialize() const {
  const std::size_t bitmap_size = (std::size_t{block_count_} + 7) / 8;
  const std::size_t body_size = kHeaderSize + bitmap_size + key_material_.size();
  Bytes out(body_size + kCrcSize, 0);
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  put_u16(out, 4, kVersion);
  put_u16(out, 6, static_cast<std::uint16_t>(block_size_));
  put_u32(out, 8, block_count_);
  for (std::uint32_t i = 0; i < block_count_; ++i) {
    if (consumed_[i]) out[kHeaderSize + i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  std::copy(key_material_.begin(), key_material_.end(),
            out.begin() + static_cast<std::ptrdiff_t>(kHeaderSize + bitmap_size));
  put_u32(out, body_size, crc32(std::span(out).first(body_size)));
  return out;
}

SksStore SksStore::deserialize(std::span<const std::uint8_t> image) {
  if (image.size() < kMagic.size()) throw TruncatedFile("SKS image shorter than its magic");
  if (!std::equal(kMagic.begin(), kMagic.end(), image.begin())) {
    throw BadMagic("not an SKS1 image");
  }
  if (image.size() < kHeaderSize) throw TruncatedFile("SKS header truncated");
  const auto version = get_u16(image, 4);
  if (version != kVersion) throw BadVersion("unsupported SKS version " + std::to_string(version));
  const std::size_t block_size = get_u16(image, 6);
  const std::uint32_t block_count = get_u32(image, 8);

  const std::size_t bitmap_size = (std::size_t{block_count} + 7) / 8;
  const std::size_t material_size = block_size * std::size_t{block_count};
  const std::size_t expected = kHeaderSize + bitmap_size + material_size + kCrcSize;
  if (image.size() < expected) {
    throw TruncatedFile("SKS image is " + std::to_string(image.size()) + " bytes, header implies " +
                        std::to_string(expected));
  }
  if (image.size() > expected) {
    throw MalformedStore(std::to_string(image.size() - expected) + " trailing bytes after CRC");
  }
  const auto body = image.first(expected - kCrcSize);
  if (crc32(body) != get_u32(image, expected - kCrcSize)) {
    throw ChecksumMismatch("SKS CRC-32 does not match contents");
  }

  try {
    check_block_size(block_size);
  } catch (const InvalidBlockSize& e) {
    throw MalformedStore(e.what());
  }
  if (block_count == 0) throw MalformedStore("SKS image declares zero blocks");

  const auto bitmap = image.subspan(kHeaderSize, bitmap_size);
  const auto material = image.subspan(kHeaderSize + bitmap_size, material_size);
  SksStore store(block_size, block_count, Bytes(material.begin(), material.end()));
  for (std::uint32_t i = 0; i < block_count; ++i) {
    if (bitmap[i / 8] & (0x80u >> (i % 8))) {
      store.consumed_[i] = 1;
      ++store.consumed_count_;
    }
  }
  if (block_count % 8 != 0) {
    const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xFFu >> (block_count % 8));
    if (bitmap.back() & pad_mask) throw MalformedStore("nonzero padding bits in consumed bitmap");
  }
  std::uint32_t first_free = 0;
  while (first_free < block_count && store.consumed_[first_free]) ++first_free;
  store.next_expected_.index = first_free;
  return store;
}

void SksStore::save(const std::filesystem::path& path) const {
  const auto image = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

SksStore SksStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Bytes image((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read from '" + path.string() + "' failed");
  return deserialize(image);
}

std::pair<SksStore, SksStore> charge(EntropySource& source, std::size_t block_size,
                                     std::uint32_t block_count) {
  check_block_size(block_size);
  if (block_count == 0) throw InvalidBlockSize("store needs at least one block");
  Bytes material = source.fill(block_size * std::size_t{block_count});
  SksStore controller(block_size, block_count, material);
  SksStore controlee(block_size, block_count, std::move(material));
  return {std::move(controller), std::move(controlee)};
}

}  // namespace remctl
