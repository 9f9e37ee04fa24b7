#include "remctl/entropy.hpp"

#include <charconv>
#include <limits>

#include "remctl/error.hpp"

namespace remctl {

EntropySource::EntropySource(Kind kind) : kind_(kind) {}
EntropySource::EntropySource(EntropySource&&) noexcept = default;
EntropySource& EntropySource::operator=(EntropySource&&) noexcept = default;
EntropySource::~EntropySource() = default;

EntropySource EntropySource::system() {
  EntropySource src(Kind::system);
  src.device_ = std::make_unique<std::random_device>();
  return src;
}

EntropySource EntropySource::seeded(std::uint64_t seed) {
  EntropySource src(Kind::seeded);
  src.prng_.seed(seed);
  return src;
}

EntropySource EntropySource::file(const std::filesystem::path& path) {
  EntropySource src(Kind::file);
  src.path_ = path.string();
  std::error_code ec;
  auto size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat entropy file '" + src.path_ + "': " + ec.message());
  src.in_.open(path, std::ios::binary);
  if (!src.in_) throw IoError("cannot open entropy file '" + src.path_ + "'");
  src.file_size_ = size;
  return src;
}

EntropySource EntropySource::from_spec(std::string_view spec) {
  if (spec == "system") return system();
  if (spec.starts_with("seeded:")) {
    auto digits = spec.substr(7);
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
      throw std::invalid_argument("bad seed in source '" + std::string(spec) + "'");
    }
    return seeded(seed);
  }
  if (spec.starts_with("file:") && spec.size() > 5) return file(std::string(spec.substr(5)));
  throw std::invalid_argument("unknown entropy source '" + std::string(spec) +
                              "' (expected system, seeded:<u64> or file:<path>)");
}

std::uint64_t EntropySource::remaining() const noexcept {
  if (kind_ == Kind::file) return file_size_ - bytes_emitted_;
  return std::numeric_limits<std::uint64_t>::max();
}

Bytes EntropySource::fill(std::size_t n) {
  Bytes out(n);
  fill(std::span<std::uint8_t>(out));
  return out;
}

void EntropySource::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  switch (kind_) {
    case Kind::seeded:
      for (auto& b : out) {
        if (pending_bytes_ == 0) {
          pending_ = prng_();
          pending_bytes_ = 8;
        }
        b = static_cast<std::uint8_t>(pending_ & 0xFF);
        pending_ >>= 8;
        --pending_bytes_;
      }
      break;
    case Kind::system: {
      // random_device yields 32-bit words
      std::size_t i = 0;
      while (i < out.size()) {
        std::uint32_t word = (*device_)();
        for (int k = 0; k < 4 && i < out.size(); ++k, ++i) {
          out[i] = static_cast<std::uint8_t>(word >> (8 * k));
        }
      }
      break;
    }
    case Kind::file:
      if (out.size() > remaining()) {
        throw ExhaustedSource("entropy file '" + path_ + "' has " + std::to_string(remaining()) +
                              " bytes left, " + std::to_string(out.size()) + " requested");
      }
      in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
      if (static_cast<std::size_t>(in_.gcount()) != out.size()) {
        throw IoError("short read from entropy file '" + path_ + "'");
      }
      break;
  }
  bytes_emitted_ += out.size();
}

void EntropySource::dump(std::size_t n, const std::filesystem::path& path) {
  Bytes data = fill(n);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace remctl
