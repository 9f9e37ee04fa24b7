#include "remctl/channel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "remctl/error.hpp"

namespace remctl {

const char* to_string(TamperModel model) noexcept {
  return model == TamperModel::flip_one_random_byte ? "flip_one_random_byte" : "randomize_payload";
}

TamperModel parse_tamper_model(std::string_view text) {
  if (text == "flip_one_random_byte" || text == "flip") return TamperModel::flip_one_random_byte;
  if (text == "randomize_payload" || text == "randomize") return TamperModel::randomize_payload;
  throw std::invalid_argument("unknown tamper model '" + std::string(text) + "'");
}

const char* to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::delivered: return "delivered";
    case Outcome::dropped: return "dropped";
    case Outcome::tampered: return "tampered";
  }
  return "?";
}

Outcome parse_outcome(std::string_view text) {
  if (text == "delivered") return Outcome::delivered;
  if (text == "dropped") return Outcome::dropped;
  if (text == "tampered") return Outcome::tampered;
  throw std::invalid_argument("unknown outcome '" + std::string(text) + "'");
}

void ChannelConfig::validate() const {
  auto ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!ok(loss_prob)) throw std::invalid_argument("loss probability outside [0, 1]");
  if (!ok(tamper_prob)) throw std::invalid_argument("tamper probability outside [0, 1]");
}

Channel::Channel(ChannelConfig cfg) : cfg_(cfg), rng_(cfg.rng_seed) { cfg_.validate(); }

// 53 random mantissa bits, uniform on [0, 1)
double Channel::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::uint64_t Channel::below(std::uint64_t bound) {
  // rejection sampling keeps the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do v = rng_(); while (v >= limit);
  return v % bound;
}

Delivery Channel::transmit(std::span<const std::uint8_t> wire, std::uint64_t seq) {
  log_.push_back({seq, Bytes(wire.begin(), wire.end()), std::nullopt});
  auto& entry = log_.back();

  // Always draw both uniforms so the schedule does not depend on outcomes.
  const double u_loss = uniform();
  const double u_tamper = uniform();

  if (u_loss < cfg_.loss_prob) {
    entry.outcome = Outcome::dropped;
    return {Outcome::dropped, {}};
  }
  Bytes bytes(wire.begin(), wire.end());
  if (u_tamper < cfg_.tamper_prob) {
    const std::size_t payload = std::min(bytes.size(), kFrameSize);
    if (payload > 0) {
      if (cfg_.tamper_model == TamperModel::flip_one_random_byte) {
        const auto pos = below(payload);
        bytes[pos] ^= static_cast<std::uint8_t>(1 + below(255));
      } else {
        Bytes noise(payload);
        do {
          for (auto& b : noise) b = static_cast<std::uint8_t>(rng_());
        } while (std::equal(noise.begin(), noise.end(), bytes.begin()));
        std::copy(noise.begin(), noise.end(), bytes.begin());
      }
    }
    entry.outcome = Outcome::tampered;
    return {Outcome::tampered, std::move(bytes)};
  }
  entry.outcome = Outcome::delivered;
  return {Outcome::delivered, std::move(bytes)};
}

std::filesystem::path sidecar_path(const std::filesystem::path& corpus) {
  auto p = corpus;
  p += ".idx";
  return p;
}

void export_intercepts(const InterceptLog& log, const std::filesystem::path& path) {
  for (const auto& e : log) {
    if (e.frame.size() != kWireFrameSize) {
      throw BadLength("intercept " + std::to_string(e.seq) + " is " +
                      std::to_string(e.frame.size()) + " bytes, corpus frames are 36");
    }
  }
  std::ofstream corpus(path, std::ios::binary | std::ios::trunc);
  if (!corpus) throw IoError("cannot open '" + path.string() + "' for writing");
  std::ofstream index(sidecar_path(path), std::ios::trunc);
  if (!index) throw IoError("cannot open '" + sidecar_path(path).string() + "' for writing");

  std::uint64_t offset = 0;
  for (const auto& e : log) {
    corpus.write(reinterpret_cast<const char*>(e.frame.data()),
                 static_cast<std::streamsize>(e.frame.size()));
    index << e.seq << ", " << offset << ", " << (e.outcome ? to_string(*e.outcome) : "unknown")
          << '\n';
    offset += e.frame.size();
  }
  corpus.flush();
  index.flush();
  if (!corpus || !index) throw IoError("write to '" + path.string() + "' failed");
}

InterceptLog import_intercepts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Bytes raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() % kWireFrameSize != 0) {
    throw BadLength("corpus length " + std::to_string(raw.size()) +
                    " is not a multiple of 36");
  }
  InterceptLog log;
  for (std::size_t off = 0; off < raw.size(); off += kWireFrameSize) {
    log.push_back({off / kWireFrameSize,
                   Bytes(raw.begin() + static_cast<std::ptrdiff_t>(off),
                         raw.begin() + static_cast<std::ptrdiff_t>(off + kWireFrameSize)),
                   std::nullopt});
  }

  std::ifstream index(sidecar_path(path));
  if (!index) return log;
  std::string line;
  std::size_t row = 0;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    if (row >= log.size()) throw IoError("sidecar has more rows than the corpus has frames");
    std::istringstream fields(line);
    std::string seq, offset, outcome;
    std::getline(fields, seq, ',');
    std::getline(fields, offset, ',');
    std::getline(fields, outcome);
    outcome.erase(0, outcome.find_first_not_of(' '));
    try {
      log[row].seq = std::stoull(seq);
      if (std::stoull(offset) != row * kWireFrameSize) throw IoError("sidecar offset mismatch");
    } catch (const std::logic_error&) {
      throw IoError("malformed sidecar line '" + line + "'");
    }
    if (outcome != "unknown") log[row].outcome = parse_outcome(outcome);
    ++row;
  }
  if (row != log.size()) throw IoError("sidecar row count does not match corpus");
  return log;
}

Bytes extract_ciphertext(std::span<const std::uint8_t> corpus, CipherMode mode) {
  if (corpus.size() % kWireFrameSize != 0) {
    throw BadLength("corpus length " + std::to_string(corpus.size()) +
                    " is not a multiple of 36");
  }
  const auto range = ciphered_range(mode);
  Bytes out;
  out.reserve(corpus.size() / kWireFrameSize * range.length);
  for (std::size_t off = 0; off < corpus.size(); off += kWireFrameSize) {
    auto region = corpus.subspan(off + range.offset, range.length);
    out.insert(out.end(), region.begin(), region.end());
  }
  return out;
}

Bytes extract_ciphertext(const InterceptLog& log, CipherMode mode) {
  Bytes joined;
  joined.reserve(log.size() * kWireFrameSize);
  for (const auto& e : log) {
    if (e.frame.size() != kWireFrameSize) continue;
    joined.insert(joined.end(), e.frame.begin(), e.frame.end());
  }
  return extract_ciphertext(joined, mode);
}

}  // namespace remctl
