#include "remctl/protocol.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "remctl/error.hpp"

namespace remctl {

// ---------------------------------------------------------------- Controller

Controller::Controller(SksStore store)
    : store_(std::move(store)), mode_(mode_for_block_size(store_.block_size())) {}

WireFrame Controller::send(const CommandFrame& cmd) {
  if (store_.exhausted()) {
    throw KeyExhausted("controller key store exhausted after " +
                       std::to_string(store_.block_count()) + " blocks");
  }
  const auto addr = store_.next_expected();
  const auto key = store_.take_block(addr);
  ++frames_sent_;
  return otp_encrypt(cmd, key, addr, mode_);
}

// ---------------------------------------------------------------- Controlee

const char* to_string(DiscardReason reason) noexcept {
  switch (reason) {
    case DiscardReason::bad_length: return "BadLength";
    case DiscardReason::replay_or_stale: return "ReplayOrStale";
    case DiscardReason::key_exhausted: return "KeyExhausted";
    case DiscardReason::validation_failed: return "ValidationFailed";
    case DiscardReason::jump_too_far: return "JumpTooFar";
  }
  return "?";
}

DiscardReason parse_discard_reason(std::string_view text) {
  for (auto r : {DiscardReason::bad_length, DiscardReason::replay_or_stale,
                 DiscardReason::key_exhausted, DiscardReason::validation_failed,
                 DiscardReason::jump_too_far}) {
    if (text == to_string(r)) return r;
  }
  throw std::invalid_argument("unknown discard reason '" + std::string(text) + "'");
}

Controlee::Controlee(SksStore store, ControleeOptions options)
    : store_(std::move(store)),
      mode_(mode_for_block_size(store_.block_size())),
      options_(std::move(options)) {}

RxOutcome Controlee::discard(std::optional<KeyAddress> addr, DiscardReason reason) {
  ++discarded_;
  return RxOutcome{addr, std::nullopt, reason};
}

bool Controlee::valid(const FrameBytes& plain) const {
  if (!validate_frame(plain)) return false;
  if (options_.validation == Validation::registry) return options_.registry.contains(plain);
  if (mode_ == CipherMode::selective) {
    return options_.registry.has_trailer(std::span(plain).subspan(kTrailerOffset, kTrailerSize));
  }
  return true;
}

RxOutcome Controlee::receive(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kWireFrameSize) return discard(std::nullopt, DiscardReason::bad_length);
  const auto wire = parse_wire(bytes);
  const auto addr = wire.address;
  const auto next = store_.next_expected();

  if (addr < next) return discard(addr, DiscardReason::replay_or_stale);
  if (addr.index >= store_.block_count()) return discard(addr, DiscardReason::key_exhausted);
  if (options_.max_jump && addr.index - next.index > *options_.max_jump) {
    return discard(addr, DiscardReason::jump_too_far);
  }

  store_.discard_through(addr);
  Bytes key;
  try {
    key = store_.take_block(addr);
  } catch (const KeyReused&) {
    return discard(addr, DiscardReason::replay_or_stale);
  }
  const auto plain = otp_decrypt(wire, key, mode_);
  if (!valid(plain)) return discard(addr, DiscardReason::validation_failed);

  ++accepted_;
  last_accepted_ = addr;
  return RxOutcome{addr, CommandFrame::from_bytes(plain), {}};
}

// ---------------------------------------------------------------- hex

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0xF];
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2) throw std::invalid_argument("odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument(std::string("bad hex digit '") + c + "'");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

// ---------------------------------------------------------------- session log

namespace {

const char* to_string(Direction d) {
  switch (d) {
    case Direction::tx: return "tx";
    case Direction::air: return "air";
    case Direction::rx: return "rx";
  }
  return "?";
}

const char* to_string(EventKind e) {
  switch (e) {
    case EventKind::sent: return "sent";
    case EventKind::dropped: return "dropped";
    case EventKind::tampered: return "tampered";
    case EventKind::delivered: return "delivered";
    case EventKind::accepted: return "accepted";
    case EventKind::discarded: return "discarded";
    case EventKind::exhausted: return "exhausted";
  }
  return "?";
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

std::uint64_t SessionLog::count(EventKind kind) const noexcept {
  std::uint64_t n = 0;
  for (const auto& e : events) n += e.event == kind;
  return n;
}

std::uint64_t SessionLog::count(DiscardReason reason) const noexcept {
  std::uint64_t n = 0;
  for (const auto& e : events) n += e.event == EventKind::discarded && e.reason == reason;
  return n;
}

void SessionLog::write(std::ostream& out) const {
  for (const auto& e : events) {
    out << e.seq << ", " << to_string(e.direction) << ", ";
    if (e.address) out << e.address->index; else out << '-';
    out << ", " << to_string(e.event);
    if (e.reason) out << ':' << to_string(*e.reason);
    out << ", " << to_hex(e.bytes) << '\n';
  }
}

std::string SessionLog::to_text() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

SessionLog SessionLog::parse(std::istream& in) {
  SessionLog log;
  std::map<std::uint64_t, std::size_t> tx_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (int i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) {
        throw std::invalid_argument("session log line " + std::to_string(line_no) +
                                    ": expected 5 fields");
      }
      fields.push_back(trim(rest.substr(0, comma)));
      rest = rest.substr(comma + 1);
    }
    fields.push_back(trim(rest));

    SessionEvent ev;
    auto [p, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), ev.seq);
    if (ec != std::errc{}) throw std::invalid_argument("bad seq on line " + std::to_string(line_no));

    if (fields[1] == "tx") ev.direction = Direction::tx;
    else if (fields[1] == "air") ev.direction = Direction::air;
    else if (fields[1] == "rx") ev.direction = Direction::rx;
    else throw std::invalid_argument("bad direction on line " + std::to_string(line_no));

    if (fields[2] != "-") {
      std::uint32_t a = 0;
      auto [q, ec2] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), a);
      if (ec2 != std::errc{}) throw std::invalid_argument("bad address on line " + std::to_string(line_no));
      ev.address = KeyAddress{a};
    }

    auto event = fields[3];
    if (event.starts_with("discarded:")) {
      ev.event = EventKind::discarded;
      ev.reason = parse_discard_reason(event.substr(10));
    } else {
      bool found = false;
      for (auto k : {EventKind::sent, EventKind::dropped, EventKind::tampered, EventKind::delivered,
                     EventKind::accepted, EventKind::exhausted}) {
        if (event == to_string(k)) {
          ev.event = k;
          found = true;
        }
      }
      if (!found) throw std::invalid_argument("bad event on line " + std::to_string(line_no));
    }
    ev.bytes = from_hex(fields[4]);

    if (ev.direction == Direction::tx && ev.event == EventKind::sent) {
      tx_index[ev.seq] = log.intercepts.size();
      log.intercepts.push_back({ev.seq, ev.bytes, std::nullopt});
    } else if (ev.direction == Direction::air) {
      if (auto it = tx_index.find(ev.seq); it != tx_index.end()) {
        log.intercepts[it->second].outcome = ev.event == EventKind::dropped    ? Outcome::dropped
                                             : ev.event == EventKind::tampered ? Outcome::tampered
                                                                               : Outcome::delivered;
      }
    }
    log.events.push_back(std::move(ev));
  }
  return log;
}

// ---------------------------------------------------------------- session

SessionLog run_session(Controller& controller, Controlee& controlee,
                       std::span<const CommandFrame> script, const ChannelConfig& channel_cfg) {
  Channel channel(channel_cfg);
  SessionLog log;
  for (std::uint64_t seq = 0; seq < script.size(); ++seq) {
    WireFrame wire;
    try {
      wire = controller.send(script[seq]);
    } catch (const KeyExhausted&) {
      log.events.push_back({seq, Direction::tx, std::nullopt, EventKind::exhausted, {}, {}});
      break;
    }
    const auto on_air = wire.serialize();
    log.events.push_back(
        {seq, Direction::tx, wire.address, EventKind::sent, {}, Bytes(on_air.begin(), on_air.end())});

    auto delivery = channel.transmit(on_air, seq);
    if (delivery.outcome == Outcome::dropped) {
      log.events.push_back({seq, Direction::air, wire.address, EventKind::dropped, {}, {}});
      continue;
    }
    log.events.push_back({seq, Direction::air, wire.address,
                          delivery.outcome == Outcome::tampered ? EventKind::tampered
                                                                : EventKind::delivered,
                          {}, delivery.bytes});

    const auto rx = controlee.receive(delivery.bytes);
    if (rx.is_accepted()) {
      const auto& plain = rx.accepted->bytes();
      log.events.push_back({seq, Direction::rx, rx.address, EventKind::accepted, {},
                            Bytes(plain.begin(), plain.end())});
    } else {
      log.events.push_back({seq, Direction::rx, rx.address, EventKind::discarded, rx.reason, {}});
    }
  }
  log.intercepts = channel.take_intercepts();
  return log;
}

}  // namespace remctl
