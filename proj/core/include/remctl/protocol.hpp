#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "remctl/channel.hpp"
#include "remctl/frame.hpp"
#include "remctl/keystore.hpp"
#include "remctl/registry.hpp"

namespace remctl {

/// Sender side. Each command consumes the next unconsumed key block and
/// carries that block's address in clear.
class Controller {
 public:
  /// The cipher mode follows from the store's block size.
  explicit Controller(SksStore store);

  /// Throws KeyExhausted when no key blocks remain.
  WireFrame send(const CommandFrame& cmd);

  const SksStore& store() const noexcept { return store_; }
  SksStore& store() noexcept { return store_; }
  CipherMode mode() const noexcept { return mode_; }
  std::uint64_t frames_sent() const noexcept { return frames_sent_; }

 private:
  SksStore store_;
  CipherMode mode_;
  std::uint64_t frames_sent_ = 0;
};

/// How a decrypted frame is judged before execution.
enum class Validation {
  /// Fixed header match; in selective mode the clear trailer must also belong
  /// to a registered command. XOR malleability means a flipped ciphered byte
  /// outside the header goes undetected under this policy.
  header_only,
  /// The decrypted frame must equal a registered command byte for byte.
  registry,
};

enum class DiscardReason { bad_length, replay_or_stale, key_exhausted, validation_failed, jump_too_far };

const char* to_string(DiscardReason reason) noexcept;
DiscardReason parse_discard_reason(std::string_view text);

struct RxOutcome {
  std::optional<KeyAddress> address;     // unset when the frame could not be parsed
  std::optional<CommandFrame> accepted;  // set iff the frame was accepted
  DiscardReason reason{};                // meaningful only when not accepted

  bool is_accepted() const noexcept { return accepted.has_value(); }
};

struct ControleeOptions {
  Validation validation = Validation::registry;
  CommandRegistry registry = CommandRegistry::defaults();
  /// Largest allowed gap between next_expected and an incoming address.
  /// Frames beyond it are discarded without burning keys. Unset = unlimited.
  std::optional<std::uint32_t> max_jump;
};

/// Receiver side. Frames below next_expected are stale; a frame ahead of it
/// burns the skipped blocks, then consumes its own block whether or not it
/// validates.
class Controlee {
 public:
  explicit Controlee(SksStore store, ControleeOptions options = {});

  /// Never throws on hostile input; every failure is a Discarded outcome.
  RxOutcome receive(std::span<const std::uint8_t> wire);

  const SksStore& store() const noexcept { return store_; }
  SksStore& store() noexcept { return store_; }
  CipherMode mode() const noexcept { return mode_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  std::uint64_t discarded() const noexcept { return discarded_; }
  std::optional<KeyAddress> last_accepted() const noexcept { return last_accepted_; }
  const ControleeOptions& options() const noexcept { return options_; }

 private:
  RxOutcome discard(std::optional<KeyAddress> addr, DiscardReason reason);
  bool valid(const FrameBytes& plain) const;

  SksStore store_;
  CipherMode mode_;
  ControleeOptions options_;
  std::uint64_t accepted_ = 0;
  std::uint64_t discarded_ = 0;
  std::optional<KeyAddress> last_accepted_;
};

enum class Direction { tx, air, rx };

enum class EventKind { sent, dropped, tampered, delivered, accepted, discarded, exhausted };

struct SessionEvent {
  std::uint64_t seq = 0;
  Direction direction = Direction::tx;
  std::optional<KeyAddress> address;
  EventKind event = EventKind::sent;
  std::optional<DiscardReason> reason;  // with EventKind::discarded
  Bytes bytes;  // wire frame for tx/air, decrypted command for accepted
};

/// Line-delimited record of a session:
///   `seq, direction, address, event, hex-bytes`
/// direction is tx|air|rx, address is decimal or '-', event is one of sent,
/// dropped, tampered, delivered, accepted, discarded:<reason>, exhausted.
struct SessionLog {
  std::vector<SessionEvent> events;
  InterceptLog intercepts;

  std::uint64_t count(EventKind kind) const noexcept;
  std::uint64_t count(DiscardReason reason) const noexcept;

  void write(std::ostream& out) const;
  std::string to_text() const;
  /// Events only; intercepts are rebuilt from the tx records and their air outcomes.
  static SessionLog parse(std::istream& in);
};

/// Runs each scripted command through controller -> channel -> controlee.
/// Deterministic for a fixed channel seed. Stops (and logs `exhausted`) when
/// the controller runs out of keys.
SessionLog run_session(Controller& controller, Controlee& controlee,
                       std::span<const CommandFrame> script, const ChannelConfig& channel);

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

}  // namespace remctl
