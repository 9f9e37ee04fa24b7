#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "remctl/frame.hpp"

namespace remctl {

struct NamedCommand {
  std::string name;
  CommandFrame frame;
};

/// The set of commands a controlee is willing to execute.
///
/// Text form, one per line:  `name: b0,b1,...,b31`  (decimal bytes).
/// Blank lines and lines starting with '#' are ignored.
class CommandRegistry {
 public:
  CommandRegistry() = default;
  explicit CommandRegistry(std::vector<NamedCommand> commands);

  /// Connection, Backward, Turn Left, Turn Right and Forward as captured
  /// from the reference UAV controller.
  static CommandRegistry defaults();
  static CommandRegistry parse(std::string_view text);
  static CommandRegistry load(const std::filesystem::path& path);

  /// $OTP_REMCTL_REGISTRY if set, otherwise defaults().
  static CommandRegistry from_environment();

  std::string to_text() const;

  const std::vector<NamedCommand>& commands() const noexcept { return commands_; }
  std::size_t size() const noexcept { return commands_.size(); }

  const NamedCommand* find(std::string_view name) const noexcept;
  /// Throws RegistryError for unknown names.
  const CommandFrame& at(std::string_view name) const;

  bool contains(std::span<const std::uint8_t> frame) const noexcept;
  bool has_trailer(std::span<const std::uint8_t> trailer) const noexcept;

  /// Resolves a script (one command name per line) into frames.
  std::vector<CommandFrame> resolve_script(std::string_view script) const;

 private:
  std::vector<NamedCommand> commands_;
};

}  // namespace remctl
