#include "remctl/registry.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "remctl/error.hpp"

namespace remctl {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

struct RawCommand {
  const char* name;
  std::array<std::uint16_t, kChannelCount> channels;
  std::array<std::uint8_t, kAuxSize> aux;
  std::array<std::uint8_t, kTrailerSize> trailer;
};

// Channel values decoded from the captured plaintexts ({221, 5} -> 1501).
constexpr std::array<RawCommand, 5> kDefaultCommands{{
    {"Connection", {1501, 1501, 1499, 1500, 1500, 1500, 1501}, {0, 0, 166, 0, 0, 0, 0, 0, 0},
     {221, 255, 223, 255}},
    {"Backward", {1501, 1501, 1499, 1000, 1501, 1500, 1501}, {0, 0, 149, 0, 0, 0, 0, 0, 0},
     {221, 191, 215, 255}},
    {"Turn Left", {1501, 1500, 1002, 1499, 1500, 1500, 1501}, {0, 0, 168, 0, 0, 0, 0, 0, 0},
     {221, 255, 215, 255}},
    {"Turn Right", {1501, 1501, 2000, 1499, 1500, 1501, 1500}, {0, 0, 168, 0, 0, 0, 0, 0, 0},
     {221, 255, 215, 255}},
    {"Forward", {1500, 1500, 1500, 2000, 1500, 1499, 1501}, {0, 0, 168, 0, 0, 0, 0, 0, 0},
     {221, 255, 215, 255}},
}};

}  // namespace

CommandRegistry::CommandRegistry(std::vector<NamedCommand> commands)
    : commands_(std::move(commands)) {
  for (std::size_t i = 0; i < commands_.size(); ++i) {
    if (commands_[i].name.empty()) throw RegistryError("command with empty name");
    for (std::size_t j = 0; j < i; ++j) {
      if (commands_[j].name == commands_[i].name) {
        throw RegistryError("duplicate command name '" + commands_[i].name + "'");
      }
    }
  }
}

CommandRegistry CommandRegistry::defaults() {
  std::vector<NamedCommand> out;
  for (const auto& raw : kDefaultCommands) {
    out.push_back({raw.name, encode_command(raw.channels, raw.aux, raw.trailer)});
  }
  return CommandRegistry(std::move(out));
}

CommandRegistry CommandRegistry::parse(std::string_view text) {
  std::vector<NamedCommand> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto where = "registry line " + std::to_string(line_no);
    const auto colon = line.rfind(':');
    if (colon == std::string_view::npos) throw RegistryError(where + ": missing ':'");
    auto name = trim(line.substr(0, colon));
    auto values = line.substr(colon + 1);

    FrameBytes bytes{};
    std::size_t count = 0;
    while (true) {
      const auto comma = values.find(',');
      auto field = trim(values.substr(0, comma));
      unsigned v = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || v > 255) {
        throw RegistryError(where + ": bad byte value '" + std::string(field) + "'");
      }
      if (count == kFrameSize) throw RegistryError(where + ": more than 32 bytes");
      bytes[count++] = static_cast<std::uint8_t>(v);
      if (comma == std::string_view::npos) break;
      values = values.substr(comma + 1);
    }
    if (count != kFrameSize) {
      throw RegistryError(where + ": expected 32 bytes, got " + std::to_string(count));
    }
    auto frame = CommandFrame::from_bytes(bytes);
    if (!frame) throw RegistryError(where + ": frame header is not 36,77,60,16,105");
    out.push_back({std::string(name), *frame});
  }
  return CommandRegistry(std::move(out));
}

CommandRegistry CommandRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open registry '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

CommandRegistry CommandRegistry::from_environment() {
  if (const char* path = std::getenv("OTP_REMCTL_REGISTRY"); path && *path) return load(path);
  return defaults();
}

std::string CommandRegistry::to_text() const {
  std::string out;
  for (const auto& cmd : commands_) {
    out += cmd.name;
    out += ": ";
    for (std::size_t i = 0; i < kFrameSize; ++i) {
      if (i) out += ',';
      out += std::to_string(cmd.frame.bytes()[i]);
    }
    out += '\n';
  }
  return out;
}

const NamedCommand* CommandRegistry::find(std::string_view name) const noexcept {
  auto it = std::find_if(commands_.begin(), commands_.end(),
                         [&](const NamedCommand& c) { return c.name == name; });
  return it == commands_.end() ? nullptr : &*it;
}

const CommandFrame& CommandRegistry::at(std::string_view name) const {
  if (const auto* cmd = find(name)) return cmd->frame;
  throw RegistryError("unknown command '" + std::string(name) + "'");
}

bool CommandRegistry::contains(std::span<const std::uint8_t> frame) const noexcept {
  return std::any_of(commands_.begin(), commands_.end(), [&](const NamedCommand& c) {
    return std::equal(frame.begin(), frame.end(), c.frame.bytes().begin(), c.frame.bytes().end());
  });
}

bool CommandRegistry::has_trailer(std::span<const std::uint8_t> trailer) const noexcept {
  return std::any_of(commands_.begin(), commands_.end(), [&](const NamedCommand& c) {
    const auto t = c.frame.trailer();
    return std::equal(trailer.begin(), trailer.end(), t.begin(), t.end());
  });
}

std::vector<CommandFrame> CommandRegistry::resolve_script(std::string_view script) const {
  std::vector<CommandFrame> out;
  while (!script.empty()) {
    const auto eol = script.find('\n');
    auto line = trim(script.substr(0, eol));
    script = eol == std::string_view::npos ? std::string_view{} : script.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(at(line));
  }
  return out;
}

}  // namespace remctl
