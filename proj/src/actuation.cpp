#include "graspdec/actuation.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace graspdec {

namespace {

constexpr int kMinMv = 600;
constexpr int kMaxMv = 1600;

void validate_command(Label label, const DacCommand& c) {
  if (c.channel == DacCommand::Channel::none) {
    if (c.millivolts != 0 || c.duration_ms != 0) {
      throw Error(Error::Code::bad_config,
                  std::string(label_name(label)) + ": no-op command must carry zero parameters");
    }
    return;
  }
  if (c.millivolts < kMinMv || c.millivolts > kMaxMv) {
    throw Error(Error::Code::bad_config,
                std::string(label_name(label)) + ": voltage " + std::to_string(c.millivolts) +
                    " mV outside [600, 1600]");
  }
  if (c.duration_ms <= 0) {
    throw Error(Error::Code::bad_config,
                std::string(label_name(label)) + ": duration must be > 0 ms");
  }
  if (c.duration_ms > 0xffff || c.millivolts > 0xffff) {
    throw Error(Error::Code::bad_config, "command parameters exceed the 16-bit wire format");
  }
}

const char* channel_name(DacCommand::Channel ch) {
  switch (ch) {
    case DacCommand::Channel::none: return "none";
    case DacCommand::Channel::open: return "open";
    case DacCommand::Channel::close: return "close";
  }
  throw Error(Error::Code::bad_config, "invalid channel");
}

DacCommand::Channel channel_from_name(const std::string& name) {
  if (name == "none") return DacCommand::Channel::none;
  if (name == "open") return DacCommand::Channel::open;
  if (name == "close") return DacCommand::Channel::close;
  throw Error(Error::Code::bad_config, "unknown DAC channel: " + name);
}

}  // namespace

LookupTable default_lookup_table() {
  // Within the device's working range; tune per prosthesis.
  LookupTable t;
  t.entries[Label::TG] = {DacCommand::Channel::close, 900, 400};
  t.entries[Label::PG] = {DacCommand::Channel::close, 1300, 600};
  t.entries[Label::Open] = {DacCommand::Channel::open, 1200, 500};
  t.entries[Label::Rest] = {DacCommand::Channel::none, 0, 0};
  return t;
}

void validate_table(const LookupTable& table) {
  for (int code = 0; code < kNumLabels; ++code) {
    const Label label = static_cast<Label>(code);
    auto it = table.entries.find(label);
    if (it == table.entries.end()) {
      throw Error(Error::Code::bad_config,
                  std::string("lookup table missing entry for ") + label_name(label));
    }
    validate_command(label, it->second);
  }
  if (table.entries.at(Label::Rest).channel != DacCommand::Channel::none) {
    throw Error(Error::Code::bad_config, "Rest must map to the no-op channel");
  }
}

DacCommand command_for(Label label, const LookupTable& table) {
  validate_table(table);
  return table.entries.at(label);
}

std::array<std::uint8_t, 6> encode_command(const DacCommand& c) {
  std::array<std::uint8_t, 6> frame{};
  frame[0] = static_cast<std::uint8_t>(c.channel);
  frame[1] = static_cast<std::uint8_t>(c.millivolts & 0xff);
  frame[2] = static_cast<std::uint8_t>((c.millivolts >> 8) & 0xff);
  frame[3] = static_cast<std::uint8_t>(c.duration_ms & 0xff);
  frame[4] = static_cast<std::uint8_t>((c.duration_ms >> 8) & 0xff);
  frame[5] = static_cast<std::uint8_t>(frame[0] ^ frame[1] ^ frame[2] ^ frame[3] ^ frame[4]);
  return frame;
}

DacCommand decode_command(const std::array<std::uint8_t, 6>& frame) {
  const std::uint8_t checksum =
      static_cast<std::uint8_t>(frame[0] ^ frame[1] ^ frame[2] ^ frame[3] ^ frame[4]);
  if (checksum != frame[5]) {
    throw Error(Error::Code::bad_argument, "command frame checksum mismatch");
  }
  if (frame[0] > 2) {
    throw Error(Error::Code::bad_argument, "command frame has invalid channel byte");
  }
  DacCommand c;
  c.channel = static_cast<DacCommand::Channel>(frame[0]);
  c.millivolts = frame[1] | (frame[2] << 8);
  c.duration_ms = frame[3] | (frame[4] << 8);
  return c;
}

LookupTable load_lookup_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Code::io_failure, "cannot open lookup table: " + path);
  nlohmann::json j;
  try {
    in >> j;
    LookupTable table;
    for (const auto& [key, body] : j.items()) {
      DacCommand c;
      c.channel = channel_from_name(body.at("channel").get<std::string>());
      c.millivolts = body.at("millivolts").get<int>();
      c.duration_ms = body.at("duration_ms").get<int>();
      table.entries[label_from_name(key)] = c;
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Error::Code::bad_config, "lookup table schema error: " + std::string(e.what()));
  }
}

void save_lookup_table(const LookupTable& table, const std::string& path) {
  nlohmann::json j;
  for (const auto& [label, c] : table.entries) {
    j[label_name(label)] = {{"channel", channel_name(c.channel)},
                            {"millivolts", c.millivolts},
                            {"duration_ms", c.duration_ms}};
  }
  std::ofstream out(path);
  if (!out) throw Error(Error::Code::unwritable_path, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace graspdec
