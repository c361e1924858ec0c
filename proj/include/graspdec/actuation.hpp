#pragma once

#include "graspdec/types.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>

namespace graspdec {

// Prosthesis DAC command. The device responds between 0.6 V and 1.6 V, so
// active commands must stay in [600, 1600] mV with a positive duration.
struct DacCommand {
  enum class Channel : std::uint8_t { none = 0, open = 1, close = 2 };
  Channel channel{Channel::none};
  int millivolts{0};
  int duration_ms{0};

  bool operator==(const DacCommand&) const = default;
};

struct LookupTable {
  std::map<Label, DacCommand> entries;
};

// One command per label; Rest maps to the no-op channel; TG/PG close the hand
// with distinct parameters (two aperture sizes); Open drives the open channel.
LookupTable default_lookup_table();

// Throws Error on any invariant violation: out-of-range voltage, missing
// label, Rest on an active channel, non-positive duration.
void validate_table(const LookupTable& table);

DacCommand command_for(Label label, const LookupTable& table);

// 6-byte wire frame: channel u8 (0=none, 1=open, 2=close), millivolts u16 LE,
// duration_ms u16 LE, XOR checksum over the first five bytes.
std::array<std::uint8_t, 6> encode_command(const DacCommand& command);
DacCommand decode_command(const std::array<std::uint8_t, 6>& frame);

LookupTable load_lookup_table(const std::string& path);
void save_lookup_table(const LookupTable& table, const std::string& path);

}  // namespace graspdec
