#pragma once

// Frame/action wire protocol between the harness and an external environment.
//
//   FrameMessage   u8  magic (0x50)
//                  u16 width, u16 height   (big-endian)
//                  u8  flags               bit 0 terminal, bit 1 reward present
//                  i16 reward * 100        (big-endian, only if bit 1 is set)
//                  width * height luminance bytes, row-major
//   ActionMessage  u8  0 NOOP, 1 FIRE, 2 RIGHT, 3 LEFT

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pctagent/perception.hpp"

namespace pct::wire {

inline constexpr std::uint8_t kFrameMagic = 0x50;
inline constexpr std::uint8_t kFlagTerminal = 0x01;
inline constexpr std::uint8_t kFlagReward = 0x02;
inline constexpr std::size_t kHeaderSize = 6;

class FramingError : public std::runtime_error {
public:
    FramingError(const std::string& what, std::size_t offset);
    [[nodiscard]] std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

struct FrameMessage {
    RawFrame frame;
    bool terminal = false;
    std::optional<std::int16_t> reward_centi;  // reward * 100

    [[nodiscard]] double reward() const { return reward_centi ? *reward_centi / 100.0 : 0.0; }
    bool operator==(const FrameMessage&) const = default;
};

// Rounds reward * 100 to the nearest integer; throws std::out_of_range if it
// does not fit an i16.
std::int16_t reward_to_centi(double reward);

std::vector<std::uint8_t> encode_frame(const FrameMessage& msg);

// Strict: the buffer must hold exactly one message.
FrameMessage decode_frame(std::span<const std::uint8_t> bytes);

std::uint8_t encode_action(Action a);
Action decode_action(std::uint8_t byte);

// Blocking byte stream. read_exact returns the number of bytes read, which is
// short only at end of stream.
class Stream {
public:
    virtual ~Stream() = default;
    virtual std::size_t read_exact(std::span<std::uint8_t> out) = 0;
    virtual void write_all(std::span<const std::uint8_t> data) = 0;
};

// Reads one FrameMessage. Returns nullopt on a clean end of stream before the
// first byte; throws FramingError (offset within the message) otherwise.
std::optional<FrameMessage> read_frame(Stream& s);
void write_frame(Stream& s, const FrameMessage& msg);

std::optional<Action> read_action(Stream& s);
void write_action(Stream& s, Action a);

}  // namespace pct::wire
