#include "pctagent/wire.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pct::wire {

FramingError::FramingError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

std::int16_t reward_to_centi(double reward) {
    const double scaled = std::round(reward * 100.0);
    if (!std::isfinite(scaled) || scaled < std::numeric_limits<std::int16_t>::min() ||
        scaled > std::numeric_limits<std::int16_t>::max()) {
        throw std::out_of_range("reward does not fit the i16 wire field");
    }
    return static_cast<std::int16_t>(scaled);
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

struct Header {
    std::uint16_t width;
    std::uint16_t height;
    std::uint8_t flags;
};

Header parse_header(std::span<const std::uint8_t> h) {
    if (h[0] != kFrameMagic) throw FramingError("bad frame magic", 0);
    Header hdr{get_u16(&h[1]), get_u16(&h[3]), h[5]};
    if ((hdr.flags & ~(kFlagTerminal | kFlagReward)) != 0) throw FramingError("unknown frame flags", 5);
    return hdr;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const FrameMessage& msg) {
    const RawFrame& f = msg.frame;
    if (f.width < 0 || f.height < 0 || f.width > 0xffff || f.height > 0xffff) {
        throw std::out_of_range("frame dimensions do not fit u16");
    }
    if (f.pixels.size() != static_cast<std::size_t>(f.width) * f.height) {
        throw std::invalid_argument("frame buffer does not match its dimensions");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + 2 + f.pixels.size());
    out.push_back(kFrameMagic);
    put_u16(out, static_cast<std::uint16_t>(f.width));
    put_u16(out, static_cast<std::uint16_t>(f.height));
    std::uint8_t flags = 0;
    if (msg.terminal) flags |= kFlagTerminal;
    if (msg.reward_centi) flags |= kFlagReward;
    out.push_back(flags);
    if (msg.reward_centi) put_u16(out, static_cast<std::uint16_t>(*msg.reward_centi));
    out.insert(out.end(), f.pixels.begin(), f.pixels.end());
    return out;
}

FrameMessage decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw FramingError("truncated frame header", 0);
    if (bytes[0] != kFrameMagic) throw FramingError("bad frame magic", 0);
    if (bytes.size() < kHeaderSize) throw FramingError("truncated frame header", bytes.size());
    const Header hdr = parse_header(bytes.first(kHeaderSize));
    std::size_t pos = kHeaderSize;

    FrameMessage msg;
    msg.terminal = (hdr.flags & kFlagTerminal) != 0;
    if (hdr.flags & kFlagReward) {
        if (bytes.size() < pos + 2) throw FramingError("truncated reward field", bytes.size());
        msg.reward_centi = static_cast<std::int16_t>(get_u16(&bytes[pos]));
        pos += 2;
    }
    const std::size_t payload = static_cast<std::size_t>(hdr.width) * hdr.height;
    if (bytes.size() < pos + payload) throw FramingError("truncated frame payload", bytes.size());
    if (bytes.size() > pos + payload) throw FramingError("trailing bytes after frame payload", pos + payload);
    msg.frame = RawFrame(hdr.width, hdr.height,
                         std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end()));
    return msg;
}

std::uint8_t encode_action(Action a) { return static_cast<std::uint8_t>(a); }

Action decode_action(std::uint8_t byte) {
    if (byte > 3) throw FramingError("action byte " + std::to_string(byte) + " out of range", 0);
    return static_cast<Action>(byte);
}

std::optional<FrameMessage> read_frame(Stream& s) {
    std::uint8_t head[kHeaderSize];
    const std::size_t got = s.read_exact(head);
    if (got == 0) return std::nullopt;
    if (head[0] != kFrameMagic) throw FramingError("bad frame magic", 0);
    if (got < kHeaderSize) throw FramingError("truncated frame header", got);
    const Header hdr = parse_header(head);
    std::size_t offset = kHeaderSize;

    FrameMessage msg;
    msg.terminal = (hdr.flags & kFlagTerminal) != 0;
    if (hdr.flags & kFlagReward) {
        std::uint8_t r[2];
        const std::size_t n = s.read_exact(r);
        if (n < 2) throw FramingError("truncated reward field", offset + n);
        msg.reward_centi = static_cast<std::int16_t>(get_u16(r));
        offset += 2;
    }
    // Grow the buffer as bytes arrive so a lying header cannot force a huge
    // allocation up front.
    constexpr std::size_t kChunk = 1 << 16;
    const std::size_t payload = static_cast<std::size_t>(hdr.width) * hdr.height;
    std::vector<std::uint8_t> pixels;
    while (pixels.size() < payload) {
        const std::size_t have = pixels.size();
        const std::size_t want = std::min(kChunk, payload - have);
        pixels.resize(have + want);
        const std::size_t n = s.read_exact(std::span(pixels).subspan(have, want));
        if (n < want) throw FramingError("truncated frame payload", offset + have + n);
    }
    msg.frame = RawFrame(hdr.width, hdr.height, std::move(pixels));
    return msg;
}

void write_frame(Stream& s, const FrameMessage& msg) { s.write_all(encode_frame(msg)); }

std::optional<Action> read_action(Stream& s) {
    std::uint8_t b = 0;
    if (s.read_exact({&b, 1}) == 0) return std::nullopt;
    return decode_action(b);
}

void write_action(Stream& s, Action a) {
    const std::uint8_t b = encode_action(a);
    s.write_all({&b, 1});
}

}  // namespace pct::wire
