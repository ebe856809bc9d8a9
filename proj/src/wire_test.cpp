#include <doctest.h>

#include <sys/socket.h>

#include <random>
#include <thread>

#include "../tests/support/memory_stream.hpp"
#include "pctagent/transport.hpp"
#include "pctagent/wire.hpp"

using namespace pct;
using namespace pct::wire;

namespace {

FrameMessage random_message(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(0, 24), byte(0, 255), coin(0, 1);
    FrameMessage m;
    m.frame = RawFrame(dim(rng), dim(rng));
    for (auto& p : m.frame.pixels) p = static_cast<std::uint8_t>(byte(rng));
    m.terminal = coin(rng) == 1;
    if (coin(rng)) m.reward_centi = static_cast<std::int16_t>(std::uniform_int_distribution<int>(-32768, 32767)(rng));
    return m;
}

}  // namespace

TEST_CASE("2x2 frame without reward is 10 bytes") {
    FrameMessage m;
    m.frame = RawFrame(2, 2, std::vector<std::uint8_t>{1, 2, 3, 4});
    const auto bytes = encode_frame(m);
    CHECK(bytes == std::vector<std::uint8_t>{0x50, 0, 2, 0, 2, 0, 1, 2, 3, 4});
}

TEST_CASE("header layout is big-endian with reward after the flags") {
    FrameMessage m;
    m.frame = RawFrame(160, 210);
    m.terminal = true;
    m.reward_centi = reward_to_centi(-1.0);
    const auto b = encode_frame(m);
    REQUIRE(b.size() == 8 + 160 * 210);
    CHECK(b[1] == 0x00);
    CHECK(b[2] == 0xA0);
    CHECK(b[3] == 0x00);
    CHECK(b[4] == 0xD2);
    CHECK(b[5] == 0x03);
    CHECK(b[6] == 0xFF);
    CHECK(b[7] == 0x9C);
    CHECK(decode_frame(b).reward() == -1.0);
}

TEST_CASE("decode inverts encode on random frames") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 500; ++i) {
        const FrameMessage m = random_message(rng);
        REQUIRE(decode_frame(encode_frame(m)) == m);
    }
}

TEST_CASE("malformed messages are rejected with the offending offset") {
    FrameMessage m;
    m.frame = RawFrame(2, 2, std::vector<std::uint8_t>{1, 2, 3, 4});
    auto b = encode_frame(m);

    auto offset_of = [](std::span<const std::uint8_t> bytes) -> std::size_t {
        try {
            decode_frame(bytes);
        } catch (const FramingError& e) {
            return e.offset();
        }
        FAIL("expected a framing error");
        return 0;
    };

    auto bad = b;
    bad[0] = 0x51;
    CHECK(offset_of(bad) == 0);
    CHECK(offset_of(std::span(b).first(3)) == 3);
    CHECK(offset_of(std::span(b).first(8)) == 8);
    auto longer = b;
    longer.push_back(9);
    CHECK(offset_of(longer) == 10);
    auto flags = b;
    flags[5] = 0x04;
    CHECK(offset_of(flags) == 5);
    CHECK(offset_of({}) == 0);
}

TEST_CASE("action bytes") {
    for (int v = 0; v < 4; ++v) CHECK(encode_action(decode_action(static_cast<std::uint8_t>(v))) == v);
    CHECK(encode_action(Action::fire) == 1);
    CHECK(encode_action(Action::left) == 3);
    CHECK_THROWS_AS(decode_action(4), FramingError);
}

TEST_CASE("reward scaling") {
    CHECK(reward_to_centi(7.0) == 700);
    CHECK(reward_to_centi(0.015) == 2);
    CHECK_THROWS_AS(reward_to_centi(400.0), std::out_of_range);
}

TEST_CASE("stream reads: clean end, truncation, back-to-back messages") {
    testing::MemoryStream empty;
    CHECK_FALSE(read_frame(empty));

    std::mt19937_64 rng(4);
    std::vector<FrameMessage> msgs;
    std::vector<std::uint8_t> bytes;
    for (int i = 0; i < 20; ++i) {
        msgs.push_back(random_message(rng));
        const auto b = encode_frame(msgs.back());
        bytes.insert(bytes.end(), b.begin(), b.end());
    }
    testing::MemoryStream s(bytes);
    for (const auto& m : msgs) CHECK(*read_frame(s) == m);
    CHECK_FALSE(read_frame(s));

    // Header claims a 65535 x 65535 payload but the stream ends early.
    testing::MemoryStream liar({0x50, 0xFF, 0xFF, 0xFF, 0xFF, 0x00, 1, 2, 3});
    try {
        read_frame(liar);
        FAIL("expected a framing error");
    } catch (const FramingError& e) {
        CHECK(e.offset() == 9);
    }
}

TEST_CASE("fuzzed messages are decoded or rejected, never anything else") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> byte(0, 255);
    int decoded = 0, rejected = 0;
    for (int i = 0; i < 3000; ++i) {
        auto b = encode_frame(random_message(rng));
        const int mutations = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < mutations; ++k) {
            switch (rng() % 3) {
                case 0: b[rng() % b.size()] = static_cast<std::uint8_t>(byte(rng)); break;
                case 1: b.resize(rng() % (b.size() + 1)); break;
                default: b.push_back(static_cast<std::uint8_t>(byte(rng))); break;
            }
            if (b.empty()) b.push_back(0x50);
        }
        try {
            decode_frame(b);
            ++decoded;
        } catch (const FramingError& e) {
            REQUIRE(e.offset() <= b.size());
            ++rejected;
        }
        testing::MemoryStream s(b);
        try {
            while (read_frame(s)) {
            }
        } catch (const FramingError&) {
        }
    }
    CHECK(decoded + rejected == 3000);
    CHECK(rejected > 0);
}

TEST_CASE("endpoint parsing") {
    const Endpoint a = Endpoint::parse("127.0.0.1:5000");
    CHECK(a.host == "127.0.0.1");
    CHECK(a.port == 5000);
    CHECK(Endpoint::parse(":7").host == "0.0.0.0");
    CHECK_THROWS_AS(Endpoint::parse("localhost"), std::invalid_argument);
    CHECK_THROWS_AS(Endpoint::parse("h:99999"), std::invalid_argument);
}

TEST_CASE("frames and actions cross a socketpair") {
    int fds[2];
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
    FdStream harness(fds[0], fds[0], true);
    std::thread peer([fd = fds[1]] {
        FdStream env(fd, fd, true);
        FrameMessage m;
        m.frame = RawFrame(160, 210, 7);
        m.reward_centi = 100;
        write_frame(env, m);
        const auto a = read_action(env);
        m.terminal = true;
        m.frame.pixels[0] = static_cast<std::uint8_t>(encode_action(a.value()));
        write_frame(env, m);
    });
    const auto first = read_frame(harness);
    REQUIRE(first);
    CHECK(first->reward() == 1.0);
    CHECK(first->frame.width == 160);
    write_action(harness, Action::left);
    const auto second = read_frame(harness);
    REQUIRE(second);
    CHECK(second->terminal);
    CHECK(second->frame.pixels[0] == 3);
    peer.join();
    CHECK_FALSE(read_frame(harness));
}

TEST_CASE("tcp listener accepts one peer") {
    TcpListener listener(Endpoint::parse("127.0.0.1:0"));
    REQUIRE(listener.port() != 0);
    std::thread peer([port = listener.port()] {
        auto s = tcp_connect({"127.0.0.1", port});
        FrameMessage m;
        m.frame = RawFrame(3, 1, std::vector<std::uint8_t>{9, 8, 7});
        write_frame(*s, m);
        CHECK(read_action(*s) == Action::fire);
    });
    auto conn = listener.accept();
    const auto m = read_frame(*conn);
    REQUIRE(m);
    CHECK(m->frame.pixels == std::vector<std::uint8_t>{9, 8, 7});
    write_action(*conn, Action::fire);
    peer.join();
}
