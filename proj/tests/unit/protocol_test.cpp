#include "tissue/error.hpp"
#include "tissue/protocol.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tissue;

TEST(Protocol, EncodesDirectly) {
    EXPECT_EQ(encode_message(wire::AntigenMsg{6}), "A 6\n");
    EXPECT_EQ(encode_message(wire::SignalMsg{0, 0.35}), "S 0 0.35\n");
    EXPECT_EQ(encode_message(wire::ResponseMsg{42, 5}), "R 42 5\n");
    EXPECT_EQ(encode_message(wire::Hello{Role::response}), "H response\n");
    EXPECT_EQ(encode_message(wire::ErrorMsg{"bad\nthing"}), "E bad thing\n");
}

TEST(Protocol, DecodesInverse) {
    EXPECT_EQ(decode_message("A 6"), WireMessage(wire::AntigenMsg{6}));
    EXPECT_EQ(decode_message("A 6\n"), WireMessage(wire::AntigenMsg{6}));
    EXPECT_EQ(decode_message("S 0 0.35\r\n"), WireMessage(wire::SignalMsg{0, 0.35}));
    EXPECT_EQ(decode_message("H signal"), WireMessage(wire::Hello{Role::signal}));
    EXPECT_EQ(decode_message("E"), WireMessage(wire::ErrorMsg{""}));
}

TEST(Protocol, RejectsMalformed) {
    for (const char* bad : {"A -1", "A 4294967296", "A", "A 1 2", "A x", "X 1", "AA 1", "", "S 0", "S 0 nan",
                            "S 0 inf", "S -1 0.5", "R 1", "H admin", "A +5", "A 0x10"}) {
        EXPECT_THROW(decode_message(bad), ProtocolError) << bad;
    }
}

TEST(Protocol, NonFiniteLevelCannotBeEncoded) {
    EXPECT_THROW(encode_message(wire::SignalMsg{0, std::numeric_limits<double>::infinity()}), ProtocolError);
}

TEST(Protocol, RoundTripProperty) {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> kind(0, 4);
    std::uniform_int_distribution<std::uint32_t> u32;
    std::uniform_int_distribution<std::uint64_t> u64;
    std::uniform_real_distribution<double> level(-1e6, 1e6);
    std::uniform_int_distribution<int> printable(0x20, 0x7e);
    for (int i = 0; i < 20000; ++i) {
        WireMessage m;
        switch (kind(gen)) {
            case 0: m = wire::Hello{static_cast<Role>(u32(gen) % 3)}; break;
            case 1: m = wire::AntigenMsg{u32(gen)}; break;
            case 2: {
                double l = level(gen);
                if (i % 7 == 0) l = std::ldexp(l, -900);  // tiny magnitudes too
                m = wire::SignalMsg{u32(gen), l};
                break;
            }
            case 3: m = wire::ResponseMsg{u64(gen), u32(gen)}; break;
            default: {
                std::string text;
                for (int n = static_cast<int>(u32(gen) % 40); n > 0; --n) text.push_back(static_cast<char>(printable(gen)));
                m = wire::ErrorMsg{text};
            }
        }
        const auto line = encode_message(m);
        ASSERT_EQ(line.back(), '\n');
        ASSERT_EQ(line.find('\n'), line.size() - 1);
        ASSERT_EQ(decode_message(line), m) << line;
    }
}

TEST(Protocol, FuzzLinesNeverCrash) {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> byte(0, 255);
    int errors = 0;
    for (int i = 0; i < 20000; ++i) {
        std::string line(64, '\0');
        for (auto& c : line) c = static_cast<char>(byte(gen));
        if (i % 3 == 0) line[0] = "AHSRE"[i % 5];
        if (i % 3 == 0) line[1] = ' ';
        try {
            decode_message(line);
        } catch (const ProtocolError&) {
            ++errors;
        }
    }
    EXPECT_GT(errors, 0);
}
