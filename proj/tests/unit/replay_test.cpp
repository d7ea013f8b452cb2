#include "tissue/error.hpp"
#include "tissue/net.hpp"
#include "tissue/replay.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

using namespace tissue;
using namespace std::chrono_literals;

namespace {

std::vector<ReplayEvent> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_replay_log(in);
}

StraceResult strace(const std::string& text, const SyscallMap& map = SyscallMap::builtin(), std::uint64_t gap = 1000) {
    std::istringstream in(text);
    return parse_strace_log(in, map, gap);
}

std::uint32_t antigen_of(const ReplayEvent& ev) { return std::get<Antigen>(ev.payload).value; }

}  // namespace

TEST(SyscallTable, ReferenceTableShape) {
    const auto normal = normal_syscalls();
    ASSERT_EQ(normal.size(), 38u);
    std::uint64_t total = 0;
    const SyscallInfo* top = &normal[0];
    for (const auto& s : normal) {
        EXPECT_GT(s.normal_freq, 0u) << s.name;
        total += s.normal_freq;
        if (s.normal_freq > top->normal_freq) top = &s;
    }
    EXPECT_EQ(total, 884u);
    EXPECT_EQ(top->name, "close");
    EXPECT_EQ(top->number, 6u);
    for (const auto& s : builtin_syscalls().subspan(38)) EXPECT_EQ(s.normal_freq, 0u) << s.name;
}

TEST(SyscallTable, NamesAndNumbersAreUnique) {
    const auto m = SyscallMap::builtin();
    EXPECT_EQ(m.size(), builtin_syscalls().size());
    for (const auto& s : builtin_syscalls()) {
        EXPECT_EQ(m.number(s.name), s.number);
        EXPECT_EQ(m.name(s.number), std::string(s.name));
    }
    EXPECT_EQ(m.number("open"), 5u);
    EXPECT_EQ(m.number("close"), 6u);
    EXPECT_FALSE(m.number("frobnicate"));
}

TEST(SyscallTable, ShippedMapFileMatchesBuiltin) {
    const auto file = SyscallMap::load(TISSUE_DATA_DIR "/syscalls.map");
    std::ostringstream a, b;
    file.write(a);
    SyscallMap::builtin().write(b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(SyscallTable, MapParseErrors) {
    std::istringstream bad("open 5\nclose\n");
    try {
        SyscallMap::parse(bad);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream conflict("open 5\nopen 6\n");
    EXPECT_THROW(SyscallMap::parse(conflict), ParseError);
    std::istringstream ok("# c\n\nopen 5  # trailing\n");
    EXPECT_EQ(SyscallMap::parse(ok).number("open"), 5u);
}

TEST(ReplayLog, ParsesDirectly) {
    auto ev = parse("0 A 5\n1000 A 6\n");
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_EQ(ev[0], (ReplayEvent{0, Antigen{5}}));
    EXPECT_EQ(ev[1], (ReplayEvent{1000, Antigen{6}}));
    auto sig = parse("# cpu\n5 S 0 0.35\n");
    ASSERT_EQ(sig.size(), 1u);
    EXPECT_EQ(sig[0], (ReplayEvent{5, SignalUpdate{0, 0.35}}));
}

TEST(ReplayLog, EmptyFileIsEmptyLog) { EXPECT_TRUE(parse("").empty()); }

TEST(ReplayLog, BadKindReportsLine) {
    try {
        parse("50 X 1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
    try {
        parse("0 A 1\n# x\n7 A\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    for (const char* bad : {"-1 A 5", "0 A -5", "0 S 0 nan", "0 S 0", "x A 1", "0 A 1 2", "0 AA 1"})
        EXPECT_THROW(parse(bad), ParseError) << bad;
}

TEST(ReplayLog, DecreasingOffsetsRejected) {
    try {
        parse("10 A 1\n10 A 2\n9 A 3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ReplayLog, FormatParseIdentity) {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<std::uint32_t> u32;
    std::uniform_int_distribution<std::uint64_t> step(0, 5000);
    std::uniform_real_distribution<double> level(0.0, 1.0);
    for (int round = 0; round < 50; ++round) {
        std::vector<ReplayEvent> events;
        std::uint64_t t = step(gen);
        for (int i = 0; i < 200; ++i) {
            t += step(gen);
            if (u32(gen) % 4 == 0)
                events.push_back({t, SignalUpdate{u32(gen) % 4, level(gen)}});
            else
                events.push_back({t, Antigen{u32(gen)}});
        }
        std::ostringstream out;
        write_replay_log(out, events);
        EXPECT_EQ(parse(out.str()), events);
    }
}

TEST(Strace, MapsNamesToNumbers) {
    auto r = strace("open(\"/etc/hosts\", O_RDONLY) = 3\nclose(3) = 0\n");
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(antigen_of(r.events[0]), 5u);
    EXPECT_EQ(antigen_of(r.events[1]), 6u);
    EXPECT_EQ(r.events[0].offset_us, 0u);
    EXPECT_EQ(r.events[1].offset_us, 1000u);  // synthesized gap
}

TEST(Strace, UnknownNamesAreReported) {
    auto r = strace("open(\"a\", O_RDONLY) = 3\nfrobnicate(1) = 0\nfrobnicate(2) = 0\nclose(3) = 0\n");
    EXPECT_EQ(r.events.size(), 2u);
    EXPECT_EQ(r.skipped_names.at("frobnicate"), 2u);
}

TEST(Strace, SkipsNonCallLines) {
    auto r = strace(
        "read(3, <unfinished ...>\n"
        "<... read resumed> \"x\", 1) = 1\n"
        "--- SIGCHLD {si_signo=SIGCHLD} ---\n"
        "+++ exited with 0 +++\n"
        "garbage\n");
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(antigen_of(r.events[0]), 3u);
    EXPECT_EQ(r.skipped_lines, 4u);
}

TEST(Strace, TimestampStyles) {
    // -tt clock times
    auto tt = strace("10:00:00.000000 open(\"a\", 0) = 3\n10:00:00.250000 close(3) = 0\n");
    EXPECT_EQ(tt.events[1].offset_us, 250000u);
    // midnight wrap
    auto wrap = strace("23:59:59.5 read(0, \"\", 1) = 0\n00:00:00.5 read(0, \"\", 1) = 0\n");
    EXPECT_EQ(wrap.events[1].offset_us, 1000000u);
    // -ttt epoch seconds
    auto ttt = strace("1700000000.100000 open(\"a\", 0) = 3\n1700000000.600000 close(3) = 0\n");
    EXPECT_EQ(ttt.events[1].offset_us, 500000u);
    // -r deltas accumulate
    auto rel = strace("     0.000000 open(\"a\", 0) = 3\n     0.000300 read(3, \"\", 1) = 0\n     0.000200 close(3) = 0\n");
    EXPECT_EQ(rel.events[1].offset_us, 300u);
    EXPECT_EQ(rel.events[2].offset_us, 500u);
    // pid prefixes from -f
    auto pid = strace("[pid  4242] 0.000100 open(\"a\", 0) = 3\n4243  0.000100 close(3) = 0\n");
    ASSERT_EQ(pid.events.size(), 2u);
    EXPECT_EQ(pid.events[1].offset_us, 200u);
}

TEST(Strace, EmptyMapIsAnError) {
    std::istringstream in("open() = 1\n");
    EXPECT_THROW(parse_strace_log(in, SyscallMap{}), ParamError);
    EXPECT_THROW(load_strace_log("/nonexistent/trace", SyscallMap::builtin()), Error);
}

TEST(Replay, OrderPreservedAtAnyRate) {
    std::vector<ReplayEvent> events;
    for (std::uint32_t i = 0; i < 50; ++i) events.push_back({i * 200u, Antigen{i}});
    for (double rate : {1.0, 10.0, 1000.0, unlimited_rate}) {
        std::vector<ReplayEvent> seen;
        EXPECT_EQ(replay_events(events, rate, [&](const ReplayEvent& e) { seen.push_back(e); }), events.size());
        EXPECT_EQ(seen, events);
    }
}

TEST(Replay, RateScalesDuration) {
    std::vector<ReplayEvent> events;
    for (std::uint32_t i = 0; i <= 20; ++i) events.push_back({i * 50000u, Antigen{i}});  // 1 s span
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::chrono::steady_clock::time_point> stamps;
    replay_events(events, 10.0, [&](const ReplayEvent&) { stamps.push_back(std::chrono::steady_clock::now()); });
    const double total = std::chrono::duration<double>(stamps.back() - start).count();
    EXPECT_NEAR(total, 0.1, 0.01);
    for (std::size_t i = 1; i < stamps.size(); ++i)
        EXPECT_GE(std::chrono::duration<double>(stamps[i] - start).count(), i * 0.005 - 1e-4);
}

TEST(Replay, SingleEventGoesImmediately) {
    std::vector<ReplayEvent> events{{5000000, Antigen{1}}};
    const auto start = std::chrono::steady_clock::now();
    replay_events(events, 1.0, [](const ReplayEvent&) {});
    EXPECT_LT(std::chrono::steady_clock::now() - start, 100ms);
}

TEST(Replay, RateMustBePositive) {
    EXPECT_THROW(replay_events({}, 0.0, [](const ReplayEvent&) {}), ParamError);
    EXPECT_THROW(replay_events({}, -1.0, [](const ReplayEvent&) {}), ParamError);
}

TEST(Replay, TransportFailureReportsSentCount) {
    std::vector<ReplayEvent> events;
    for (std::uint32_t i = 0; i < 10; ++i) events.push_back({i, Antigen{i}});
    try {
        replay_events(events, unlimited_rate, [](const ReplayEvent& e) {
            if (std::get<Antigen>(e.payload).value == 4) throw TransportError("gone");
        });
        FAIL();
    } catch (const ReplayAborted& e) {
        EXPECT_EQ(e.sent(), 4u);
    }
}

TEST(Replay, ReachesServerQueue) {
    auto queue = std::make_shared<IngestQueue>();
    Server server("127.0.0.1:0", queue);
    std::vector<ReplayEvent> events;
    for (std::uint32_t i = 0; i < 30; ++i) events.push_back({i * 100u, Antigen{i}});
    events.push_back({3000, SignalUpdate{0, 0.75}});
    EXPECT_EQ(replay_to_server(events, unlimited_rate, server.address()), events.size());
    const auto end = std::chrono::steady_clock::now() + 3s;
    while (queue->total_pushed() < events.size() && std::chrono::steady_clock::now() < end)
        std::this_thread::sleep_for(2ms);
    auto got = queue->drain();
    ASSERT_EQ(got.size(), events.size());
    std::vector<std::uint32_t> antigen;
    for (const auto& s : got)
        if (auto* a = std::get_if<Antigen>(&s)) antigen.push_back(a->value);
    ASSERT_EQ(antigen.size(), 30u);
    for (std::uint32_t i = 0; i < 30; ++i) EXPECT_EQ(antigen[i], i);
}
