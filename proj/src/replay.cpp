#include "tissue/replay.hpp"

#include "tissue/net.hpp"
#include "tissue/text.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <thread>

namespace tissue {

namespace {

std::optional<ReplayEvent> parse_event(std::string_view text) {
    const auto f = split_ws(text);
    if (f.size() < 3 || f[1].size() != 1) return std::nullopt;
    const auto offset = to_u64(f[0]);
    if (!offset) return std::nullopt;
    if (f[1] == "A" && f.size() == 3) {
        const auto v = to_u32(f[2]);
        if (!v) return std::nullopt;
        return ReplayEvent{*offset, Antigen{*v}};
    }
    if (f[1] == "S" && f.size() == 4) {
        const auto idx = to_u32(f[2]);
        const auto level = to_double(f[3]);
        if (!idx || !level) return std::nullopt;
        return ReplayEvent{*offset, SignalUpdate{*idx, *level}};
    }
    return std::nullopt;
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

// A leading timestamp token, in seconds. Clock times (`-t`, `-tt`) become
// seconds since midnight and are flagged so midnight wraps can be undone.
struct Stamp {
    double seconds;
    bool clock;
};

std::optional<Stamp> parse_stamp(std::string_view tok) {
    if (tok.find(':') != std::string_view::npos) {
        std::size_t pos = 0;
        double parts[3];
        for (int i = 0; i < 3; ++i) {
            const auto end = i < 2 ? tok.find(':', pos) : tok.size();
            if (end == std::string_view::npos) return std::nullopt;
            const auto piece = tok.substr(pos, end - pos);
            std::optional<double> v;
            if (i < 2) {
                if (auto whole = to_u64(piece)) v = double(*whole);
            } else {
                v = to_double(piece);
            }
            if (!v || *v < 0) return std::nullopt;
            parts[i] = *v;
            pos = end + 1;
        }
        return Stamp{parts[0] * 3600 + parts[1] * 60 + parts[2], true};
    }
    if (tok.find('.') == std::string_view::npos) return std::nullopt;
    const auto v = to_double(tok);
    if (!v || *v < 0) return std::nullopt;
    return Stamp{*v, false};
}

}  // namespace

std::vector<ReplayEvent> parse_replay_log(std::istream& in) {
    std::vector<ReplayEvent> events;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = trim(raw);
        if (text.empty() || text.front() == '#') continue;
        auto ev = parse_event(text);
        if (!ev) throw ParseError(line, "malformed replay event '" + std::string(text) + "'");
        if (!events.empty() && ev->offset_us < events.back().offset_us)
            throw ParseError(line, "offset " + std::to_string(ev->offset_us) + " is before the previous event");
        events.push_back(*ev);
    }
    return events;
}

std::vector<ReplayEvent> load_replay_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open replay log '" + path + "'");
    return parse_replay_log(in);
}

void write_replay_log(std::ostream& out, const std::vector<ReplayEvent>& events) {
    for (const auto& ev : events) {
        out << ev.offset_us;
        if (const auto* a = std::get_if<Antigen>(&ev.payload))
            out << " A " << a->value << '\n';
        else {
            const auto& s = std::get<SignalUpdate>(ev.payload);
            out << " S " << s.index << ' ' << format_double(s.level) << '\n';
        }
    }
}

StraceResult parse_strace_log(std::istream& in, const SyscallMap& map, std::uint64_t gap_us) {
    if (map.empty()) throw ParamError("empty syscall name map");
    StraceResult result;
    std::optional<double> first_abs;  // absolute clock of the first stamped line
    double clock_wrap = 0.0;
    double last_clock = -1.0;
    double relative_sum = 0.0;
    std::uint64_t last = 0;
    bool any = false;

    std::string raw;
    while (std::getline(in, raw)) {
        std::string_view text = trim(raw);
        if (text.empty()) continue;

        // `[pid  123] ` as written by -f
        if (text.starts_with("[pid")) {
            const auto close = text.find(']');
            if (close == std::string_view::npos) {
                ++result.skipped_lines;
                continue;
            }
            text = trim(text.substr(close + 1));
        }

        std::optional<Stamp> stamp;
        for (int guard = 0; guard < 2 && !text.empty() && !is_ident_start(text.front()); ++guard) {
            const auto end = text.find_first_of(" \t");
            const auto tok = text.substr(0, end);
            if (auto s = parse_stamp(tok))
                stamp = s;
            else if (!to_u64(tok))
                break;  // neither pid nor time
            text = end == std::string_view::npos ? std::string_view{} : trim(text.substr(end));
        }

        std::size_t n = 0;
        while (n < text.size() && is_ident(text[n])) ++n;
        if (n == 0 || !is_ident_start(text.front()) || n >= text.size() || text[n] != '(') {
            ++result.skipped_lines;  // resumptions, signals, exits, noise
            continue;
        }
        const auto name = text.substr(0, n);

        std::uint64_t offset;
        if (stamp && stamp->clock) {
            if (stamp->seconds + clock_wrap < last_clock) clock_wrap += 86400.0;
            const double abs = stamp->seconds + clock_wrap;
            last_clock = abs;
            if (!first_abs) first_abs = abs;
            offset = static_cast<std::uint64_t>(std::llround((abs - *first_abs) * 1e6));
        } else if (stamp && stamp->seconds >= 1e5) {  // -ttt epoch seconds
            if (!first_abs) first_abs = stamp->seconds;
            offset = static_cast<std::uint64_t>(std::llround(std::max(0.0, stamp->seconds - *first_abs) * 1e6));
        } else if (stamp) {  // -r delta since the previous call
            relative_sum += stamp->seconds;
            offset = static_cast<std::uint64_t>(std::llround(relative_sum * 1e6));
        } else {
            offset = any ? last + gap_us : 0;
        }
        offset = std::max(offset, last);

        const auto number = map.number(name);
        if (!number) {
            ++result.skipped_names[std::string(name)];
            continue;
        }
        result.events.push_back(ReplayEvent{offset, Antigen{*number}});
        last = offset;
        any = true;
    }
    return result;
}

StraceResult load_strace_log(const std::string& path, const SyscallMap& map, std::uint64_t gap_us) {
    if (map.empty()) throw ParamError("empty syscall name map");
    std::ifstream in(path);
    if (!in) throw Error("cannot open strace log '" + path + "'");
    return parse_strace_log(in, map, gap_us);
}

std::size_t replay_events(const std::vector<ReplayEvent>& events, double rate, const ReplaySend& send) {
    if (!(rate > 0)) throw ParamError("replay rate must be > 0");
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto base = events.empty() ? 0 : events.front().offset_us;
    std::size_t sent = 0;
    for (const auto& ev : events) {
        if (!std::isinf(rate)) {
            const double wait_us = double(ev.offset_us - base) / rate;
            std::this_thread::sleep_until(start + std::chrono::microseconds(std::llround(wait_us)));
        }
        try {
            send(ev);
        } catch (const TransportError& e) {
            throw ReplayAborted(sent, e.what());
        }
        ++sent;
    }
    return sent;
}

std::size_t replay_to_server(const std::vector<ReplayEvent>& events, double rate, const std::string& address) {
    auto antigen = Client::connect(address, Role::antigen);
    auto signal = Client::connect(address, Role::signal);
    return replay_events(events, rate, [&](const ReplayEvent& ev) {
        if (const auto* a = std::get_if<Antigen>(&ev.payload))
            antigen.send_antigen(a->value);
        else {
            const auto& s = std::get<SignalUpdate>(ev.payload);
            signal.send_signal(static_cast<std::uint32_t>(s.index), s.level);
        }
    });
}

}  // namespace tissue
