#pragma once

#include "tissue/error.hpp"
#include "tissue/ingest_queue.hpp"
#include "tissue/syscalls.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace tissue {

struct ReplayEvent {
    std::uint64_t offset_us = 0;  // from session start
    Submission payload;

    friend bool operator==(const ReplayEvent&, const ReplayEvent&) = default;
};

/// Replay log: one event per line, `<offset_us> A <u32>` or
/// `<offset_us> S <index> <level>`. `#` starts a comment line. Offsets must
/// not decrease. Throws ParseError with the line number.
std::vector<ReplayEvent> parse_replay_log(std::istream& in);
std::vector<ReplayEvent> load_replay_log(const std::string& path);
void write_replay_log(std::ostream& out, const std::vector<ReplayEvent>& events);

struct StraceResult {
    std::vector<ReplayEvent> events;
    std::map<std::string, std::uint64_t> skipped_names;  // unmapped syscall -> occurrences
    std::uint64_t skipped_lines = 0;  // resumptions, signals, exits, noise
};

/// Reads `name(args) = ret` lines, optionally prefixed by `[pid N]` or a
/// bare pid and by a `-t`/`-tt` clock time, a `-ttt` epoch time or a `-r`
/// relative delta. Lines without timestamps are spaced `gap_us` apart.
/// Throws ParamError for an empty map.
StraceResult parse_strace_log(std::istream& in, const SyscallMap& map, std::uint64_t gap_us = 1000);
StraceResult load_strace_log(const std::string& path, const SyscallMap& map, std::uint64_t gap_us = 1000);

/// Sends as fast as possible; for servers running in virtual time.
inline constexpr double unlimited_rate = std::numeric_limits<double>::infinity();

/// A replay aborted by the transport; `sent()` events made it out.
class ReplayAborted : public TransportError {
public:
    ReplayAborted(std::size_t sent, const std::string& what)
        : TransportError(what + " (after " + std::to_string(sent) + " events)"), sent_(sent) {}

    std::size_t sent() const noexcept { return sent_; }

private:
    std::size_t sent_;
};

using ReplaySend = std::function<void(const ReplayEvent&)>;

/// Sends event i at wall time offset_i / rate after the call, in order.
/// rate must be > 0 (unlimited_rate sends back to back). A TransportError
/// from `send` becomes ReplayAborted. Returns the number of events sent.
std::size_t replay_events(const std::vector<ReplayEvent>& events, double rate, const ReplaySend& send);

/// Opens an antigen session and a signal session to `address` and replays.
std::size_t replay_to_server(const std::vector<ReplayEvent>& events, double rate, const std::string& address);

}  // namespace tissue
