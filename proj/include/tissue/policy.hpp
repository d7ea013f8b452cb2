#pragma once

#include "tissue/response.hpp"
#include "tissue/syscalls.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tissue {

enum class Provenance { naive, generated, merged };

std::string_view provenance_name(Provenance p) noexcept;
std::optional<Provenance> parse_provenance(std::string_view s) noexcept;

/// Deny-by-default permit list.
struct Policy {
    std::set<std::uint32_t> permitted;
    Provenance provenance = Provenance::generated;

    bool permits(std::uint32_t syscall) const { return permitted.contains(syscall); }

    friend bool operator==(const Policy&, const Policy&) = default;
};

/// Every syscall seen in normal traces.
Policy naive_policy(const std::vector<std::vector<std::uint32_t>>& traces);

/// Every syscall a run responded to.
Policy policy_from_responses(const std::vector<ResponseRecord>& responses);

/// Union. Throws ParamError for an empty list.
Policy merge_policies(const std::vector<Policy>& policies);

/// `# provenance <name>` header then sorted `permit <n> # <name>` lines.
/// Numbers the map does not know get no comment.
void write_policy(std::ostream& out, const Policy& policy, const SyscallMap& names);
Policy parse_policy(std::istream& in);
Policy load_policy(const std::string& path);

struct SyscallStats {
    double mean = 0.0;
    double sd = 0.0;                 // sample standard deviation
    std::optional<std::int64_t> cv;  // round(100 sd / mean); unset when mean is 0
};

/// cv as reported in the stats table.
std::optional<std::int64_t> coefficient_of_variation(double mean, double sd) noexcept;

/// Per-syscall response counts of each run. A syscall missing from a run
/// counts as 0 in that run. `universe` adds syscalls that may never have
/// been responded to.
using RunCounts = std::map<std::uint32_t, std::uint64_t>;
RunCounts count_responses(const std::vector<ResponseRecord>& responses);
std::map<std::uint32_t, SyscallStats> response_stats(const std::vector<RunCounts>& runs,
                                                     const std::set<std::uint32_t>& universe = {});

enum class Tag { normal, attack };

struct LabeledEvent {
    std::uint64_t offset_us = 0;
    std::uint32_t syscall = 0;
    Tag tag = Tag::normal;

    friend bool operator==(const LabeledEvent&, const LabeledEvent&) = default;
};

struct LabeledTrace {
    std::string source;  // normal, success or failure
    std::vector<LabeledEvent> events;

    friend bool operator==(const LabeledTrace&, const LabeledTrace&) = default;
};

/// Label file CSV: `# source <label>` then `offset_us,syscall,tag`.
void write_label_file(std::ostream& out, const LabeledTrace& trace);
LabeledTrace parse_label_file(std::istream& in);
LabeledTrace load_label_file(const std::string& path);

/// Integer percentages, truncated toward zero.
struct PolicyReport {
    std::int64_t permit_pct = 0;
    std::int64_t deny_pct = 0;
    std::int64_t normal_pct = 0;  // share of the trace tagged normal
    std::int64_t attack_pct = 0;
    std::int64_t normal_permit_pct = 0;  // of normal events, permitted
    std::int64_t attack_deny_pct = 0;    // of attack events, denied

    friend bool operator==(const PolicyReport&, const PolicyReport&) = default;
};

/// Throws ParamError for an empty trace.
PolicyReport evaluate_policy(const Policy& policy, const LabeledTrace& trace);

/// `dataset,policy,permit_pct,deny_pct,normal_pct,attack_pct`.
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, std::string_view dataset, std::string_view policy, const PolicyReport& r);

/// Spearman rank correlation with average ranks for ties. NaN when either
/// side is constant or fewer than two pairs are given.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson correlation of x[t] with y[t + lag] over the overlap, for every
/// lag in [-max_lag, max_lag]. Index i of the result is lag i - max_lag.
std::vector<double> cross_correlation(const std::vector<double>& x, const std::vector<double>& y, std::size_t max_lag);

}  // namespace tissue
