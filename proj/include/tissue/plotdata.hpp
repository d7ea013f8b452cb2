#pragma once

#include "tissue/probe.hpp"
#include "tissue/replay.hpp"
#include "tissue/response.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tissue {

/// A numeric table destined for CSV.
struct Series {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_series_csv(std::ostream& out, const Series& series);

/// Counts per bin of width bin_us; times past the last bin are dropped.
std::vector<double> bin_counts(const std::vector<std::uint64_t>& times_us, std::uint64_t bin_us, std::size_t bins);

/// How a run's ticks map onto the dataset clock.
struct SeriesTiming {
    std::uint64_t tick_us = 100000;
    double rate = 1.0;
    std::uint64_t lead_in_us = 0;
    std::uint64_t bin_us = 1000000;
    std::optional<std::uint64_t> ticks;  // run length; otherwise the last event decides
};

/// `time_s,input_rate,response_rate` per bin. Inputs are placed on the tick
/// they were ingested on, so both columns share one clock.
Series response_rate_series(const std::vector<ReplayEvent>& events, const std::vector<ResponseRecord>& responses,
                            const SeriesTiming& timing);

/// `time_s,syscall,receptors,responded` for every lock value expressed in
/// each lock-probe sample.
Series vr_lock_series(const std::vector<ProbeSample>& probes, std::uint64_t tick_us,
                      const std::set<std::uint32_t>& responded);

/// `time_s,signal_rate,fixed_rate`: response counts per bin averaged over
/// the runs of each variant.
Series signal_compare_series(const std::vector<std::vector<ResponseRecord>>& with_signal,
                             const std::vector<std::vector<ResponseRecord>>& fixed, std::uint64_t tick_us,
                             std::uint64_t bin_us);

/// Mean over runs of (last response tick - first response tick); a run
/// without responses contributes 0.
double total_response_duration(const std::vector<std::vector<ResponseRecord>>& runs);

}  // namespace tissue
