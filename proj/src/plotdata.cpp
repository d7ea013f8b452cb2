#include "tissue/plotdata.hpp"

#include "tissue/error.hpp"
#include "tissue/text.hpp"
#include "tissue/twocell.hpp"

#include <algorithm>
#include <map>
#include <ostream>

namespace tissue {

void write_series_csv(std::ostream& out, const Series& s) {
    for (std::size_t i = 0; i < s.columns.size(); ++i) out << (i ? "," : "") << s.columns[i];
    out << '\n';
    for (const auto& row : s.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

std::vector<double> bin_counts(const std::vector<std::uint64_t>& times_us, std::uint64_t bin_us, std::size_t bins) {
    if (bin_us == 0) throw ParamError("bin width must be > 0");
    std::vector<double> out(bins, 0.0);
    for (auto t : times_us)
        if (t / bin_us < bins) out[t / bin_us] += 1.0;
    return out;
}

namespace {

std::size_t bins_for(std::uint64_t span_us, std::uint64_t bin_us) { return std::size_t(span_us / bin_us + 1); }

}  // namespace

Series response_rate_series(const std::vector<ReplayEvent>& events, const std::vector<ResponseRecord>& responses,
                            const SeriesTiming& t) {
    if (t.tick_us == 0 || t.bin_us == 0) throw ParamError("tick and bin widths must be > 0");
    std::vector<std::uint64_t> in, out;
    for (const auto& e : events)
        if (std::holds_alternative<Antigen>(e.payload))
            in.push_back(arrival_tick(e.offset_us, t.rate, t.lead_in_us, t.tick_us) * t.tick_us);
    for (const auto& r : responses) out.push_back(r.tick * t.tick_us);

    std::uint64_t span = 0;
    if (t.ticks && *t.ticks > 0)
        span = (*t.ticks - 1) * t.tick_us;
    else {
        if (!in.empty()) span = std::max(span, in.back());
        if (!out.empty()) span = std::max(span, *std::max_element(out.begin(), out.end()));
    }
    const auto bins = bins_for(span, t.bin_us);
    const auto a = bin_counts(in, t.bin_us, bins);
    const auto b = bin_counts(out, t.bin_us, bins);
    const double per_s = 1e6 / double(t.bin_us);

    Series s{{"time_s", "input_rate", "response_rate"}, {}};
    for (std::size_t i = 0; i < bins; ++i)
        s.rows.push_back({double(i * t.bin_us) / 1e6, a[i] * per_s, b[i] * per_s});
    return s;
}

Series vr_lock_series(const std::vector<ProbeSample>& probes, std::uint64_t tick_us,
                      const std::set<std::uint32_t>& responded) {
    Series s{{"time_s", "syscall", "receptors", "responded"}, {}};
    bool any = false;
    for (const auto& p : probes) {
        const auto* v = p.find("locks");
        if (!v) continue;
        any = true;
        std::map<std::uint32_t, std::uint64_t> expressed;
        for (double lock : std::get<std::vector<double>>(*v)) ++expressed[static_cast<std::uint32_t>(lock)];
        const double time_s = double(p.tick * tick_us) / 1e6;
        for (const auto& [value, n] : expressed)
            s.rows.push_back({time_s, double(value), double(n), responded.contains(value) ? 1.0 : 0.0});
    }
    if (!probes.empty() && !any) throw ParamError("probe log has no 'locks' column (run with lock recording)");
    return s;
}

namespace {

std::vector<double> mean_rate(const std::vector<std::vector<ResponseRecord>>& runs, std::uint64_t tick_us,
                              std::uint64_t bin_us, std::size_t bins) {
    std::vector<double> sum(bins, 0.0);
    for (const auto& run : runs) {
        std::vector<std::uint64_t> times;
        for (const auto& r : run) times.push_back(r.tick * tick_us);
        const auto c = bin_counts(times, bin_us, bins);
        for (std::size_t i = 0; i < bins; ++i) sum[i] += c[i];
    }
    const double per_s = 1e6 / double(bin_us);
    if (!runs.empty())
        for (auto& x : sum) x = x / double(runs.size()) * per_s;
    return sum;
}

}  // namespace

Series signal_compare_series(const std::vector<std::vector<ResponseRecord>>& with_signal,
                             const std::vector<std::vector<ResponseRecord>>& fixed, std::uint64_t tick_us,
                             std::uint64_t bin_us) {
    if (tick_us == 0 || bin_us == 0) throw ParamError("tick and bin widths must be > 0");
    std::uint64_t last = 0;
    for (const auto* set : {&with_signal, &fixed})
        for (const auto& run : *set)
            for (const auto& r : run) last = std::max(last, r.tick * tick_us);
    const auto bins = bins_for(last, bin_us);
    const auto a = mean_rate(with_signal, tick_us, bin_us, bins);
    const auto b = mean_rate(fixed, tick_us, bin_us, bins);
    Series s{{"time_s", "signal_rate", "fixed_rate"}, {}};
    for (std::size_t i = 0; i < bins; ++i) s.rows.push_back({double(i * bin_us) / 1e6, a[i], b[i]});
    return s;
}

double total_response_duration(const std::vector<std::vector<ResponseRecord>>& runs) {
    if (runs.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& run : runs) {
        if (run.empty()) continue;
        const auto [lo, hi] = std::minmax_element(run.begin(), run.end(),
                                                  [](const auto& a, const auto& b) { return a.tick < b.tick; });
        sum += double(hi->tick - lo->tick);
    }
    return sum / double(runs.size());
}

}  // namespace tissue
