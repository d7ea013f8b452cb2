#include "tissue/dataset.hpp"

#include "tissue/error.hpp"
#include "tissue/rng.hpp"
#include "tissue/syscalls.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tissue {

std::string_view label_name(ScenarioLabel l) noexcept {
    switch (l) {
        case ScenarioLabel::normal: return "normal";
        case ScenarioLabel::success: return "success";
        case ScenarioLabel::failure: return "failure";
    }
    return "normal";
}

std::optional<ScenarioLabel> parse_label(std::string_view s) noexcept {
    if (s == "normal") return ScenarioLabel::normal;
    if (s == "success") return ScenarioLabel::success;
    if (s == "failure") return ScenarioLabel::failure;
    return std::nullopt;
}

void validate_scenario(const ScenarioSpec& s) {
    const auto check_weights = [](const std::vector<WeightedSyscall>& w, const char* what) {
        for (const auto& x : w)
            if (!(x.weight > 0) || !std::isfinite(x.weight))
                throw ParamError(std::string(what) + ": weight of syscall " + std::to_string(x.number) +
                                 " must be positive");
    };
    check_weights(s.normal_weights, "normal weights");
    check_weights(s.attack_weights, "attack weights");
    if (!(s.attack_fraction >= 0.0 && s.attack_fraction <= 1.0))
        throw ParamError("attack_fraction must lie in [0, 1]");
    if (s.events > 0 && s.attack_fraction < 1.0 && s.normal_weights.empty())
        throw ParamError("no normal syscall weights");
    if (s.events > 0 && s.attack_fraction > 0.0 && s.attack_weights.empty())
        throw ParamError("attack segment requested without attack syscall weights");
    if (s.span_us == 0) throw ParamError("span_us must be > 0");
    for (const auto& b : s.bursts)
        if (b.end_us <= b.start_us || b.end_us > s.span_us)
            throw ParamError("burst [" + std::to_string(b.start_us) + ", " + std::to_string(b.end_us) +
                             ") is empty or outside the span");
    for (std::size_t i = 0; i < s.cpu_profile.size(); ++i) {
        if (!std::isfinite(s.cpu_profile[i].level)) throw ParamError("cpu level must be finite");
        if (i && s.cpu_profile[i].start_us <= s.cpu_profile[i - 1].start_us)
            throw ParamError("cpu profile steps must be in increasing time order");
    }
}

std::vector<CpuStep> burst_cpu_profile(const std::vector<Burst>& bursts, std::uint64_t span_us, double idle,
                                       double start, double step, double peak) {
    std::vector<CpuStep> out;
    double level = idle;
    for (std::uint64_t t = 0; t <= span_us; t += 1000000) {
        const auto in = std::find_if(bursts.begin(), bursts.end(),
                                     [&](const Burst& b) { return b.start_us <= t && t < b.end_us; });
        if (in != bursts.end()) {
            const auto k = (t - in->start_us) / 1000000;
            level = std::min(peak, start + step * double(k));
        } else {
            level = std::max(idle, level * 0.5);
        }
        if (out.empty() || out.back().level != level) out.push_back({t, level});
    }
    return out;
}

ScenarioSpec preset_scenario(ScenarioLabel label, std::uint64_t seed, std::uint64_t events) {
    ScenarioSpec s;
    s.label = label;
    s.seed = seed;
    s.events = events;
    for (const auto& sc : normal_syscalls()) s.normal_weights.push_back({sc.number, double(sc.normal_freq)});
    // Mostly rare-but-legal calls (process setup, sockets) plus calls only an
    // exploit makes.
    s.attack_weights = {
        {11, 8}, {2, 8}, {66, 6}, {12, 6}, {136, 6}, {309, 6}, {303, 8}, {301, 8}, {4, 10}, {3, 8}, {311, 7},
        {312, 6}, {63, 2}, {23, 1}, {24, 1}, {46, 1}, {42, 1}, {7, 1}, {37, 1}, {15, 1}, {10, 1}, {175, 1},
        {162, 1}, {190, 1},
    };
    s.attack_fraction = label == ScenarioLabel::success ? 0.76 : label == ScenarioLabel::failure ? 0.18 : 0.0;
    s.span_us = 60000000;
    s.bursts = {{3000000, 15000000}, {23000000, 35000000}, {43000000, 55000000}};
    s.cpu_profile = burst_cpu_profile(s.bursts, s.span_us);
    return s;
}

namespace {

std::discrete_distribution<std::size_t> weights_of(const std::vector<WeightedSyscall>& w) {
    std::vector<double> v;
    for (const auto& x : w) v.push_back(x.weight);
    return {v.begin(), v.end()};
}

}  // namespace

Dataset generate_dataset(const ScenarioSpec& spec) {
    validate_scenario(spec);
    Rng rng(spec.seed);
    auto& gen = rng.engine();

    std::vector<Burst> windows = spec.bursts;
    if (windows.empty()) windows.push_back({0, spec.span_us});
    std::vector<double> lengths;
    for (const auto& b : windows) lengths.push_back(double(b.end_us - b.start_us));
    std::discrete_distribution<std::size_t> pick_window(lengths.begin(), lengths.end());

    std::vector<std::uint64_t> times(spec.events);
    for (auto& t : times) {
        const auto& b = windows[pick_window(gen)];
        t = std::uniform_int_distribution<std::uint64_t>(b.start_us, b.end_us - 1)(gen);
    }
    std::sort(times.begin(), times.end());

    const auto n_attack = static_cast<std::uint64_t>(std::llround(spec.attack_fraction * double(spec.events)));
    const auto attack_begin = (spec.events - n_attack) / 2;
    auto normal = weights_of(spec.normal_weights);
    auto attack = weights_of(spec.attack_weights);

    Dataset d;
    d.labels.source = std::string(label_name(spec.label));
    for (std::uint64_t i = 0; i < spec.events; ++i) {
        const bool is_attack = i >= attack_begin && i < attack_begin + n_attack;
        const auto number = is_attack ? spec.attack_weights[attack(gen)].number : spec.normal_weights[normal(gen)].number;
        d.labels.events.push_back({times[i], number, is_attack ? Tag::attack : Tag::normal});
    }

    if (spec.events == 0) return d;

    std::size_t step = 0;
    std::size_t next = 0;
    const auto emit_antigen_until = [&](std::uint64_t t) {
        for (; next < d.labels.events.size() && d.labels.events[next].offset_us < t; ++next)
            d.events.push_back({d.labels.events[next].offset_us, Antigen{d.labels.events[next].syscall}});
    };
    if (!spec.cpu_profile.empty()) {
        for (std::uint64_t t = 0; t <= spec.span_us; t += 1000000) {
            while (step + 1 < spec.cpu_profile.size() && spec.cpu_profile[step + 1].start_us <= t) ++step;
            emit_antigen_until(t);
            if (spec.cpu_profile[step].start_us <= t)
                d.events.push_back({t, SignalUpdate{spec.cpu_signal, spec.cpu_profile[step].level}});
        }
    }
    emit_antigen_until(UINT64_MAX);
    return d;
}

}  // namespace tissue
