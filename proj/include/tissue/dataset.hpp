#pragma once

#include "tissue/policy.hpp"
#include "tissue/replay.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tissue {

enum class ScenarioLabel { normal, success, failure };

std::string_view label_name(ScenarioLabel l) noexcept;
std::optional<ScenarioLabel> parse_label(std::string_view s) noexcept;

struct WeightedSyscall {
    std::uint32_t number = 0;
    double weight = 0.0;
};

/// Signal level from `start_us` until the next step.
struct CpuStep {
    std::uint64_t start_us = 0;
    double level = 0.0;
};

/// Time window in which events are placed.
struct Burst {
    std::uint64_t start_us = 0;
    std::uint64_t end_us = 0;
};

struct ScenarioSpec {
    ScenarioLabel label = ScenarioLabel::normal;
    std::vector<WeightedSyscall> normal_weights;
    std::vector<WeightedSyscall> attack_weights;  // used inside the attack segment only
    double attack_fraction = 0.0;                 // share of events in the attack segment
    std::uint64_t events = 1000;
    std::uint64_t span_us = 60000000;
    std::vector<Burst> bursts;          // whole span when empty
    std::vector<CpuStep> cpu_profile;   // sampled once per second; no signal events when empty
    std::uint32_t cpu_signal = 0;
    std::uint64_t seed = 1;
};

/// Throws ParamError naming the first bad field.
void validate_scenario(const ScenarioSpec& spec);

/// Normal traffic weighted by the reference frequencies, three activity
/// bursts over a 60 s span, and a CPU profile that climbs during each
/// burst and falls in halving steps afterwards. `success` puts ~76% of
/// events in the attack segment, `failure` ~18%.
ScenarioSpec preset_scenario(ScenarioLabel label, std::uint64_t seed, std::uint64_t events = 1000);

/// CPU levels stepping up once per second inside bursts and halving once
/// per second after them, down to `idle`.
std::vector<CpuStep> burst_cpu_profile(const std::vector<Burst>& bursts, std::uint64_t span_us, double idle = 0.05,
                                       double start = 0.3, double step = 0.1, double peak = 0.9);

struct Dataset {
    std::vector<ReplayEvent> events;  // antigen and signal events, offset order
    LabeledTrace labels;              // antigen events only
};

/// Deterministic for a given spec.
Dataset generate_dataset(const ScenarioSpec& spec);

}  // namespace tissue
