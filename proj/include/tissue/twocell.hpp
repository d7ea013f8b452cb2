#pragma once

#include "tissue/probe.hpp"
#include "tissue/replay.hpp"
#include "tissue/tissue.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tissue {

inline constexpr CellType type1 = cell_type(1);
inline constexpr CellType type2 = cell_type(2);

/// Action time a signal-driven producer starts from and resets to.
inline constexpr std::uint32_t signal_action_time = 100;

struct TwocellConfig {
    std::uint32_t num_cells_1 = 50;
    std::uint32_t num_antigen_1 = 100;
    std::uint32_t num_antigen_receptors_1 = 10;
    std::uint32_t num_antigen_producers_1 = 10;
    std::uint32_t antigen_producer_action_time = 10;
    std::uint32_t num_cells_2 = 50;
    std::uint32_t cell_lifespan_2 = 100;
    std::uint32_t num_cell_receptors_2 = 2;
    std::uint32_t num_vr_receptors_2 = 20;
    std::uint32_t num_response_producers_2 = 1;
    bool signal_enabled = false;
    std::uint32_t cpu_signal = 0;  // tissue signal read by the Type 1 cytokine receptor
    TissueParams tissue;

    friend bool operator==(const TwocellConfig&, const TwocellConfig&) = default;
};

/// Throws ParamError for zero counts, a zero lifespan, a population that
/// does not fit max_cells or a cpu_signal outside the signal store.
TwocellConfig validate_config(const TwocellConfig& raw);

/// key=value file holding the twocell keys, `signal_enabled=0|1`,
/// `cpu_signal` and any tissue key. Unknown keys are errors.
TwocellConfig parse_twocell_config(std::istream& in);
TwocellConfig load_twocell_config(const std::string& path);
void write_twocell_config(std::ostream& out, const TwocellConfig& config);

struct ActionTimeState {
    std::uint32_t current = signal_action_time;
    double previous_signal = 0.0;

    friend bool operator==(const ActionTimeState&, const ActionTimeState&) = default;
};

/// Same signal keeps the action time, a drop halves it (floor, never
/// below 1), a rise resets it to 100.
ActionTimeState update_action_time(ActionTimeState state, double new_signal) noexcept;

/// A populated tissue with the Type 1 and Type 2 behaviours registered.
class Twocell {
public:
    explicit Twocell(const TwocellConfig& config);
    Twocell(const Twocell&) = delete;
    Twocell& operator=(const Twocell&) = delete;

    Tissue& tissue() noexcept { return tissue_; }
    const Tissue& tissue() const noexcept { return tissue_; }
    const TwocellConfig& config() const noexcept { return config_; }

    const std::vector<std::size_t>& type1_cells() const noexcept { return type1_; }
    const std::vector<std::size_t>& type2_cells() const noexcept { return type2_; }

    /// Signal-driven state of a Type 1 cell (unset when signals are off).
    std::optional<ActionTimeState> action_state(std::size_t cell) const;

    /// Mean action_time over all Type 1 producers right now.
    double mean_action_time() const;

private:
    void type1_cycle(CycleContext& ctx);
    void type2_cycle(CycleContext& ctx);

    TwocellConfig config_;
    Tissue tissue_;
    std::vector<std::size_t> type1_;
    std::vector<std::size_t> type2_;
    std::vector<ActionTimeState> action_;  // indexed by cell-store slot
};

/// Probe of the Type 2 repertoire: `locks` lists every VR lock cell by cell
/// (store order), `cytokine` each Type 2 cell's match count.
ProbeFn lock_probe(const Twocell& model);

/// Probe of input and output levels: signal level, mean Type 1 action
/// time, stored antigen, responses so far.
ProbeFn activity_probe(const Twocell& model);

struct ExperimentOptions {
    RunMode mode = RunMode::virtual_time;
    std::uint32_t repeats = 1;
    double rate = 1.0;                  // replay speed-up; unlimited_rate in virtual mode sends at lead-in
    std::uint64_t lead_in_us = 0;       // realtime scripts use 10 s
    std::uint64_t tail_us = 60000000;   // run on after the last event
    bool record_locks = false;          // add the lock probe to the probe log
    std::string address = "127.0.0.1:0";  // realtime server address
};

struct RunResult {
    std::uint32_t run = 0;
    std::uint64_t seed = 0;
    std::uint64_t ticks = 0;
    std::vector<ResponseRecord> responses;
    std::vector<ProbeSample> probes;
    /// Average over ticks of the mean Type 1 producer action time.
    double mean_action_time = 0.0;
    std::optional<std::string> error;
};

/// Seed of run `i`, derived from the configured seed.
std::uint64_t run_seed(std::uint64_t base, std::uint32_t run) noexcept;

/// Tick on which a virtual-time run ingests an event.
std::uint64_t arrival_tick(std::uint64_t offset_us, double rate, std::uint64_t lead_in_us, std::uint64_t tick_us);

/// Number of ticks an experiment over `events` runs for.
std::uint64_t experiment_ticks(const std::vector<ReplayEvent>& events, const ExperimentOptions& options,
                               std::uint64_t tick_us);

/// One full run with an explicit seed. Throws on failure.
RunResult run_once(const TwocellConfig& config, const std::vector<ReplayEvent>& events,
                   const ExperimentOptions& options, std::uint64_t seed);

/// `repeats` runs with derived seeds. A failing run is recorded in its
/// result and the remaining runs still execute.
std::vector<RunResult> run_experiment(const TwocellConfig& config, const std::vector<ReplayEvent>& events,
                                      const ExperimentOptions& options);

}  // namespace tissue
