#include "tissue/twocell.hpp"

#include "tissue/error.hpp"
#include "tissue/net.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

namespace tissue {

TwocellConfig validate_config(const TwocellConfig& raw) {
    validate_params(raw.tissue);
    const auto positive = [](std::uint32_t v, const char* name) {
        if (v == 0) throw ParamError(std::string(name) + " must be >= 1");
    };
    positive(raw.num_cells_1, "num_cells_1");
    positive(raw.num_antigen_1, "num_antigen_1");
    positive(raw.num_antigen_receptors_1, "num_antigen_receptors_1");
    positive(raw.num_antigen_producers_1, "num_antigen_producers_1");
    positive(raw.antigen_producer_action_time, "antigen_producer_action_time");
    positive(raw.num_cells_2, "num_cells_2");
    positive(raw.cell_lifespan_2, "cell_lifespan_2");
    positive(raw.num_cell_receptors_2, "num_cell_receptors_2");
    positive(raw.num_vr_receptors_2, "num_vr_receptors_2");
    positive(raw.num_response_producers_2, "num_response_producers_2");
    if (std::uint64_t(raw.num_cells_1) + raw.num_cells_2 > raw.tissue.max_cells)
        throw ParamError("population of " + std::to_string(std::uint64_t(raw.num_cells_1) + raw.num_cells_2) +
                         " cells does not fit max_cells=" + std::to_string(raw.tissue.max_cells));
    if (raw.cpu_signal >= std::max<std::uint32_t>(1, raw.tissue.max_cytokines))
        throw ParamError("cpu_signal " + std::to_string(raw.cpu_signal) + " outside the signal store");
    return raw;
}

namespace {

struct Key {
    const char* name;
    std::uint32_t TwocellConfig::*field;
};

constexpr Key keys[] = {
    {"num_cells_1", &TwocellConfig::num_cells_1},
    {"num_antigen_1", &TwocellConfig::num_antigen_1},
    {"num_antigen_receptors_1", &TwocellConfig::num_antigen_receptors_1},
    {"num_antigen_producers_1", &TwocellConfig::num_antigen_producers_1},
    {"antigen_producer_action_time", &TwocellConfig::antigen_producer_action_time},
    {"num_cells_2", &TwocellConfig::num_cells_2},
    {"cell_lifespan_2", &TwocellConfig::cell_lifespan_2},
    {"num_cell_receptors_2", &TwocellConfig::num_cell_receptors_2},
    {"num_vr_receptors_2", &TwocellConfig::num_vr_receptors_2},
    {"num_response_producers_2", &TwocellConfig::num_response_producers_2},
    {"cpu_signal", &TwocellConfig::cpu_signal},
};

}  // namespace

TwocellConfig parse_twocell_config(std::istream& in) {
    TwocellConfig c;
    for (const auto& kv : read_key_values(in)) {
        if (kv.key == "signal_enabled") {
            if (kv.value != "0" && kv.value != "1")
                throw ParseError(kv.line, "signal_enabled: expected 0 or 1, got '" + kv.value + "'");
            c.signal_enabled = kv.value == "1";
            continue;
        }
        const auto* k = std::find_if(std::begin(keys), std::end(keys), [&](const Key& x) { return kv.key == x.name; });
        if (k != std::end(keys)) {
            c.*(k->field) = static_cast<std::uint32_t>(parse_unsigned(kv, UINT32_MAX));
            continue;
        }
        if (!apply_tissue_key(c.tissue, kv)) throw ParseError(kv.line, "unknown key '" + kv.key + "'");
    }
    return validate_config(c);
}

TwocellConfig load_twocell_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    return parse_twocell_config(in);
}

void write_twocell_config(std::ostream& out, const TwocellConfig& c) {
    for (const auto& k : keys) out << k.name << '=' << c.*(k.field) << '\n';
    out << "signal_enabled=" << (c.signal_enabled ? 1 : 0) << '\n';
    write_params(out, c.tissue);
}

ActionTimeState update_action_time(ActionTimeState state, double new_signal) noexcept {
    if (new_signal < state.previous_signal)
        state.current = std::max<std::uint32_t>(1, state.current / 2);
    else if (new_signal > state.previous_signal)
        state.current = signal_action_time;
    state.previous_signal = new_signal;
    return state;
}

Twocell::Twocell(const TwocellConfig& config) : config_(validate_config(config)), tissue_(config_.tissue) {
    tissue_.register_cell_type(type1, [this](CycleContext& ctx) { type1_cycle(ctx); });
    tissue_.register_cell_type(type2, [this](CycleContext& ctx) { type2_cycle(ctx); });

    CellSpec t1;
    t1.type = type1;
    t1.num_antigen = config_.num_antigen_1;
    t1.antigen_receptors = config_.num_antigen_receptors_1;
    t1.cytokine_receptors = {config_.cpu_signal};
    t1.antigen_producers = config_.num_antigen_producers_1;
    t1.action_time = config_.signal_enabled ? signal_action_time : config_.antigen_producer_action_time;

    CellSpec t2;
    t2.type = type2;
    t2.cell_receptors.assign(config_.num_cell_receptors_2, type1);
    t2.vr_receptors = config_.num_vr_receptors_2;
    t2.response_producers = config_.num_response_producers_2;
    t2.internal_cytokines = 1;

    for (std::uint32_t i = 0; i < config_.num_cells_1; ++i) type1_.push_back(tissue_.add_cell(t1));
    for (std::uint32_t i = 0; i < config_.num_cells_2; ++i) type2_.push_back(tissue_.add_cell(t2));
    if (config_.signal_enabled) action_.assign(tissue_.compartment().cells.size(), ActionTimeState{});
}

std::optional<ActionTimeState> Twocell::action_state(std::size_t cell) const {
    if (!config_.signal_enabled || cell >= action_.size()) return std::nullopt;
    return action_[cell];
}

double Twocell::mean_action_time() const {
    double sum = 0.0;
    std::size_t n = 0;
    const auto& cells = tissue_.compartment().cells;
    for (auto i : type1_) {
        if (!cells[i]) continue;
        for (const auto& p : cells[i]->antigen_producers) {
            sum += p.action_time;
            ++n;
        }
    }
    return n ? sum / double(n) : 0.0;
}

void Twocell::type1_cycle(CycleContext& ctx) {
    // Ingestion and display happen in the scheduler's receptor and producer
    // phases; the cycle only steers how long displays last.
    if (!config_.signal_enabled) return;
    auto& state = action_[ctx.index];
    state = update_action_time(state, ctx.cell.cytokine_receptors.front().level);
    for (auto& p : ctx.cell.antigen_producers) p.set_action_time(state.current);
}

void Twocell::type2_cycle(CycleContext& ctx) {
    auto& cell = ctx.cell;
    for (const auto& m : cell.matches) {
        ctx.respond(m.antigen);
        ++cell.internal_cytokines[0];
    }
    ++cell.age_since_randomise;
    if (cell.internal_cytokines[0] == 0 && cell.age_since_randomise >= config_.cell_lifespan_2) {
        randomise_locks(cell, ctx.compartment.params.antigen_alphabet, ctx.compartment.rng);
        cell.age_since_randomise = 0;
    }
}

ProbeFn lock_probe(const Twocell& model) {
    return [&model](const Compartment& c) {
        std::vector<double> locks;
        std::vector<double> cytokine;
        for (auto i : model.type2_cells()) {
            if (!c.cells[i]) continue;
            for (const auto& vr : c.cells[i]->vr_receptors) locks.push_back(vr.lock.value);
            cytokine.push_back(double(c.cells[i]->internal_cytokines[0]));
        }
        return std::vector<ProbeField>{{"locks", std::move(locks)}, {"cytokine", std::move(cytokine)}};
    };
}

ProbeFn activity_probe(const Twocell& model) {
    return [&model](const Compartment& c) {
        return std::vector<ProbeField>{
            {"cpu", c.signals[model.config().cpu_signal]},
            {"action_time", model.mean_action_time()},
            {"live_antigen", double(c.live_antigen())},
            {"responses", double(model.tissue().responses().size())},
        };
    };
}

std::uint64_t run_seed(std::uint64_t base, std::uint32_t run) noexcept { return mix_seed(base + run); }

std::uint64_t arrival_tick(std::uint64_t offset_us, double rate, std::uint64_t lead_in_us, std::uint64_t tick_us) {
    const double scaled = std::isinf(rate) ? 0.0 : std::floor(double(offset_us) / rate);
    return (lead_in_us + static_cast<std::uint64_t>(scaled)) / tick_us;
}

std::uint64_t experiment_ticks(const std::vector<ReplayEvent>& events, const ExperimentOptions& o,
                               std::uint64_t tick_us) {
    const auto tail = (o.tail_us + tick_us - 1) / tick_us;
    if (events.empty()) return (o.lead_in_us + tick_us - 1) / tick_us + tail;
    return arrival_tick(events.back().offset_us, o.rate, o.lead_in_us, tick_us) + 1 + tail;
}

RunResult run_once(const TwocellConfig& base, const std::vector<ReplayEvent>& events, const ExperimentOptions& o,
                   std::uint64_t seed) {
    if (!(o.rate > 0)) throw ParamError("replay rate must be > 0");
    auto config = base;
    config.tissue.rng_seed = seed;
    Twocell model(config);
    auto& tissue = model.tissue();
    const auto tick_us = config.tissue.cell_update_rate;

    RunResult result;
    result.seed = seed;
    result.ticks = experiment_ticks(events, o, tick_us);

    const auto activity = activity_probe(model);
    const auto locks = o.record_locks ? lock_probe(model) : ProbeFn{};
    RunOptions run;
    run.mode = o.mode;
    run.ticks = result.ticks;
    run.probe = [&](const Compartment& c) {
        auto fields = activity(c);
        if (locks) {
            auto more = locks(c);
            fields.insert(fields.end(), more.begin(), more.end());
        }
        return fields;
    };
    run.on_probe = [&](const ProbeSample& s) { result.probes.push_back(s); };

    double action_sum = 0.0;
    std::size_t next = 0;

    if (o.mode == RunMode::virtual_time) {
        run.before_tick = [&](Tissue& t, std::uint64_t tick) {
            while (next < events.size() && arrival_tick(events[next].offset_us, o.rate, o.lead_in_us, tick_us) <= tick)
                t.queue()->push(events[next++].payload);
            action_sum += model.mean_action_time();
        };
        tissue.run(run);
    } else {
        ServerOptions so;
        so.antigen_alphabet = config.tissue.antigen_alphabet;
        Server server(o.address, tissue.queue(), so);
        tissue.set_response_sink([&](const ResponseRecord& r) { server.publish(r); });
        run.before_tick = [&](Tissue&, std::uint64_t) { action_sum += model.mean_action_time(); };

        std::optional<std::string> replay_error;
        std::jthread replayer([&](std::stop_token stop) {
            const auto first = events.empty() ? 0.0 : double(events.front().offset_us) / o.rate;
            const auto wake = std::chrono::steady_clock::now() + std::chrono::microseconds(o.lead_in_us) +
                              std::chrono::microseconds(std::isinf(o.rate) ? 0 : std::llround(first));
            while (!stop.stop_requested() && std::chrono::steady_clock::now() < wake)
                std::this_thread::sleep_for(std::min<std::chrono::steady_clock::duration>(
                    wake - std::chrono::steady_clock::now(), std::chrono::milliseconds(50)));
            if (stop.stop_requested()) return;
            try {
                replay_to_server(events, o.rate, server.address());
            } catch (const std::exception& e) {
                replay_error = e.what();
            }
        });
        tissue.run(run);
        replayer.request_stop();
        replayer.join();
        server.stop();
        if (replay_error) throw TransportError("replay failed: " + *replay_error);
    }

    result.responses = tissue.responses();
    result.mean_action_time = result.ticks ? action_sum / double(result.ticks) : 0.0;
    return result;
}

std::vector<RunResult> run_experiment(const TwocellConfig& config, const std::vector<ReplayEvent>& events,
                                      const ExperimentOptions& o) {
    std::vector<RunResult> out;
    for (std::uint32_t i = 0; i < o.repeats; ++i) {
        const auto seed = run_seed(config.tissue.rng_seed, i);
        try {
            out.push_back(run_once(config, events, o, seed));
        } catch (const std::exception& e) {
            RunResult failed;
            failed.seed = seed;
            failed.error = e.what();
            out.push_back(std::move(failed));
        }
        out.back().run = i;
    }
    return out;
}

}  // namespace tissue
