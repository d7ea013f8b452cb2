#include "tissue/tissue.hpp"

#include "tissue/error.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <thread>

namespace tissue {

void CycleContext::respond(Antigen value) const { tissue.emit_response(index, value); }

void ingest_antigen(Compartment& tissue, Antigen antigen) {
    for (std::uint32_t copy = 0; copy < tissue.params.antigen_multiplier; ++copy) {
        auto& slot = tissue.antigen_store[tissue.rng.index(tissue.antigen_store.size())];
        if (slot) tissue.record(AntigenEventKind::tissue_overwritten, *slot);
        slot = StoredAntigen{antigen, tissue.next_serial++};
        tissue.record(AntigenEventKind::created, *slot);
    }
}

void set_tissue_signal(Compartment& tissue, std::size_t index, double level) {
    if (index >= tissue.signals.size())
        throw std::out_of_range("signal index " + std::to_string(index) + " outside store of " +
                                std::to_string(tissue.signals.size()));
    tissue.signals[index] = level;
}

Tissue::Tissue(const TissueParams& params) : compartment_(params) {}

void Tissue::register_cell_type(CellType type, CycleFn cycle) { behaviours_[type] = std::move(cycle); }

std::size_t Tissue::add_cell(const CellSpec& spec) {
    if (!behaviours_.contains(spec.type))
        throw ParamError("unknown cell type " + std::to_string(tag_of(spec.type)));
    if (compartment_.live_cells() >= compartment_.cells.size())
        throw ParamError("cell store full (max_cells=" + std::to_string(compartment_.params.max_cells) + ")");
    return compartment_.add_cell(
        make_cell(spec, compartment_.params.antigen_alphabet, compartment_.signals.size(), compartment_.rng));
}

void Tissue::emit_response(std::size_t cell, Antigen value) {
    const auto& c = compartment_.cells.at(cell);
    if (!c || c->response_producers == 0)
        throw Error("cell " + std::to_string(cell) + " has no response producer");
    ResponseRecord record{compartment_.tick_count, cell, value};
    responses_.push_back(record);
    if (sink_) sink_(record);
}

void Tissue::drain_queue() {
    for (const auto& s : queue_->drain()) {
        if (const auto* a = std::get_if<Antigen>(&s)) {
            if (a->value >= compartment_.params.antigen_alphabet) {
                ++compartment_.counters.rejected_antigen;
                continue;
            }
            ingest_antigen(compartment_, *a);
        } else {
            const auto& sig = std::get<SignalUpdate>(s);
            if (sig.index >= compartment_.signals.size()) {
                ++compartment_.counters.rejected_signals;
                continue;
            }
            compartment_.signals[sig.index] = sig.level;
        }
    }
}

void Tissue::tick() {
    auto& c = compartment_;
    drain_queue();

    order_.clear();
    for (std::size_t i = 0; i < c.cells.size(); ++i)
        if (c.cells[i]) order_.push_back(i);
    std::shuffle(order_.begin(), order_.end(), c.rng.engine());

    for (auto i : order_) {
        auto& cell = *c.cells[i];
        update_antigen_receptors(cell, i, c);
        update_cytokine_receptors(cell, c);
        update_cell_receptors(cell, i, c);
        cell.matches = match_vr_receptors(cell, c, match_);
    }

    for (auto i : order_) {
        if (!c.cells[i]) continue;  // removed by an earlier callback
        auto it = behaviours_.find(c.cells[i]->type);
        if (it == behaviours_.end() || !it->second) continue;
        CycleContext ctx{*this, c, *c.cells[i], i};
        try {
            it->second(ctx);
        } catch (const std::exception& e) {
            throw TickError(i, std::string("cycle callback failed: ") + e.what());
        }
    }

    for (auto i : order_)
        if (c.cells[i]) present_antigen(*c.cells[i], i, c);
    for (auto i : order_)
        if (c.cells[i]) emit_cytokine(*c.cells[i], c);

    ++c.tick_count;
}

ProbeSample Tissue::sample_probe(const ProbeFn& probe, std::uint64_t wall_us) const {
    ProbeSample s;
    s.tick = compartment_.tick_count;
    s.wall_us = wall_us;
    try {
        s.fields = probe(compartment_);
    } catch (const std::exception& e) {
        s.fields.clear();
        s.error = e.what();
    }
    return s;
}

void Tissue::run(const RunOptions& opt) {
    using clock = std::chrono::steady_clock;
    const auto rate = compartment_.params.cell_update_rate;
    const auto probe_rate = compartment_.params.probe_rate;
    const auto start = clock::now();
    const auto first_tick = compartment_.tick_count;

    for (std::uint64_t n = 0; !opt.ticks || n < *opt.ticks; ++n) {
        if (opt.stop.stop_requested()) break;
        if (opt.mode == RunMode::realtime) {
            std::this_thread::sleep_until(start + std::chrono::microseconds(n * rate));
            if (opt.stop.stop_requested()) break;
        }
        if (opt.before_tick) {
            opt.before_tick(*this, compartment_.tick_count);
            if (opt.stop.stop_requested()) break;
        }
        tick();

        if (!opt.probe) continue;
        // sample whenever virtual time crosses a probe_rate boundary
        const auto t_prev = (compartment_.tick_count - 1) * rate;
        const auto t_now = compartment_.tick_count * rate;
        if (t_now / probe_rate == t_prev / probe_rate) continue;
        const auto wall = opt.mode == RunMode::realtime
                              ? static_cast<std::uint64_t>(
                                    std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - start).count())
                              : (compartment_.tick_count - first_tick) * rate;
        auto sample = sample_probe(opt.probe, wall);
        if (opt.on_probe) opt.on_probe(sample);
    }
}

}  // namespace tissue
