#include "tissue/cell_dynamics.hpp"

#include <algorithm>

namespace tissue {

std::size_t update_antigen_receptors(Cell& cell, std::size_t cell_index, Compartment& tissue) {
    if (cell.antigen_store.empty()) return 0;
    std::size_t moved = 0;
    for (std::uint32_t r = 0; r < cell.antigen_receptors; ++r) {
        auto& source = tissue.antigen_store[tissue.rng.index(tissue.antigen_store.size())];
        if (!source) continue;
        auto& target = cell.antigen_store[tissue.rng.index(cell.antigen_store.size())];
        if (target) tissue.record(AntigenEventKind::cell_overwritten, *target, cell_index);
        target = *source;
        source.reset();
        tissue.record(AntigenEventKind::transferred, *target, cell_index);
        ++moved;
    }
    return moved;
}

void update_cytokine_receptors(Cell& cell, const Compartment& tissue) {
    for (auto& r : cell.cytokine_receptors) r.level = tissue.signals.at(r.signal);
}

std::size_t update_cell_receptors(Cell& cell, std::size_t cell_index, Compartment& tissue) {
    std::size_t bound = 0;
    for (auto& r : cell.cell_receptors) {
        const auto idx = tissue.rng.index(tissue.cells.size());
        const auto& other = tissue.cells[idx];
        if (idx != cell_index && other && other->type == r.target) {
            r.bound = idx;
            ++bound;
        } else {
            r.bound.reset();
        }
    }
    return bound;
}

std::vector<VrMatch> match_vr_receptors(Cell& cell, const Compartment& tissue, const MatchFn& match) {
    std::vector<VrMatch> out;
    std::vector<std::size_t> presenters;
    for (const auto& r : cell.cell_receptors) {
        if (r.bound && std::find(presenters.begin(), presenters.end(), *r.bound) == presenters.end())
            presenters.push_back(*r.bound);
    }
    if (presenters.empty()) return out;

    for (std::size_t i = 0; i < cell.vr_receptors.size(); ++i) {
        auto& vr = cell.vr_receptors[i];
        for (auto p : presenters) {
            const auto& presenter = tissue.cells[p];
            if (!presenter) continue;
            for (const auto& producer : presenter->antigen_producers) {
                if (!producer.displayed) continue;
                const auto key = producer.displayed->antigen;
                if (match(vr.lock, key)) {
                    vr.matched = true;
                    out.push_back({i, key, p});
                }
            }
        }
    }
    return out;
}

void present_antigen(Cell& cell, std::size_t cell_index, Compartment& tissue) {
    std::vector<std::size_t> occupied;
    bool scanned = false;
    for (auto& p : cell.antigen_producers) {
        if (p.remaining > 0) {
            if (--p.remaining > 0) continue;
            tissue.record(AntigenEventKind::expired, *p.displayed, cell_index);
            p.displayed.reset();
        }
        if (!scanned) {
            for (std::size_t s = 0; s < cell.antigen_store.size(); ++s)
                if (cell.antigen_store[s]) occupied.push_back(s);
            scanned = true;
        }
        if (occupied.empty()) continue;
        const auto pick = tissue.rng.index(occupied.size());
        auto& slot = cell.antigen_store[occupied[pick]];
        occupied.erase(occupied.begin() + static_cast<std::ptrdiff_t>(pick));
        p.displayed = *slot;
        slot.reset();
        p.remaining = p.action_time;
        tissue.record(AntigenEventKind::displayed, *p.displayed, cell_index);
    }
}

void emit_cytokine(const Cell& cell, Compartment& tissue) {
    for (const auto& p : cell.cytokine_producers) tissue.signals.at(p.signal) = p.output;
}

void remove_cell_antigen(Cell& cell, std::size_t cell_index, std::size_t slot, Compartment& tissue) {
    auto& a = cell.antigen_store.at(slot);
    if (!a) return;
    tissue.record(AntigenEventKind::removed, *a, cell_index);
    a.reset();
}

}  // namespace tissue
