#include "tissue/compartment.hpp"

#include "tissue/error.hpp"

#include <algorithm>
#include <string>

namespace tissue {

Compartment::Compartment(const TissueParams& p)
    : params(validate_params(p)),
      antigen_store(p.max_antigen),
      signals(std::max<std::size_t>(1, p.max_cytokines), 0.0),
      cells(p.max_cells),
      rng(p.rng_seed) {}

std::size_t Compartment::occupied_antigen() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(antigen_store.begin(), antigen_store.end(), [](const auto& a) { return a.has_value(); }));
}

std::size_t Compartment::live_cells() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); }));
}

std::size_t Compartment::live_antigen() const noexcept {
    std::size_t n = occupied_antigen();
    for (const auto& c : cells) {
        if (!c) continue;
        n += c->stored_antigen();
        for (const auto& p : c->antigen_producers) n += p.displayed.has_value() ? 1 : 0;
    }
    return n;
}

std::size_t Compartment::add_cell(Cell cell) {
    auto slot = std::find_if(cells.begin(), cells.end(), [](const auto& c) { return !c.has_value(); });
    if (slot == cells.end())
        throw ParamError("cell store full (max_cells=" + std::to_string(params.max_cells) + ")");
    *slot = std::move(cell);
    return static_cast<std::size_t>(slot - cells.begin());
}

void Compartment::remove_cell(std::size_t index) {
    auto& slot = cells.at(index);
    if (!slot) return;
    for (const auto& a : slot->antigen_store)
        if (a) record(AntigenEventKind::removed, *a, index);
    for (const auto& p : slot->antigen_producers)
        if (p.displayed) record(AntigenEventKind::removed, *p.displayed, index);
    slot.reset();
}

void Compartment::record(AntigenEventKind kind, const StoredAntigen& a, std::size_t cell) {
    switch (kind) {
        case AntigenEventKind::created: ++counters.created; break;
        case AntigenEventKind::tissue_overwritten: ++counters.tissue_overwritten; break;
        case AntigenEventKind::transferred: ++counters.transferred; break;
        case AntigenEventKind::cell_overwritten: ++counters.cell_overwritten; break;
        case AntigenEventKind::displayed: ++counters.displayed; break;
        case AntigenEventKind::expired: ++counters.expired; break;
        case AntigenEventKind::removed: ++counters.removed; break;
    }
    if (tracer) tracer(AntigenEvent{kind, a.serial, a.antigen, tick_count, cell});
}

bool Compartment::same_state(const Compartment& o) const {
    return params == o.params && antigen_store == o.antigen_store && signals == o.signals && cells == o.cells &&
           tick_count == o.tick_count && rng == o.rng && counters == o.counters && next_serial == o.next_serial;
}

}  // namespace tissue
