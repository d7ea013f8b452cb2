#include "tissue/cell.hpp"

#include "tissue/error.hpp"

#include <algorithm>
#include <string>

namespace tissue {

void AntigenProducer::set_action_time(std::uint32_t ticks) noexcept {
    action_time = ticks;
    remaining = std::min(remaining, ticks);
}

bool Cell::bound() const noexcept {
    return std::any_of(cell_receptors.begin(), cell_receptors.end(),
                       [](const CellReceptor& r) { return r.bound.has_value(); });
}

std::size_t Cell::stored_antigen() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(antigen_store.begin(), antigen_store.end(), [](const auto& a) { return a.has_value(); }));
}

Cell make_cell(const CellSpec& spec, std::uint32_t alphabet, std::size_t signal_slots, Rng& rng) {
    if (spec.antigen_producers > 0 && spec.action_time == 0)
        throw ParamError("antigen producer action time must be >= 1");
    if (spec.vr_receptors > 0 && alphabet == 0) throw ParamError("empty antigen alphabet");
    const auto check_signal = [&](std::size_t idx, const char* what) {
        if (idx >= signal_slots)
            throw ParamError(std::string(what) + " bound to signal " + std::to_string(idx) + " but the tissue holds " +
                             std::to_string(signal_slots));
    };

    Cell cell;
    cell.type = spec.type;
    cell.antigen_store.resize(spec.num_antigen);
    cell.antigen_receptors = spec.antigen_receptors;
    for (auto idx : spec.cytokine_receptors) {
        check_signal(idx, "cytokine receptor");
        cell.cytokine_receptors.push_back({idx, 0.0});
    }
    for (auto target : spec.cell_receptors) cell.cell_receptors.push_back({target, std::nullopt});
    cell.vr_receptors.resize(spec.vr_receptors);
    for (auto& vr : cell.vr_receptors) vr.lock = Antigen{rng.below(alphabet)};
    cell.antigen_producers.resize(spec.antigen_producers);
    for (auto& p : cell.antigen_producers) p.action_time = spec.action_time;
    for (auto idx : spec.cytokine_producers) {
        check_signal(idx, "cytokine producer");
        cell.cytokine_producers.push_back({idx, 0.0});
    }
    cell.response_producers = spec.response_producers;
    cell.internal_cytokines.assign(spec.internal_cytokines, 0);
    return cell;
}

void randomise_locks(Cell& cell, std::uint32_t alphabet, Rng& rng) {
    for (auto& vr : cell.vr_receptors) {
        vr.lock = Antigen{rng.below(alphabet)};
        vr.matched = false;
    }
}

}  // namespace tissue
