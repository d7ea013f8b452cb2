#pragma once

#include "tissue/antigen.hpp"
#include "tissue/cell.hpp"
#include "tissue/params.hpp"
#include "tissue/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace tissue {

/// Running totals of where antigen copies went. created == destroyed + live
/// holds after every tick.
struct TurnoverCounters {
    std::uint64_t created = 0;
    std::uint64_t tissue_overwritten = 0;
    std::uint64_t transferred = 0;
    std::uint64_t cell_overwritten = 0;
    std::uint64_t displayed = 0;
    std::uint64_t expired = 0;
    std::uint64_t removed = 0;
    std::uint64_t rejected_antigen = 0;  // out-of-alphabet submissions dropped at drain
    std::uint64_t rejected_signals = 0;  // out-of-range signal indices dropped at drain

    std::uint64_t destroyed() const noexcept { return tissue_overwritten + cell_overwritten + expired + removed; }

    friend bool operator==(const TurnoverCounters&, const TurnoverCounters&) = default;
};

/// The shared environment: fixed-size antigen, signal and cell stores.
struct Compartment {
    explicit Compartment(const TissueParams& params);

    TissueParams params;
    std::vector<std::optional<StoredAntigen>> antigen_store;
    std::vector<double> signals;
    std::vector<std::optional<Cell>> cells;
    std::uint64_t tick_count = 0;
    Rng rng;
    TurnoverCounters counters;
    std::uint64_t next_serial = 1;

    /// Optional per-copy trace hook. Called on the scheduler thread.
    std::function<void(const AntigenEvent&)> tracer;

    std::size_t occupied_antigen() const noexcept;
    std::size_t live_cells() const noexcept;
    std::size_t live_antigen() const noexcept;  // tissue + cell stores + displays

    /// Places the cell in the first free slot and returns its index.
    /// Throws ParamError when the store is full.
    std::size_t add_cell(Cell cell);
    void remove_cell(std::size_t index);

    void record(AntigenEventKind kind, const StoredAntigen& a, std::size_t cell = 0);

    /// Field-for-field state comparison; the tracer is ignored.
    bool same_state(const Compartment& other) const;
};

/// Builds an empty compartment: no antigen, all signals 0, no cells, tick 0.
/// The signal store always has at least one slot for externally-set signals.
inline Compartment new_compartment(const TissueParams& params) { return Compartment(params); }

}  // namespace tissue
