#pragma once

#include "tissue/antigen.hpp"
#include "tissue/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tissue {

enum class CellType : std::uint16_t {};

constexpr CellType cell_type(std::uint16_t tag) noexcept { return static_cast<CellType>(tag); }
constexpr std::uint16_t tag_of(CellType t) noexcept { return static_cast<std::uint16_t>(t); }

struct CytokineReceptor {
    std::size_t signal = 0;
    double level = 0.0;  // cached copy of the tissue signal, refreshed every tick

    friend bool operator==(const CytokineReceptor&, const CytokineReceptor&) = default;
};

struct CellReceptor {
    CellType target{};
    std::optional<std::size_t> bound;  // cell-store index, re-drawn every tick

    friend bool operator==(const CellReceptor&, const CellReceptor&) = default;
};

struct VrReceptor {
    Antigen lock;
    bool matched = false;

    friend bool operator==(const VrReceptor&, const VrReceptor&) = default;
};

/// Surface slot that displays one antigen for `action_time` ticks and then
/// destroys it. remaining > 0 iff an antigen is displayed.
struct AntigenProducer {
    std::optional<StoredAntigen> displayed;
    std::uint32_t action_time = 1;
    std::uint32_t remaining = 0;

    bool idle() const noexcept { return remaining == 0; }

    /// Sets a new display period; an ongoing display is clamped to it.
    void set_action_time(std::uint32_t ticks) noexcept;

    friend bool operator==(const AntigenProducer&, const AntigenProducer&) = default;
};

struct CytokineProducer {
    std::size_t signal = 0;
    double output = 0.0;

    friend bool operator==(const CytokineProducer&, const CytokineProducer&) = default;
};

/// A VR receptor opened by an antigen displayed on a bound cell.
struct VrMatch {
    std::size_t receptor = 0;
    Antigen antigen;
    std::size_t presenter = 0;  // cell-store index of the displaying cell

    friend bool operator==(const VrMatch&, const VrMatch&) = default;
};

struct Cell {
    CellType type{};
    std::vector<std::optional<StoredAntigen>> antigen_store;
    std::uint32_t antigen_receptors = 0;
    std::vector<CytokineReceptor> cytokine_receptors;
    std::vector<CellReceptor> cell_receptors;
    std::vector<VrReceptor> vr_receptors;
    std::vector<AntigenProducer> antigen_producers;
    std::vector<CytokineProducer> cytokine_producers;
    std::uint32_t response_producers = 0;
    std::vector<std::int64_t> internal_cytokines;
    std::uint64_t age_since_randomise = 0;

    /// Matches found in this tick's receptor phase; consumed by callbacks.
    std::vector<VrMatch> matches;

    bool bound() const noexcept;
    std::size_t stored_antigen() const noexcept;

    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Per-type repertoire description used to build cells.
struct CellSpec {
    CellType type{};
    std::uint32_t num_antigen = 0;
    std::uint32_t antigen_receptors = 0;
    std::vector<std::size_t> cytokine_receptors;  // signal index per receptor
    std::vector<CellType> cell_receptors;         // target type per receptor
    std::uint32_t vr_receptors = 0;
    std::uint32_t antigen_producers = 0;
    std::uint32_t action_time = 1;
    std::vector<std::size_t> cytokine_producers;  // signal index per producer
    std::uint32_t response_producers = 0;
    std::uint32_t internal_cytokines = 0;
};

/// Builds a fresh cell: empty store, unbound cell receptors, zeroed
/// cytokines, age 0. VR locks are drawn uniformly from [0, alphabet).
/// Throws ParamError on a signal index >= signal_slots or a zero action
/// time on a cell that has producers.
Cell make_cell(const CellSpec& spec, std::uint32_t alphabet, std::size_t signal_slots, Rng& rng);

/// Redraws every VR lock and clears the matched flags.
void randomise_locks(Cell& cell, std::uint32_t alphabet, Rng& rng);

}  // namespace tissue
