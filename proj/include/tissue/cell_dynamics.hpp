#pragma once

#include "tissue/cell.hpp"
#include "tissue/compartment.hpp"

#include <functional>
#include <vector>

namespace tissue {

/// Lock/key predicate for VR receptors: (lock, key) -> opened.
using MatchFn = std::function<bool(Antigen lock, Antigen key)>;

inline bool exact_match(Antigen lock, Antigen key) noexcept { return lock == key; }

// Receptor and producer rules. All of them draw from the compartment's
// generator and must run on the scheduler thread.

/// Each receptor probes one uniform-random tissue slot. A hit moves the
/// antigen into a uniform-random slot of the cell's store, destroying any
/// occupant there. Returns the number of antigen moved out of the tissue.
std::size_t update_antigen_receptors(Cell& cell, std::size_t cell_index, Compartment& tissue);

/// Copies the current tissue level into every cytokine receptor.
void update_cytokine_receptors(Cell& cell, const Compartment& tissue);

/// Each receptor draws a uniform-random cell-store index and binds if a live
/// cell of its target type (other than this cell) is there; otherwise it is
/// unbound for this tick. Returns the number of bound receptors.
std::size_t update_cell_receptors(Cell& cell, std::size_t cell_index, Compartment& tissue);

/// Tests every VR receptor against every antigen displayed on the producers
/// of each distinct bound cell. Nothing matches while the cell is unbound.
/// Sets the matched flag on each opened receptor.
std::vector<VrMatch> match_vr_receptors(Cell& cell, const Compartment& tissue, const MatchFn& match);

/// One producer step per producer: count down an ongoing display, destroy it
/// when the count reaches zero, then load a uniform-random stored antigen
/// onto any idle producer.
void present_antigen(Cell& cell, std::size_t cell_index, Compartment& tissue);

/// Writes every cytokine producer's output into its tissue signal.
void emit_cytokine(const Cell& cell, Compartment& tissue);

/// Destroys the antigen in one slot of a cell's store (callback use).
void remove_cell_antigen(Cell& cell, std::size_t cell_index, std::size_t slot, Compartment& tissue);

}  // namespace tissue
