#include "tissue/compartment.hpp"
#include "tissue/error.hpp"

#include <gtest/gtest.h>

using namespace tissue;

TEST(Compartment, TableOneCompartmentIsEmpty) {
    auto c = new_compartment(TissueParams{});
    EXPECT_EQ(c.antigen_store.size(), 1000u);
    EXPECT_EQ(c.occupied_antigen(), 0u);
    EXPECT_EQ(c.live_antigen(), 0u);
    EXPECT_EQ(c.cells.size(), 100u);
    EXPECT_EQ(c.live_cells(), 0u);
    EXPECT_EQ(c.tick_count, 0u);
    for (double s : c.signals) EXPECT_EQ(s, 0.0);
}

TEST(Compartment, ZeroCytokinesStillHoldsOneSignal) {
    TissueParams p;
    p.max_cytokines = 0;
    EXPECT_EQ(new_compartment(p).signals.size(), 1u);
    p.max_cytokines = 4;
    EXPECT_EQ(new_compartment(p).signals.size(), 4u);
}

TEST(Compartment, InvalidParamsRejected) {
    TissueParams p;
    p.max_antigen = 0;
    EXPECT_THROW(new_compartment(p), ParamError);
}

TEST(Compartment, CellStoreIsBounded) {
    TissueParams p;
    p.max_cells = 2;
    auto c = new_compartment(p);
    EXPECT_EQ(c.add_cell(Cell{}), 0u);
    EXPECT_EQ(c.add_cell(Cell{}), 1u);
    EXPECT_THROW(c.add_cell(Cell{}), ParamError);
    c.remove_cell(0);
    EXPECT_EQ(c.add_cell(Cell{}), 0u);
}

TEST(Compartment, RemovingCellDestroysItsAntigen) {
    auto c = new_compartment(TissueParams{});
    Cell cell;
    cell.antigen_store.resize(3);
    cell.antigen_store[1] = StoredAntigen{Antigen{5}, 1};
    cell.antigen_producers.resize(1);
    cell.antigen_producers[0].displayed = StoredAntigen{Antigen{6}, 2};
    cell.antigen_producers[0].remaining = 3;
    const auto idx = c.add_cell(cell);
    c.remove_cell(idx);
    EXPECT_EQ(c.counters.removed, 2u);
}
