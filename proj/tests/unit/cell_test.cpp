#include "tissue/cell.hpp"
#include "tissue/error.hpp"

#include <gtest/gtest.h>

using namespace tissue;

namespace {

CellSpec type2_spec() {
    CellSpec s;
    s.type = cell_type(2);
    s.cell_receptors = {cell_type(1), cell_type(1)};
    s.vr_receptors = 20;
    s.response_producers = 1;
    s.internal_cytokines = 1;
    return s;
}

}  // namespace

TEST(Cell, Type2RepertoireFromSpec) {
    Rng rng(7);
    auto cell = make_cell(type2_spec(), 1024, 1, rng);
    EXPECT_EQ(cell.type, cell_type(2));
    EXPECT_EQ(cell.vr_receptors.size(), 20u);
    EXPECT_EQ(cell.cell_receptors.size(), 2u);
    EXPECT_EQ(cell.response_producers, 1u);
    EXPECT_TRUE(cell.antigen_store.empty());
    EXPECT_FALSE(cell.bound());
    EXPECT_EQ(cell.age_since_randomise, 0u);
    ASSERT_EQ(cell.internal_cytokines.size(), 1u);
    EXPECT_EQ(cell.internal_cytokines[0], 0);
    for (const auto& vr : cell.vr_receptors) {
        EXPECT_LT(vr.lock.value, 1024u);
        EXPECT_FALSE(vr.matched);
    }
    for (const auto& r : cell.cell_receptors) {
        EXPECT_EQ(r.target, cell_type(1));
        EXPECT_FALSE(r.bound);
    }
}

TEST(Cell, EmptyRepertoireIsValid) {
    Rng rng(1);
    CellSpec s;
    s.type = cell_type(9);
    auto cell = make_cell(s, 1024, 1, rng);
    EXPECT_TRUE(cell.vr_receptors.empty());
    EXPECT_TRUE(cell.antigen_producers.empty());
    EXPECT_EQ(cell.antigen_receptors, 0u);
}

TEST(Cell, ConstructionIsDeterministicPerSeed) {
    Rng a(99);
    Rng b = a;  // cloned seed stream
    auto c1 = make_cell(type2_spec(), 1024, 1, a);
    auto c2 = make_cell(type2_spec(), 1024, 1, b);
    EXPECT_EQ(c1, c2);

    Rng other(100);
    auto c3 = make_cell(type2_spec(), 1024, 1, other);
    EXPECT_NE(c1.vr_receptors, c3.vr_receptors);
}

TEST(Cell, LocksStayInsideAlphabet) {
    Rng rng(3);
    auto spec = type2_spec();
    spec.vr_receptors = 5000;
    auto cell = make_cell(spec, 7, 1, rng);
    for (const auto& vr : cell.vr_receptors) EXPECT_LT(vr.lock.value, 7u);
}

TEST(Cell, DanglingSignalIndexRejected) {
    Rng rng(1);
    CellSpec s;
    s.cytokine_receptors = {1};
    EXPECT_THROW(make_cell(s, 1024, 1, rng), ParamError);
    s.cytokine_receptors.clear();
    s.cytokine_producers = {3};
    EXPECT_THROW(make_cell(s, 1024, 3, rng), ParamError);
    EXPECT_NO_THROW(make_cell(s, 1024, 4, rng));
}

TEST(Cell, ZeroActionTimeRejectedOnlyWithProducers) {
    Rng rng(1);
    CellSpec s;
    s.action_time = 0;
    EXPECT_NO_THROW(make_cell(s, 1024, 1, rng));
    s.antigen_producers = 2;
    EXPECT_THROW(make_cell(s, 1024, 1, rng), ParamError);
}

TEST(Cell, RandomiseLocksClearsMatchedFlags) {
    Rng rng(5);
    auto cell = make_cell(type2_spec(), 1024, 1, rng);
    for (auto& vr : cell.vr_receptors) vr.matched = true;
    const auto before = cell.vr_receptors;
    randomise_locks(cell, 1024, rng);
    for (const auto& vr : cell.vr_receptors) EXPECT_FALSE(vr.matched);
    EXPECT_NE(before, cell.vr_receptors);
}

TEST(Cell, ActionTimeChangeClampsRemaining) {
    AntigenProducer p;
    p.displayed = StoredAntigen{Antigen{4}, 1};
    p.action_time = 100;
    p.remaining = 80;
    p.set_action_time(50);
    EXPECT_EQ(p.remaining, 50u);
    p.set_action_time(100);
    EXPECT_EQ(p.remaining, 50u);
}
