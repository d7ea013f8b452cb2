#include "tissue/dataset.hpp"
#include "tissue/error.hpp"
#include "tissue/policy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace tissue;

namespace {

Policy of(std::set<std::uint32_t> s) { return Policy{std::move(s), Provenance::generated}; }

std::vector<ResponseRecord> responding(std::initializer_list<std::uint32_t> values) {
    std::vector<ResponseRecord> out;
    std::uint64_t t = 0;
    for (auto v : values) out.push_back({t++, 60, Antigen{v}});
    return out;
}

LabeledTrace trace_of(std::initializer_list<std::uint32_t> values, Tag tag = Tag::normal) {
    LabeledTrace t{"normal", {}};
    for (auto v : values) t.events.push_back({0, v, tag});
    return t;
}

}  // namespace

TEST(NaivePolicy, DistinctSet) {
    EXPECT_EQ(naive_policy({{5, 6, 6, 3}}).permitted, (std::set<std::uint32_t>{3, 5, 6}));
    EXPECT_TRUE(naive_policy({}).permitted.empty());
    EXPECT_EQ(naive_policy({}).provenance, Provenance::naive);
}

TEST(NaivePolicy, NormalDatasetPermitsTheReferenceSet) {
    auto a = generate_dataset(preset_scenario(ScenarioLabel::normal, 1, 20000));
    auto b = generate_dataset(preset_scenario(ScenarioLabel::normal, 2, 20000));
    std::vector<std::vector<std::uint32_t>> traces(2);
    for (const auto& e : a.labels.events) traces[0].push_back(e.syscall);
    for (const auto& e : b.labels.events) traces[1].push_back(e.syscall);
    const auto p = naive_policy(traces);
    EXPECT_EQ(p.permitted.size(), 38u);
    for (const auto& s : normal_syscalls()) EXPECT_TRUE(p.permits(s.number)) << s.name;
}

TEST(GeneratedPolicy, FromResponses) {
    const auto p = policy_from_responses(responding({78, 304, 309, 142, 168, 312, 55, 108, 5, 6, 6, 5}));
    EXPECT_EQ(p.permitted.size(), 10u);
    EXPECT_EQ(p.provenance, Provenance::generated);
    EXPECT_TRUE(policy_from_responses({}).permitted.empty());
    EXPECT_EQ(policy_from_responses(responding({7, 7, 7})).permitted, (std::set<std::uint32_t>{7}));
}

TEST(MergePolicy, Union) {
    const auto m = merge_policies({of({5, 6}), of({6, 3})});
    EXPECT_EQ(m.permitted, (std::set<std::uint32_t>{3, 5, 6}));
    EXPECT_EQ(m.provenance, Provenance::merged);
    EXPECT_EQ(merge_policies({of({1, 2})}).permitted, (std::set<std::uint32_t>{1, 2}));
    EXPECT_THROW(merge_policies({}), ParamError);
}

TEST(MergePolicy, SetUnionLaws) {
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<std::uint32_t> value(0, 60);
    std::uniform_int_distribution<int> size(0, 25);
    const auto random_policy = [&] {
        std::set<std::uint32_t> s;
        for (int n = size(gen); n > 0; --n) s.insert(value(gen));
        return of(s);
    };
    for (int i = 0; i < 2000; ++i) {
        const auto a = random_policy(), b = random_policy(), c = random_policy();
        const auto set = [](const Policy& p) { return p.permitted; };
        EXPECT_EQ(set(merge_policies({a, a})), set(a));
        EXPECT_EQ(set(merge_policies({a, b})), set(merge_policies({b, a})));
        EXPECT_EQ(set(merge_policies({merge_policies({a, b}), c})), set(merge_policies({a, merge_policies({b, c})})));
        const auto m = merge_policies({a, b});
        for (auto x : a.permitted) EXPECT_TRUE(m.permits(x));
        for (auto x : m.permitted) EXPECT_TRUE(a.permits(x) || b.permits(x));
    }
}

TEST(PolicyFile, WritesSortedCommentedLines) {
    std::ostringstream out;
    write_policy(out, Policy{{9999, 5, 3}, Provenance::merged}, SyscallMap::builtin());
    EXPECT_EQ(out.str(), "# provenance merged\npermit 3 # read\npermit 5 # open\npermit 9999\n");
    std::istringstream in(out.str());
    EXPECT_EQ(parse_policy(in), (Policy{{3, 5, 9999}, Provenance::merged}));
}

TEST(PolicyFile, RejectsMalformedLines) {
    std::istringstream in("permit 3\ndeny 4\n");
    try {
        parse_policy(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream neg("permit -1\n");
    EXPECT_THROW(parse_policy(neg), ParseError);
}

TEST(ResponseStats, CoefficientOfVariationRows) {
    EXPECT_EQ(coefficient_of_variation(19.43, 27.03), 139);
    EXPECT_EQ(coefficient_of_variation(5.95, 7.75), 130);
    EXPECT_EQ(coefficient_of_variation(4.0, 0.0), 0);
    EXPECT_FALSE(coefficient_of_variation(0.0, 0.0));
}

TEST(ResponseStats, MeanAndSampleSd) {
    // counts 1, 2, 3 across runs: mean 2, sample sd 1, cv 50
    std::vector<RunCounts> runs{{{6, 1}}, {{6, 2}}, {{6, 3}, {5, 4}}};
    const auto s = response_stats(runs, {7});
    EXPECT_DOUBLE_EQ(s.at(6).mean, 2.0);
    EXPECT_DOUBLE_EQ(s.at(6).sd, 1.0);
    EXPECT_EQ(s.at(6).cv, 50);
    // syscall 5 missing from two runs: counts 0, 0, 4
    EXPECT_NEAR(s.at(5).mean, 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(s.at(5).sd, std::sqrt((2 * 16.0 / 9.0 + 64.0 / 9.0) / 2.0), 1e-12);
    // never responded to: mean 0, cv undefined
    EXPECT_EQ(s.at(7).mean, 0.0);
    EXPECT_FALSE(s.at(7).cv);
}

TEST(ResponseStats, ConstantSeriesHasZeroSpread) {
    std::vector<RunCounts> runs(5, RunCounts{{6, 9}});
    const auto s = response_stats(runs);
    EXPECT_EQ(s.at(6).sd, 0.0);
    EXPECT_EQ(s.at(6).cv, 0);
}

TEST(EvaluatePolicy, HandCounts) {
    auto r = evaluate_policy(of({3, 5}), trace_of({3, 3, 5, 7}));
    EXPECT_EQ(r.permit_pct, 75);
    EXPECT_EQ(r.deny_pct, 25);
    auto deny_all = evaluate_policy(of({}), trace_of({1, 2, 3}));
    EXPECT_EQ(deny_all.permit_pct, 0);
    EXPECT_EQ(deny_all.deny_pct, 100);
    EXPECT_THROW(evaluate_policy(of({1}), LabeledTrace{}), ParamError);
}

TEST(EvaluatePolicy, PercentagesTruncate) {
    // 2 of 3 permitted: 66 and 33, which do not sum to 100
    auto r = evaluate_policy(of({1}), trace_of({1, 1, 2}));
    EXPECT_EQ(r.permit_pct, 66);
    EXPECT_EQ(r.deny_pct, 33);
}

TEST(EvaluatePolicy, TagComposition) {
    LabeledTrace t{"success", {}};
    for (int i = 0; i < 24; ++i) t.events.push_back({0, 6, Tag::normal});
    for (int i = 0; i < 76; ++i) t.events.push_back({0, i < 40 ? 6u : 63u, Tag::attack});
    auto r = evaluate_policy(of({6}), t);
    EXPECT_EQ(r.normal_pct, 24);
    EXPECT_EQ(r.attack_pct, 76);
    EXPECT_EQ(r.permit_pct, 64);
    EXPECT_EQ(r.normal_permit_pct, 100);
    EXPECT_EQ(r.attack_deny_pct, 47);  // 36 of 76
    std::ostringstream out;
    write_report_header(out);
    write_report_row(out, "success1", "naive", r);
    EXPECT_EQ(out.str(), "dataset,policy,permit_pct,deny_pct,normal_pct,attack_pct\nsuccess1,naive,64,36,24,76\n");
}

TEST(LabelFile, RoundTrip) {
    LabeledTrace t{"failure", {{0, 5, Tag::normal}, {10, 63, Tag::attack}, {10, 6, Tag::normal}}};
    std::ostringstream out;
    write_label_file(out, t);
    std::istringstream in(out.str());
    EXPECT_EQ(parse_label_file(in), t);
    std::istringstream bad("offset_us,syscall,tag\n1,2,evil\n");
    EXPECT_THROW(parse_label_file(bad), ParseError);
}

TEST(RankCorrelation, MatchesReferenceValues) {
    EXPECT_NEAR(spearman({1, 2, 3, 4, 5}, {5, 6, 7, 8, 7}), 0.8207826816681233, 1e-12);
    EXPECT_DOUBLE_EQ(spearman({10, 20, 30, 40}, {4, 3, 2, 1}), -1.0);
    EXPECT_TRUE(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
}

TEST(CrossCorrelation, PeakAtTheShift) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> x(200), y(200, 0.0);
    for (auto& v : x) v = u(gen);
    for (std::size_t t = 0; t + 3 < x.size(); ++t) y[t + 3] = x[t];  // y lags x by 3
    const auto xc = cross_correlation(x, y, 10);
    ASSERT_EQ(xc.size(), 21u);
    const auto peak = std::max_element(xc.begin(), xc.end()) - xc.begin();
    EXPECT_EQ(peak - 10, 3);
    EXPECT_NEAR(xc[13], 1.0, 1e-12);
}
