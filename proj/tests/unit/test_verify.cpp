#include "protoseq/cpc_rs.hpp"
#include "protoseq/crt_construct.hpp"
#include "protoseq/errors.hpp"
#include "protoseq/rng.hpp"
#include "protoseq/verify.hpp"

#include "../oracle.hpp"

#include <gtest/gtest.h>

using namespace protoseq;

namespace {

std::vector<oracle::Dense> dense_rows(const SequenceSet& set)
{
    std::vector<oracle::Dense> out;
    for (const auto& m : set.members()) out.push_back(oracle::dense(m.period(), m.ones()));
    return out;
}

SequenceSet random_set(SplitMix64& rng, std::size_t rows, std::uint64_t period, std::uint64_t weight)
{
    std::vector<std::string> labels;
    std::vector<BinarySequence> members;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<std::uint64_t> ones;
        while (ones.size() < weight) {
            const auto c = rng.below(period);
            if (std::find(ones.begin(), ones.end(), c) == ones.end()) ones.push_back(c);
        }
        labels.push_back("r" + std::to_string(r));
        members.emplace_back(period, ones);
    }
    return SequenceSet(labels, members);
}

} // namespace

TEST(StackedMatrix, RowsAreShiftedSequences)
{
    const auto set = crt0_set(3, 5);
    const ShiftAssignment s{{0, 4, 7}};
    const StackedMatrix m(set, s);
    const auto expect = oracle::shifted(dense_rows(set), s.shifts);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::uint64_t c = 0; c < 15; ++c) EXPECT_EQ(m.at(r, c), expect[r][c] == 1);
    for (std::size_t r = 0; r < 3; ++r)
        EXPECT_EQ(conflict_free_positions(m, r), oracle::conflict_free(expect, r));
}

TEST(MaxCircularGap, Cases)
{
    const std::vector<std::uint64_t> cols{2, 5, 9};
    EXPECT_EQ(max_circular_gap(cols, 12), 5u);
    const std::vector<std::uint64_t> one{3};
    EXPECT_EQ(max_circular_gap(one, 12), 12u);
    EXPECT_FALSE(max_circular_gap({}, 12).has_value());
}

TEST(IsUi, Crt0ThreeFiveHolds)
{
    const auto rep = is_ui(crt0_set(3, 5), ModeSpec::exhaustive_mode());
    EXPECT_TRUE(rep.holds());
    EXPECT_EQ(rep.checked, 225u);
    EXPECT_TRUE(rep.counterexample.is_null());
}

TEST(IsUi, DuplicateRowsFail)
{
    SequenceSet set({"a", "b"}, {BinarySequence(5, {0, 1}), BinarySequence(5, {0, 1})});
    const auto rep = is_ui(set, ModeSpec::exhaustive_mode());
    EXPECT_FALSE(rep.holds());
    // Earliest counterexample in lexicographic order is the zero shift.
    EXPECT_EQ(rep.counterexample.at("shifts"), nlohmann::json::array({0, 0}));
    EXPECT_TRUE(rep.stats.at("partial").get<bool>());
}

TEST(IsUi, AgreesWithDenseOracleOnRandomSets)
{
    SplitMix64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const auto rows = 2 + rng.below(2);
        const auto period = 5 + rng.below(5);
        const auto set = random_set(rng, rows, period, 1 + rng.below(3));
        EXPECT_EQ(is_ui(set, ModeSpec::exhaustive_mode()).holds(), oracle::is_ui(dense_rows(set)))
            << "trial " << trial;
    }
}

TEST(IsUi, CapThrows)
{
    EXPECT_THROW(is_ui(crt0_set(5, 9), ModeSpec::exhaustive_mode(1000)), CapExceededError);
}

TEST(IsUi, RandomModeIsIndependentOfJobs)
{
    SequenceSet set({"a", "b", "c"}, {BinarySequence(7, {0, 1}), BinarySequence(7, {0, 2}),
                                      BinarySequence(7, {0, 3})});
    auto m1 = ModeSpec::random_mode(5000, 17);
    m1.jobs = 1;
    auto m4 = m1;
    m4.jobs = 4;
    const auto a = is_ui(set, m1);
    const auto b = is_ui(set, m4);
    EXPECT_EQ(to_json(a), to_json(b));
    EXPECT_FALSE(a.holds());
}

TEST(IsUi, ExhaustiveIsIndependentOfJobs)
{
    const auto set = crt0_set(3, 7);
    auto m1 = ModeSpec::exhaustive_mode();
    m1.jobs = 1;
    auto m3 = m1;
    m3.jobs = 3;
    EXPECT_EQ(to_json(is_ui(set, m1)), to_json(is_ui(set, m3)));
}

TEST(XcorrAudit, BoundsAndWitness)
{
    const auto set = crt0_set(3, 5);
    EXPECT_TRUE(xcorr_bound_audit(set, 1).holds());
    SequenceSet dup({"a", "b"}, {BinarySequence(5, {0, 2}), BinarySequence(5, {0, 2})});
    const auto rep = xcorr_bound_audit(dup, 1);
    EXPECT_FALSE(rep.holds());
    EXPECT_EQ(rep.counterexample.at("correlation"), 2);
    EXPECT_EQ(rep.stats.at("max_correlation"), 2);
}

TEST(SeparationAudit, Crt0IsAtLeastP)
{
    for (std::uint64_t p : {3u, 5u, 7u}) {
        const auto set = crt0_set(p, 2 * p - 1);
        const auto rep = separation_audit(set, p);
        EXPECT_TRUE(rep.holds());
        std::uint64_t worst = ~std::uint64_t{0};
        for (const auto& d : dense_rows(set)) worst = std::min(worst, oracle::min_separation(d));
        EXPECT_EQ(rep.stats.at("min_separation").get<std::uint64_t>(), worst);
    }
    EXPECT_FALSE(separation_audit(crt0_set(3, 5), 4).holds());
}

TEST(ZeroColumnWindow, SingleMatrixCases)
{
    const std::vector<BinarySequence> ones{BinarySequence::from_string("1111")};
    EXPECT_FALSE(zero_column_window(StackedMatrix(std::span<const BinarySequence>(ones)), 4).holds());
    const std::vector<BinarySequence> sparse{BinarySequence::from_string("100100")};
    EXPECT_TRUE(zero_column_window(StackedMatrix(std::span<const BinarySequence>(sparse)), 2).holds());
    EXPECT_FALSE(zero_column_window(StackedMatrix(std::span<const BinarySequence>(sparse)), 1).holds());
}

TEST(ZeroColumnWindow, AuditMatchesOracleForCrt0)
{
    const auto set = crt0_set(3, 5);
    EXPECT_TRUE(zero_column_window_audit(set, 6, ModeSpec::exhaustive_mode()).holds());
    bool all = true;
    oracle::for_each_shift(3, 15, [&](const std::vector<std::uint64_t>& s) {
        all = all && oracle::zero_window(oracle::shifted(dense_rows(set), s), 6);
    });
    EXPECT_TRUE(all);
    // A window of 1 needs every column empty.
    EXPECT_FALSE(zero_column_window_audit(set, 1, ModeSpec::exhaustive_mode()).holds());
}

TEST(ConflictFree, CountAndGapMatchOracleOnFixedAssignment)
{
    SplitMix64 rng(4);
    const auto set = random_set(rng, 3, 11, 3);
    const std::vector<std::string> prot{"r0"};
    // Exhaustive minimum over all shifts against the oracle.
    std::uint64_t min_cf = ~std::uint64_t{0};
    std::uint64_t max_gap = 0;
    bool starved = false;
    oracle::for_each_shift(3, 11, [&](const std::vector<std::uint64_t>& s) {
        const auto cf = oracle::conflict_free(oracle::shifted(dense_rows(set), s), 0);
        min_cf = std::min<std::uint64_t>(min_cf, cf.size());
        const auto g = oracle::max_gap(cf, 11);
        if (!g) starved = true;
        else max_gap = std::max(max_gap, *g);
    });
    const auto count = min_conflict_free_count(set, prot, min_cf, ModeSpec::exhaustive_mode());
    EXPECT_TRUE(count.holds());
    EXPECT_EQ(count.stats.at("min_conflict_free_count").get<std::uint64_t>(), min_cf);
    EXPECT_FALSE(min_conflict_free_count(set, prot, min_cf + 1, ModeSpec::exhaustive_mode()).holds());
    if (!starved) {
        EXPECT_TRUE(max_conflict_free_gap(set, prot, max_gap, ModeSpec::exhaustive_mode()).holds());
        EXPECT_FALSE(max_conflict_free_gap(set, prot, max_gap - 1, ModeSpec::exhaustive_mode()).holds());
    } else {
        EXPECT_FALSE(max_conflict_free_gap(set, prot, 11, ModeSpec::exhaustive_mode()).holds());
    }
}

TEST(ConflictFree, SplitThresholds)
{
    EXPECT_EQ(split_cf_count_threshold(3), 12u);
    EXPECT_EQ(split_cf_count_threshold(5), 35u);
    EXPECT_EQ(split_cf_gap_bound(3, 136), 816u);
}

TEST(ExpandedSelection, PicksSplitRowsAndMMinusOneUnsplit)
{
    const auto exp = expanded_set({rs_cpc({8, 17, 3}), {"c0", "c1", "c2"}, 3, 3});
    const auto [sel, prot] = expanded_selection(exp, 3);
    EXPECT_EQ(sel.size(), 5u);
    EXPECT_EQ(prot, (std::vector<std::string>{"U(x)c3", "U(x)c4"}));
    EXPECT_THROW(expanded_selection(crt0_set(3, 5), 2), InputError);
}

TEST(VerifyReport, JsonShape)
{
    const auto j = to_json(is_ui(crt0_set(3, 5), ModeSpec::random_mode(50, 9)));
    EXPECT_EQ(j.at("property"), "ui");
    EXPECT_EQ(j.at("mode"), "random");
    EXPECT_EQ(j.at("seed"), 9);
    EXPECT_EQ(j.at("verdict"), "holds");
}
