#include "protoseq/cpc_rs.hpp"
#include "protoseq/crt_construct.hpp"
#include "protoseq/errors.hpp"
#include "protoseq/netsim.hpp"
#include "protoseq/rng.hpp"
#include "protoseq/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace protoseq;

namespace {

UserSpec user(std::string id, double x, double y, std::optional<std::uint64_t> seq = std::nullopt)
{
    UserSpec u;
    u.id = std::move(id);
    u.x = x;
    u.y = y;
    u.sequence = seq;
    return u;
}

Scenario base_scenario(SequenceSet seqs, std::uint64_t delta_c, bool sync = false)
{
    Scenario s;
    s.R = 500.0;
    s.h = 50.0;
    s.M = 4;
    s.slot_synchronized = sync;
    s.sequences = std::move(seqs);
    s.timing = TimingModel::make(1e-3, s.sequences.period(), 4, delta_c, s.R, sync);
    return s;
}

} // namespace

TEST(Timing, DeltaP)
{
    EXPECT_EQ(delta_p(0.0, 1e-3), 0u);
    EXPECT_EQ(delta_p(500.0, 1e-3), 1u);
    EXPECT_EQ(delta_p(500.0, 1e-6), 2u);
    EXPECT_EQ(delta_p(299792.458, 1e-3), 1u); // exactly one slot of flight
    EXPECT_THROW(delta_p(-1.0, 1e-3), InputError);
}

TEST(Timing, SuperframeLengthAndGuard)
{
    const auto t = TimingModel::make(1e-3, 30, 5, 2, 500.0, false);
    EXPECT_EQ(t.delta(), 3u);
    EXPECT_DOUBLE_EQ(t.guard_s(), 3e-3);
    EXPECT_DOUBLE_EQ(t.superframe_s(), 5 * 30 * 1e-3 + 3e-3);
    auto bad = t;
    bad.L = 2;
    EXPECT_THROW(bad.validate(), InputError);
}

TEST(MaxUsersInDisk, MatchesGridSearch)
{
    SplitMix64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point> pts;
        for (int i = 0; i < 12; ++i) pts.push_back({rng.unit() * 10, rng.unit() * 10});
        const auto exact = max_users_in_disk(pts, 2.0);
        // Dense grid of centres can only under-count the optimum.
        std::uint64_t grid = 0;
        for (double cx = -2; cx <= 12; cx += 0.05)
            for (double cy = -2; cy <= 12; cy += 0.05) {
                std::uint64_t c = 0;
                for (const auto& p : pts) c += std::hypot(p.x - cx, p.y - cy) <= 2.0 ? 1 : 0;
                grid = std::max(grid, c);
            }
        EXPECT_GE(exact, grid);
        EXPECT_LE(exact, grid + 1); // grid spacing misses at most boundary points
    }
}

TEST(RunSuperframe, LoneUserHasEmptyLog)
{
    auto s = base_scenario(crt0_set(3, 5), 0);
    s.users = {user("a", 0, 0, 0)};
    const auto log = run_superframe(s, 1);
    EXPECT_TRUE(log.receptions.empty());
    EXPECT_TRUE(check_block_free(log, s).verdict);
}

TEST(RunSuperframe, DisjointSupportsAreAllContentionFree)
{
    // Slots 0 and 2 of 4: skew 0.33 us never reaches the other's slot.
    SequenceSet seqs({"a", "b"}, {BinarySequence(4, {0}), BinarySequence(4, {2})});
    auto s = base_scenario(seqs, 0);
    s.users = {user("a", 0, 0, 0), user("b", 100, 0, 1)};
    const auto log = run_superframe(s, 1);
    ASSERT_EQ(log.receptions.size(), 2u * 4u);
    for (const auto& r : log.receptions) {
        EXPECT_TRUE(r.contention_free);
        EXPECT_EQ(r.end_ps - r.start_ps, to_ps(1e-3));
    }
    const auto& r0 = log.receptions.front();
    EXPECT_NEAR(to_seconds(r0.start_ps - static_cast<Picoseconds>(r0.slot) * to_ps(1e-3)), 100.0 / kSpeedOfLight, 1e-12);
    EXPECT_TRUE(check_block_free(log, s).verdict);
}

TEST(RunSuperframe, IdenticalSequencesCollideEverywhere)
{
    auto s = base_scenario(crt0_set(3, 5), 0, true);
    s.users = {user("a", 0, 0, 0), user("b", 200, 0, 0)};
    const auto log = run_superframe(s, 1);
    ASSERT_FALSE(log.receptions.empty());
    for (const auto& r : log.receptions) EXPECT_FALSE(r.contention_free);
    const auto rep = check_block_free(log, s);
    EXPECT_FALSE(rep.verdict);
    EXPECT_EQ(rep.violations.size(), 2u * 2u); // both directions, frames 1 and 2
}

TEST(RunSuperframe, UsersBeyondRAreIgnored)
{
    auto s = base_scenario(crt0_set(3, 5), 0, true);
    s.users = {user("a", 0, 0, 0), user("b", 600, 0, 0)};
    EXPECT_TRUE(run_superframe(s, 1).receptions.empty());
}

TEST(BlockFree, PaddedCrt0HoldsForAnyOffsets)
{
    for (std::uint64_t dc : {1u, 2u}) {
        auto seqs = crt0_set(3, 5);
        auto probe = base_scenario(seqs, dc);
        auto s = base_scenario(pad_silent(seqs, probe.timing.delta()), dc);
        s.users = {user("a", 0, 0, 0), user("b", 150, 80, 1)};
        for (double oa = 0; oa <= static_cast<double>(dc); oa += 0.25)
            for (double ob = 0; ob <= static_cast<double>(dc); ob += 0.25) {
                s.users[0].offset_slots = oa;
                s.users[1].offset_slots = ob;
                const auto log = run_superframe(s, 3);
                ASSERT_TRUE(check_block_free(log, s).verdict) << dc << " " << oa << " " << ob;
                ASSERT_TRUE(frame_offset_audit(log, s).holds);
            }
    }
}

TEST(BlockFree, UnpaddedHalfSlotOffsetBreaksTdma)
{
    auto s = base_scenario(tdma_set(3, 0), 1);
    s.users = {user("a", 0, 0, 0), user("b", 100, 0, 1), user("c", 0, 100, 2)};
    s.users[1].offset_slots = 0.5;
    EXPECT_FALSE(check_block_free(run_superframe(s, 1), s).verdict);
}

TEST(BlockFree, AgreesWithIntegerShiftAnalysis)
{
    const auto seqs = crt0_set(3, 5);
    auto s = base_scenario(seqs, 0, true);
    s.users = {user("a", 0, 0, 0), user("b", 120, 0, 1), user("c", 0, 120, 0)};
    std::vector<BinarySequence> rows{seqs[0], seqs[1], seqs[0]};
    for (std::uint64_t pb = 0; pb < 15; pb += 2)
        for (std::uint64_t pc = 0; pc < 15; pc += 3) {
            s.users[1].phase = pb;
            s.users[2].phase = pc;
            const StackedMatrix m(std::span<const BinarySequence>(rows), ShiftAssignment{{0, pb, pc}});
            bool expect = true;
            for (std::size_t r = 0; r < 3; ++r) expect = expect && !conflict_free_positions(m, r).empty();
            EXPECT_EQ(check_block_free(run_superframe(s, 1), s).verdict, expect) << pb << "," << pc;
        }
}

TEST(FrameOffset, SynchronousAndBoundaryCases)
{
    auto s = base_scenario(crt0_set(3, 5), 0, true);
    s.users = {user("a", 0, 0, 0), user("b", 120, 0, 1)};
    const auto sync = run_superframe(s, 1);
    EXPECT_TRUE(frame_offset_audit(sync, s).holds);
    const auto frame = static_cast<Picoseconds>(15) * to_ps(1e-3);
    for (const auto& r : sync.receptions)
        EXPECT_EQ(r.start_ps / frame, static_cast<Picoseconds>(r.slot / 15));

    // Delta = L: offsets at the extreme still land within one frame.
    SequenceSet edge({"a", "b"}, {BinarySequence(3, {0, 2}), BinarySequence(3, {1})});
    auto e = base_scenario(edge, 2);
    ASSERT_EQ(e.timing.delta(), 3u);
    e.users = {user("a", 0, 0, 0), user("b", 499, 0, 1)};
    e.users[0].offset_slots = 0.0;
    e.users[1].offset_slots = 2.0;
    EXPECT_TRUE(frame_offset_audit(run_superframe(e, 1), e).holds);
}

TEST(Invariants, ConservationAndMonotonicity)
{
    auto seqs = rs_cpc({6, 7, 3});
    auto s = base_scenario(pad_silent(seqs, 3), 2);
    s.M = 5;
    s.users = {user("a", 0, 0, 0), user("b", 200, 0, 1), user("c", 0, 200, 2), user("d", 150, 150, 3),
               user("e", -200, 50, 4)};
    const auto log = run_superframe(s, 9);
    const auto states = plan_superframes(s, 9);
    std::uint64_t expected = 0;
    for (std::size_t tx = 0; tx < s.users.size(); ++tx)
        for (std::size_t rx = 0; rx < s.users.size(); ++rx) {
            if (tx == rx) continue;
            const auto& p = states[0].positions;
            if (std::hypot(p[tx].x - p[rx].x, p[tx].y - p[rx].y) < s.R)
                expected += s.sequences[states[0].sequence[tx]].weight() * s.timing.F;
        }
    EXPECT_EQ(log.receptions.size(), expected);

    // Dropping user e: every surviving reception keeps or gains its status.
    auto fewer = s;
    fewer.users.pop_back();
    for (std::size_t i = 0; i < fewer.users.size(); ++i)
        fewer.users[i].offset_slots = static_cast<double>(states[0].start_ps[i]) / static_cast<double>(to_ps(1e-3));
    auto same = s;
    for (std::size_t i = 0; i < same.users.size(); ++i)
        same.users[i].offset_slots = static_cast<double>(states[0].start_ps[i]) / static_cast<double>(to_ps(1e-3));
    const auto full = run_superframe(same, 9).receptions;
    const auto reduced = run_superframe(fewer, 9).receptions;
    std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, bool> cf;
    for (const auto& r : reduced) cf[{r.tx, r.rx, r.slot}] = r.contention_free;
    for (const auto& r : full) {
        if (r.tx == 4 || r.rx == 4) continue;
        if (r.contention_free) {
            EXPECT_TRUE(cf.at({r.tx, r.rx, r.slot}));
        }
    }
}

TEST(Determinism, SameSeedSameLog)
{
    Scenario s = base_scenario(pad_silent(rs_cpc({6, 7, 3}), 3), 2);
    s.M = 6;
    s.v_mps = 20.0;
    s.superframes = 3;
    s.users = {user("a", 0, 0, 0), user("b", 200, 0, 1), user("c", 0, 200, 2), user("d", 900, 900, 3)};
    const auto a = simulate(s, 77);
    const auto b = simulate(s, 77);
    EXPECT_EQ(reception_csv(a, s), reception_csv(b, s));
    EXPECT_NE(reception_csv(a, s), reception_csv(simulate(s, 78), s));
}

TEST(Mobility, StepsStayWithinSpeedBound)
{
    Scenario s = base_scenario(pad_silent(rs_cpc({6, 7, 3}), 3), 2);
    s.M = 6;
    s.v_mps = 5000.0;
    s.superframes = 6;
    s.users = {user("a", 0, 0, 0), user("b", 200, 0, 1), user("c", 0, 200, 2)};
    const auto states = plan_superframes(s, 5);
    const double step = s.v_mps * s.timing.superframe_s();
    for (std::size_t k = 1; k < states.size(); ++k)
        for (std::size_t i = 0; i < s.users.size(); ++i) {
            const auto& a = states[k - 1].positions[i];
            const auto& b = states[k].positions[i];
            EXPECT_LE(std::hypot(a.x - b.x, a.y - b.y), step + 1e-9);
            for (std::size_t j = 0; j < i; ++j) EXPECT_NE(states[k].cells[i], states[k].cells[j]);
        }
}

TEST(Validation, RejectsBrokenScenarios)
{
    auto s = base_scenario(crt0_set(3, 5), 0);
    s.users = {user("a", 0, 0, 0), user("b", 10, 0, 1)}; // same 50 m cell
    EXPECT_THROW(validate_scenario(s), InputError);
    s.users = {user("a", 0, 0, 0), user("b", 200, 0, 1), user("c", 0, 200, 2)};
    s.M = 2;
    EXPECT_THROW(validate_scenario(s), InputError);
    s.M = 3;
    s.timing.F = 2;
    EXPECT_THROW(validate_scenario(s), InputError);
    s.timing.F = 4;
    s.users[0].offset_slots = 1.5; // delta_c = 0
    EXPECT_THROW(validate_scenario(s), InputError);
    s.users[0].offset_slots.reset();
    s.users[0].sequence = 9;
    EXPECT_THROW(validate_scenario(s), InputError);
}

TEST(Adversarial, FindsViolationWithoutPadding)
{
    auto s = base_scenario(tdma_set(3, 0), 1);
    s.users = {user("a", 0, 0, 0), user("b", 100, 0, 1), user("c", 0, 100, 2)};
    const auto res = adversarial_offsets(s, {2, 1000, 1});
    EXPECT_TRUE(res.violation_found);
    ASSERT_TRUE(res.report.has_value());
    EXPECT_FALSE(res.report->verdict);

    auto padded = base_scenario(tdma_set(3, 2), 1);
    padded.users = s.users;
    EXPECT_FALSE(adversarial_offsets(padded, {4, 1000, 1}).violation_found);
}

TEST(Baseline, TableRows)
{
    const auto t = baseline_compare(3, 7, 0);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].period, 7u);
    EXPECT_EQ(t.rows[1].period, 42u);
    EXPECT_EQ(t.rows[2].period, 84u);
    EXPECT_EQ(t.floor, 8u);
    EXPECT_EQ(t.winner, "tdma");
    const auto big = baseline_compare(5, 37, 2);
    EXPECT_EQ(big.rows[0].period, 111u);
    EXPECT_EQ(big.rows[2].period, 544u);
    for (const auto& r : big.rows)
        if (r.ui_scheme) {
            EXPECT_TRUE(r.meets_floor);
        }
    EXPECT_THROW(baseline_compare(400, 1000, 0, {50, 50}), InfeasibleError);
}

TEST(Baseline, ScenariosAreValidCliques)
{
    for (auto [M, G, D] : std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>>{{3, 7, 0}, {5, 37, 2}}) {
        const auto t = baseline_compare(M, G, D);
        for (const auto& row : t.rows) {
            const auto s = baseline_scenario(t, row);
            EXPECT_EQ(s.timing.delta(), D);
            EXPECT_EQ(s.timing.L, row.period);
            EXPECT_EQ(s.users.size(), M);
            EXPECT_EQ(s.effective_plan().G(), G);
            const auto log = simulate(s, 2);
            EXPECT_TRUE(frame_offset_audit(log, s).holds) << row.scheme;
            EXPECT_TRUE(check_block_free(log, s).verdict) << row.scheme;
        }
    }
}

TEST(Config, ParsesScenarioJson)
{
    const auto j = nlohmann::json::parse(R"({
        "tau_s": 0.001, "F": 4, "delta_c_slots": 1, "R_m": 500, "h_m": 50, "M": 3,
        "sequences": {"construction": "crt0", "p": 3, "q": 5, "pad": "auto"},
        "users": [{"id": "a", "x": 0, "y": 0, "sequence": "S0"},
                  {"id": "b", "x": 120, "y": 40, "sequence": 1, "offset_slots": 0.5}]
    })");
    const auto s = scenario_from_json(j);
    EXPECT_EQ(s.timing.delta(), 2u);
    EXPECT_EQ(s.timing.L, 45u);
    EXPECT_EQ(*s.users[0].sequence, 0u);
    EXPECT_DOUBLE_EQ(*s.users[1].offset_slots, 0.5);

    auto wrong_l = j;
    wrong_l["L"] = 15;
    EXPECT_THROW(scenario_from_json(wrong_l), InputError);

    auto random = j;
    random.erase("users");
    random["random_users"] = 12;
    random["area"] = {2000, 2000};
    random["seed"] = 3;
    random["sequences"] = {{"construction", "prop2"}, {"pad", "auto"}};
    const auto r = scenario_from_json(random);
    EXPECT_EQ(r.users.size(), 12u);
    std::vector<Point> pts;
    for (const auto& u : r.users) pts.push_back({u.x, u.y});
    EXPECT_LE(max_users_in_disk(pts, r.R), r.M);
}
