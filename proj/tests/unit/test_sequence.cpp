#include "protoseq/errors.hpp"
#include "protoseq/rng.hpp"
#include "protoseq/sequence.hpp"
#include "protoseq/sequence_set.hpp"

#include "../oracle.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace protoseq;

namespace {

BinarySequence random_sequence(SplitMix64& rng, std::uint64_t period)
{
    std::vector<std::uint64_t> ones;
    for (std::uint64_t i = 0; i < period; ++i)
        if (rng.below(3) == 0) ones.push_back(i);
    if (ones.size() < 2) ones = {0, period / 2};
    return BinarySequence(period, ones);
}

} // namespace

TEST(BinarySequence, SortsAndRejectsBadPositions)
{
    const BinarySequence x(6, {4, 1});
    EXPECT_EQ(x.ones(), (std::vector<std::uint64_t>{1, 4}));
    EXPECT_EQ(x.to_string(), "010010");
    EXPECT_THROW(BinarySequence(6, {1, 1}), InputError);
    EXPECT_THROW(BinarySequence(6, {6}), InputError);
    EXPECT_EQ(BinarySequence::from_string("010010"), x);
    EXPECT_THROW(BinarySequence::from_string("01a"), InputError);
}

TEST(BinarySequence, ShiftMovesOnesRight)
{
    const BinarySequence x(5, {0, 1});
    EXPECT_EQ(cyclic_shift(x, 1).ones(), (std::vector<std::uint64_t>{1, 2}));
    EXPECT_EQ(cyclic_shift(x, -1).ones(), (std::vector<std::uint64_t>{0, 4}));
    EXPECT_EQ(cyclic_shift(x, 5), x);
}

TEST(Correlation, ProfileMatchesDenseOracle)
{
    SplitMix64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto n = 5 + rng.below(20);
        const auto x = random_sequence(rng, n);
        const auto y = random_sequence(rng, n);
        const auto prof = hamming_xcorr_profile(x, y);
        const auto dx = oracle::dense(n, x.ones());
        const auto dy = oracle::dense(n, y.ones());
        for (std::uint64_t t = 0; t < n; ++t) {
            ASSERT_EQ(prof[t], oracle::xcorr(dx, dy, t));
            ASSERT_EQ(hamming_xcorr(x, y, static_cast<std::int64_t>(t)), prof[t]);
        }
    }
}

TEST(Correlation, ShiftSymmetry)
{
    // H(x, y)(t) = H(y, x)(-t)
    SplitMix64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 7 + rng.below(10);
        const auto x = random_sequence(rng, n);
        const auto y = random_sequence(rng, n);
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(n); ++t)
            ASSERT_EQ(hamming_xcorr(x, y, t), hamming_xcorr(y, x, -t));
    }
}

TEST(SequenceMetrics, OrderSeparationDistanceMatchOracle)
{
    SplitMix64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = 4 + rng.below(16);
        const auto x = random_sequence(rng, n);
        const auto dx = oracle::dense(n, x.ones());
        EXPECT_EQ(cyclic_order(x), oracle::cyclic_order(dx));
        EXPECT_EQ(min_separation(x), oracle::min_separation(dx));
    }
    EXPECT_EQ(cyclic_order(BinarySequence::from_string("101010")), 2u);
    EXPECT_EQ(cyclic_order(BinarySequence::from_string("100000")), 6u);

    std::vector<BinarySequence> set{BinarySequence::from_string("1100000"),
                                    BinarySequence::from_string("1010000"),
                                    BinarySequence::from_string("1001000")};
    std::vector<oracle::Dense> dense;
    for (const auto& s : set) dense.push_back(oracle::dense(7, s.ones()));
    EXPECT_EQ(cyclic_min_distance(set), oracle::cyclic_min_distance(dense));
    EXPECT_TRUE(cyclically_equivalent(set[0], cyclic_shift(set[0], 3)));
    EXPECT_FALSE(cyclically_equivalent(set[0], set[1]));
}

TEST(Crt, MapAndUnmapAgreeWithScan)
{
    for (auto [p, q] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{3, 5}, {5, 9}, {4, 7}, {7, 13}}) {
        const CrtCorrespondence g(p, q);
        for (std::uint64_t l = 0; l < p * q; ++l) {
            const auto pair = g.map(l);
            EXPECT_EQ(pair.row, l % p);
            EXPECT_EQ(pair.col, l % q);
            EXPECT_EQ(g.unmap(pair), l);
            EXPECT_EQ(oracle::crt_scan(pair.row, pair.col, p, q), l);
        }
    }
    EXPECT_THROW(CrtCorrespondence(4, 6), InputError);
}

TEST(Crt, RotationIsSimultaneousRowAndColumnRotation)
{
    const std::uint64_t p = 5, q = 7;
    for (std::uint64_t l = 0; l < p * q; ++l) {
        const auto a = crt_map(l, p, q);
        const auto b = crt_map((l + 1) % (p * q), p, q);
        EXPECT_EQ(b.row, (a.row + 1) % p);
        EXPECT_EQ(b.col, (a.col + 1) % q);
    }
}

TEST(NumberTheory, Basics)
{
    EXPECT_TRUE(is_prime(2));
    EXPECT_TRUE(is_prime(997));
    EXPECT_FALSE(is_prime(1));
    EXPECT_FALSE(is_prime(91));
    EXPECT_EQ(pow_mod(3, 4, 11), 4u);
    EXPECT_EQ(mul_mod(inverse_mod(7, 13), 7, 13), 1u);
    EXPECT_THROW(inverse_mod(6, 9), InputError);
}

TEST(SequenceSet, RoundTripsThroughJson)
{
    SequenceSet set({"a", "b"}, {BinarySequence(5, {0, 2}), BinarySequence(5, {1})},
                    {{"construction", "manual"}});
    const auto back = sequence_set_from_json(to_json(set));
    EXPECT_EQ(back, set);

    const auto path = (std::filesystem::temp_directory_path() / "protoseq_set_rt.json").string();
    save_sequence_set(set, path);
    EXPECT_EQ(load_sequence_set(path), set);
    std::filesystem::remove(path);

    const auto dense = nlohmann::json::parse(R"([{"dense": "10100", "label": "x"}])");
    EXPECT_EQ(sequence_set_from_json(dense)[0], BinarySequence(5, {0, 2}));
}

TEST(SequenceSet, RejectsDuplicateLabelsAndMixedPeriods)
{
    EXPECT_THROW(SequenceSet({"a", "a"}, {BinarySequence(3, {0}), BinarySequence(3, {1})}), InputError);
    EXPECT_THROW(SequenceSet({"a", "b"}, {BinarySequence(3, {0}), BinarySequence(4, {1})}), InputError);
    SequenceSet set({"a", "b", "c"}, {BinarySequence(3, {0}), BinarySequence(3, {1}), BinarySequence(3, {2})});
    EXPECT_EQ(set.select({"c", "a"}).labels(), (std::vector<std::string>{"c", "a"}));
    EXPECT_THROW(set.by_label("z"), InputError);
}

TEST(Rng, StreamsAreReproducible)
{
    SplitMix64 a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 10; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
    }
    SplitMix64 r(3);
    for (int i = 0; i < 1000; ++i) EXPECT_LT(r.below(7), 7u);
}
