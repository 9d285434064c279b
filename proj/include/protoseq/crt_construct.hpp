#pragma once

#include "protoseq/sequence_set.hpp"

#include <string>
#include <vector>

namespace protoseq {

/// Characteristic set I_g = { l : (l mod p, l mod q) = (j*g mod p, j), 0 <= j < p }.
BinarySequence crt_sequence(std::uint64_t p, std::uint64_t q, std::uint64_t generator);

/// I_* = { l : (l mod p, l mod q) = (j, 0), 0 <= j < p }.
BinarySequence crt_star_sequence(std::uint64_t p, std::uint64_t q);

/// The p CRT sequences S_0 .. S_{p-1}. Needs gcd(p, q) = 1 and q >= 2p - 1.
SequenceSet crt_set(std::uint64_t p, std::uint64_t q);

/// S_0, S_2, ..., S_{p-1} followed by S_*. Same preconditions as crt_set.
/// Pairwise cross-correlation over all shifts is at most 1 when p is prime.
SequenceSet crt0_set(std::uint64_t p, std::uint64_t q);

/// Sequence of period x.period() * y.period() whose CRT matrix is the outer
/// product of x (rows) and y (columns).
BinarySequence product(const BinarySequence& x, const BinarySequence& y);

BinarySequence all_ones(std::uint64_t length);

/**
 * Input to the split construction. The base set is cyclically permutable
 * with period n*q_field, pairwise cross-correlation at most k - 1 and
 * n >= (k - 1)(M - 1) + 1; n and k come from the base set's meta record.
 */
struct ExpandedSetSpec {
    SequenceSet base_set;
    std::vector<std::string> split_labels; // the p members that get split
    std::uint64_t p = 0;                   // prime, p <= M
    std::uint64_t M = 0;                   // maximum local users
};

/**
 * Replaces each split member S_i with C_i (x) S_i, C_i the i-th member of
 * crt0_set(p, 2p - 1) in label order, and every other member X with
 * U (x) X where U is all-ones of length p(2p - 1). The result lists the
 * unsplit products first (meta "p1_labels") then the split products
 * (meta "p2_labels").
 */
SequenceSet expanded_set(const ExpandedSetSpec& spec);

} // namespace protoseq
