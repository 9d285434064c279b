#pragma once

#include "protoseq/sequence_set.hpp"

#include <cstdint>
#include <optional>

namespace protoseq {

/// Parameters of the Reed-Solomon based cyclically permutable code.
/// Valid when p is prime, 3 <= k < n <= p and n divides p - 1.
struct RsCpcParams {
    std::uint64_t n = 0; // evaluation points (columns)
    std::uint64_t p = 0; // field size (rows)
    std::uint64_t k = 0; // message dimension

    friend bool operator==(const RsCpcParams&, const RsCpcParams&) = default;
};

void validate(const RsCpcParams& params);

/// Smallest element of GF(p) with multiplicative order exactly n.
std::optional<std::uint64_t> element_of_order(std::uint64_t n, std::uint64_t p);

/// Length-p unit sequence with its one at position `symbol`.
BinarySequence vp_represent(std::uint64_t symbol, std::uint64_t p);

/**
 * Codewords f(x) = x + m_2 x^2 + ... + m_{k-1} x^{k-1} evaluated at
 * alpha^0 .. alpha^{n-1} (alpha of order n). Column j carries symbol f(alpha^j);
 * the p x n matrix is flattened by the CRT correspondence, so each image has
 * period pn, weight n and full cyclic order, and images are pairwise
 * cyclically distinct with cross-correlation at most k - 1.
 *
 * Messages are enumerated lexicographically (m_2 most significant); `count`
 * limits output to the first `count` codewords (default: all p^(k-2)).
 */
SequenceSet rs_cpc(const RsCpcParams& params, std::optional<std::uint64_t> count = std::nullopt);

/// Plain code-based schedule: all polynomials of degree < k (first `count`
/// in lexicographic order), same flattening. Distinct members overlap in at
/// most k - 1 positions at zero relative shift; not shift-invariant.
SequenceSet rs_schedule(const RsCpcParams& params, std::optional<std::uint64_t> count = std::nullopt);

/// Each slot followed by `delta` silent slots: position i -> (delta + 1) i.
BinarySequence pad_silent(const BinarySequence& x, std::uint64_t delta);
SequenceSet pad_silent(const SequenceSet& set, std::uint64_t delta);

/// G weight-one sequences, member i active at slot (delta + 1) i.
SequenceSet tdma_set(std::uint64_t G, std::uint64_t delta);

struct ParamChoice {
    RsCpcParams params;
    std::uint64_t period = 0;
};

struct SearchLimits {
    std::uint64_t max_p = 997;
    std::uint64_t max_n = 997;
};

/// Minimises L = (delta + 1) n p subject to p^k >= G, n >= (k-1)(M-1)+1,
/// p >= M. Ties go to smaller p, then smaller n; k is the least feasible.
ParamChoice select_params_prop1(std::uint64_t M, std::uint64_t G, std::uint64_t delta,
                                const SearchLimits& limits = {});

/// As above with p^(k-2) >= G and L = 2np (one silent slot per slot).
ParamChoice select_params_prop2(std::uint64_t M, std::uint64_t G, const SearchLimits& limits = {});

struct LengthBounds {
    std::uint64_t weight = 0;    // w >= M
    std::uint64_t quadratic = 0; // ceil(8 M^2 / 9)
};

LengthBounds length_bounds(std::uint64_t M);

} // namespace protoseq
