#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protoseq {

/**
 * Periodic 0/1 sequence stored by its characteristic set, the sorted
 * positions in [0, period) that hold a one. Positions are 0-based: the
 * first entry of the sequence is position 0.
 *
 * Immutable after construction.
 */
class BinarySequence {
public:
    BinarySequence() = default;

    // Positions may arrive unsorted; duplicates or out-of-range values throw.
    BinarySequence(std::uint64_t period, std::vector<std::uint64_t> ones);

    static BinarySequence from_dense(std::span<const std::uint8_t> bits);
    static BinarySequence from_string(std::string_view bits);

    std::uint64_t period() const noexcept { return period_; }
    std::size_t weight() const noexcept { return ones_.size(); }
    const std::vector<std::uint64_t>& ones() const noexcept { return ones_; }

    bool at(std::uint64_t position) const;
    std::vector<std::uint8_t> dense() const;
    std::string to_string() const;

    friend bool operator==(const BinarySequence&, const BinarySequence&) = default;

private:
    std::uint64_t period_ = 1;
    std::vector<std::uint64_t> ones_;
};

inline std::uint64_t reduce_shift(std::int64_t shift, std::uint64_t period)
{
    const auto n = static_cast<std::int64_t>(period);
    auto r = shift % n;
    if (r < 0) r += n;
    return static_cast<std::uint64_t>(r);
}

/// R^shift: position i moves to (i + shift) mod period. Negative shifts allowed.
BinarySequence cyclic_shift(const BinarySequence& x, std::int64_t shift);

/// Number of coinciding ones between x and R^shift(y).
std::size_t hamming_xcorr(const BinarySequence& x, const BinarySequence& y, std::int64_t shift);

/// H(x, y)(t) for every t in [0, period).
std::vector<std::size_t> hamming_xcorr_profile(const BinarySequence& x, const BinarySequence& y);

/// Smallest t >= 1 with R^t x = x.
std::uint64_t cyclic_order(const BinarySequence& x);

/// Minimum circular gap between consecutive ones. Requires weight >= 2.
std::uint64_t min_separation(const BinarySequence& x);

/// Minimum over distinct members and all shifts of the Hamming distance.
std::uint64_t cyclic_min_distance(std::span<const BinarySequence> set);

/// True when some rotation of a equals b.
bool cyclically_equivalent(const BinarySequence& a, const BinarySequence& b);

// ---------------------------------------------------------------------------
// CRT correspondence between [0, p*q) and residue pairs (mod p, mod q).

struct CrtIndexPair {
    std::uint64_t row = 0; // residue mod p
    std::uint64_t col = 0; // residue mod q

    friend bool operator==(const CrtIndexPair&, const CrtIndexPair&) = default;
};

/// Precomputed CRT bijection for a fixed coprime pair (p, q).
class CrtCorrespondence {
public:
    CrtCorrespondence(std::uint64_t p, std::uint64_t q);

    std::uint64_t p() const noexcept { return p_; }
    std::uint64_t q() const noexcept { return q_; }
    std::uint64_t size() const noexcept { return p_ * q_; }

    CrtIndexPair map(std::uint64_t l) const;
    std::uint64_t unmap(CrtIndexPair pair) const;

private:
    std::uint64_t p_;
    std::uint64_t q_;
    std::uint64_t row_coeff_; // q * (q^-1 mod p)
    std::uint64_t col_coeff_; // p * (p^-1 mod q)
};

CrtIndexPair crt_map(std::uint64_t l, std::uint64_t p, std::uint64_t q);
std::uint64_t crt_unmap(CrtIndexPair pair, std::uint64_t p, std::uint64_t q);

// Small number-theory helpers shared by the constructions.
std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m);
bool is_prime(std::uint64_t n);

} // namespace protoseq
