#include "protoseq/sequence.hpp"

#include "protoseq/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace protoseq {

BinarySequence::BinarySequence(std::uint64_t period, std::vector<std::uint64_t> ones)
    : period_(period), ones_(std::move(ones))
{
    require(period_ >= 1, "sequence period must be positive");
    std::sort(ones_.begin(), ones_.end());
    if (std::adjacent_find(ones_.begin(), ones_.end()) != ones_.end())
        throw InputError("duplicate position in characteristic set");
    if (!ones_.empty() && ones_.back() >= period_)
        throw InputError("position " + std::to_string(ones_.back()) + " outside period "
                         + std::to_string(period_));
}

BinarySequence BinarySequence::from_dense(std::span<const std::uint8_t> bits)
{
    require(!bits.empty(), "dense sequence must not be empty");
    std::vector<std::uint64_t> ones;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        require(bits[i] <= 1, "dense sequence entries must be 0 or 1");
        if (bits[i]) ones.push_back(i);
    }
    return BinarySequence(bits.size(), std::move(ones));
}

BinarySequence BinarySequence::from_string(std::string_view bits)
{
    require(!bits.empty(), "dense sequence string must not be empty");
    std::vector<std::uint64_t> ones;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1')
            ones.push_back(i);
        else
            require(bits[i] == '0', std::string("unexpected character '") + bits[i]
                                        + "' in dense sequence");
    }
    return BinarySequence(bits.size(), std::move(ones));
}

bool BinarySequence::at(std::uint64_t position) const
{
    return std::binary_search(ones_.begin(), ones_.end(), position % period_);
}

std::vector<std::uint8_t> BinarySequence::dense() const
{
    std::vector<std::uint8_t> out(period_, 0);
    for (auto i : ones_) out[i] = 1;
    return out;
}

std::string BinarySequence::to_string() const
{
    std::string out(period_, '0');
    for (auto i : ones_) out[i] = '1';
    return out;
}

BinarySequence cyclic_shift(const BinarySequence& x, std::int64_t shift)
{
    const auto n = x.period();
    const auto t = reduce_shift(shift, n);
    std::vector<std::uint64_t> ones;
    ones.reserve(x.weight());
    for (auto i : x.ones()) ones.push_back((i + t) % n);
    return BinarySequence(n, std::move(ones));
}

std::vector<std::size_t> hamming_xcorr_profile(const BinarySequence& x, const BinarySequence& y)
{
    require(x.period() == y.period(), "cross-correlation needs equal periods");
    const auto n = x.period();
    std::vector<std::size_t> profile(n, 0);
    // x(i) = 1 and y(i - t) = 1  <=>  t = i - j for some one j of y.
    for (auto i : x.ones())
        for (auto j : y.ones()) ++profile[(i + n - j) % n];
    return profile;
}

std::size_t hamming_xcorr(const BinarySequence& x, const BinarySequence& y, std::int64_t shift)
{
    require(x.period() == y.period(), "cross-correlation needs equal periods");
    const auto n = x.period();
    const auto t = reduce_shift(shift, n);
    std::size_t hits = 0;
    for (auto j : y.ones())
        if (std::binary_search(x.ones().begin(), x.ones().end(), (j + t) % n)) ++hits;
    return hits;
}

namespace {

bool invariant_under(const BinarySequence& x, std::uint64_t t)
{
    const auto n = x.period();
    return std::all_of(x.ones().begin(), x.ones().end(), [&](std::uint64_t i) {
        return std::binary_search(x.ones().begin(), x.ones().end(), (i + t) % n);
    });
}

} // namespace

std::uint64_t cyclic_order(const BinarySequence& x)
{
    const auto n = x.period();
    if (x.weight() == 0 || x.weight() == n) return 1;
    for (std::uint64_t t = 1; t < n; ++t) {
        if (n % t != 0) continue;
        if (invariant_under(x, t)) return t;
    }
    return n;
}

std::uint64_t min_separation(const BinarySequence& x)
{
    require(x.weight() >= 2, "min_separation needs at least two ones");
    const auto& ones = x.ones();
    std::uint64_t best = x.period() - ones.back() + ones.front();
    for (std::size_t i = 1; i < ones.size(); ++i) best = std::min(best, ones[i] - ones[i - 1]);
    return best;
}

std::uint64_t cyclic_min_distance(std::span<const BinarySequence> set)
{
    require(set.size() >= 2, "cyclic minimum distance needs at least two codewords");
    const auto n = set.front().period();
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t a = 0; a < set.size(); ++a) {
        require(set[a].period() == n, "codewords must share a period");
        for (std::size_t b = a + 1; b < set.size(); ++b) {
            // d(X, R^i Y) = w(X) + w(Y) - 2 H(X, Y)(i); symmetric in the pair order.
            const auto profile = hamming_xcorr_profile(set[a], set[b]);
            const auto peak = *std::max_element(profile.begin(), profile.end());
            best = std::min<std::uint64_t>(best, set[a].weight() + set[b].weight() - 2 * peak);
        }
    }
    return best;
}

bool cyclically_equivalent(const BinarySequence& a, const BinarySequence& b)
{
    if (a.period() != b.period() || a.weight() != b.weight()) return false;
    if (a.weight() == 0) return true;
    const auto n = a.period();
    const auto anchor = b.ones().front();
    for (auto i : a.ones()) {
        const std::uint64_t t = (anchor + n - i) % n;
        if (cyclic_shift(a, static_cast<std::int64_t>(t)) == b) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m)
{
    if (m == 1) return 0;
    std::int64_t old_r = static_cast<std::int64_t>(a % m), r = static_cast<std::int64_t>(m);
    std::int64_t old_s = 1, s = 0;
    while (r != 0) {
        const auto quot = old_r / r;
        old_r -= quot * r;
        std::swap(old_r, r);
        old_s -= quot * s;
        std::swap(old_s, s);
    }
    require(old_r == 1, "value has no inverse modulo " + std::to_string(m));
    auto inv = old_s % static_cast<std::int64_t>(m);
    if (inv < 0) inv += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(inv);
}

bool is_prime(std::uint64_t n)
{
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

CrtCorrespondence::CrtCorrespondence(std::uint64_t p, std::uint64_t q) : p_(p), q_(q)
{
    require(p >= 1 && q >= 1, "CRT moduli must be positive");
    require(std::gcd(p, q) == 1, "CRT moduli " + std::to_string(p) + " and " + std::to_string(q)
                                     + " are not coprime");
    const auto pq = p * q;
    row_coeff_ = mul_mod(q, inverse_mod(q % p, p), pq);
    col_coeff_ = mul_mod(p, inverse_mod(p % q, q), pq);
}

CrtIndexPair CrtCorrespondence::map(std::uint64_t l) const
{
    require(l < size(), "CRT index out of range");
    return {l % p_, l % q_};
}

std::uint64_t CrtCorrespondence::unmap(CrtIndexPair pair) const
{
    require(pair.row < p_ && pair.col < q_, "CRT residue pair out of range");
    const auto pq = size();
    return (mul_mod(pair.row, row_coeff_, pq) + mul_mod(pair.col, col_coeff_, pq)) % pq;
}

CrtIndexPair crt_map(std::uint64_t l, std::uint64_t p, std::uint64_t q)
{
    return CrtCorrespondence(p, q).map(l);
}

std::uint64_t crt_unmap(CrtIndexPair pair, std::uint64_t p, std::uint64_t q)
{
    return CrtCorrespondence(p, q).unmap(pair);
}

} // namespace protoseq
