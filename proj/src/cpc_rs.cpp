#include "protoseq/cpc_rs.hpp"

#include "protoseq/errors.hpp"

#include <limits>

namespace protoseq {

void validate(const RsCpcParams& params)
{
    const auto [n, p, k] = params;
    require(is_prime(p), "field size p = " + std::to_string(p) + " is not prime");
    require(k >= 3, "dimension k must be at least 3");
    require(k < n, "dimension k must be below n");
    require(n <= p, "n must not exceed p");
    require((p - 1) % n == 0, "n = " + std::to_string(n) + " does not divide p - 1 = "
                                  + std::to_string(p - 1) + "; no element of order n exists");
}

std::optional<std::uint64_t> element_of_order(std::uint64_t n, std::uint64_t p)
{
    if (!is_prime(p) || n == 0 || (p - 1) % n != 0) return std::nullopt;
    for (std::uint64_t a = 1; a < p; ++a) {
        if (pow_mod(a, n, p) != 1) continue;
        bool exact = true;
        for (std::uint64_t d = 1; d < n && exact; ++d)
            if (n % d == 0 && pow_mod(a, d, p) == 1) exact = false;
        if (exact) return a;
    }
    return std::nullopt;
}

BinarySequence vp_represent(std::uint64_t symbol, std::uint64_t p)
{
    require(symbol < p, "field symbol " + std::to_string(symbol) + " outside [0, "
                            + std::to_string(p) + ")");
    return BinarySequence(p, {symbol});
}

namespace {

std::uint64_t checked_power(std::uint64_t base, std::uint64_t exp)
{
    std::uint64_t result = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (result > std::numeric_limits<std::uint64_t>::max() / base)
            return std::numeric_limits<std::uint64_t>::max();
        result *= base;
    }
    return result;
}

// Evaluates sum coeffs[i] x^i at the n points and flattens the p x n matrix.
BinarySequence flatten_codeword(const std::vector<std::uint64_t>& coeffs,
                                const std::vector<std::uint64_t>& points,
                                const CrtCorrespondence& gamma)
{
    const auto p = gamma.p();
    std::vector<std::uint64_t> ones;
    ones.reserve(points.size());
    for (std::uint64_t j = 0; j < points.size(); ++j) {
        std::uint64_t value = 0;
        for (auto c = coeffs.rbegin(); c != coeffs.rend(); ++c)
            value = (mul_mod(value, points[j], p) + *c) % p;
        ones.push_back(gamma.unmap({value, j}));
    }
    return BinarySequence(gamma.size(), std::move(ones));
}

std::vector<std::uint64_t> evaluation_points(const RsCpcParams& params, std::uint64_t alpha)
{
    std::vector<std::uint64_t> points(params.n);
    std::uint64_t x = 1;
    for (auto& pt : points) {
        pt = x;
        x = mul_mod(x, alpha, params.p);
    }
    return points;
}

// Message counter in base p, most significant digit first.
void increment(std::vector<std::uint64_t>& digits, std::uint64_t p)
{
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < p) return;
        digits[i] = 0;
    }
}

std::uint64_t resolve_count(std::optional<std::uint64_t> count, std::uint64_t available)
{
    if (!count) {
        require(available <= 10'000'000, "code has " + std::to_string(available)
                                              + " codewords; pass an explicit count");
        return available;
    }
    require(*count <= available, "requested " + std::to_string(*count) + " codewords but only "
                                     + std::to_string(available) + " exist");
    return *count;
}

} // namespace

SequenceSet rs_cpc(const RsCpcParams& params, std::optional<std::uint64_t> count)
{
    validate(params);
    const auto alpha = *element_of_order(params.n, params.p);
    const CrtCorrespondence gamma(params.p, params.n);
    const auto points = evaluation_points(params, alpha);
    const auto total = resolve_count(count, checked_power(params.p, params.k - 2));

    std::vector<std::uint64_t> message(params.k - 2, 0); // m_2 .. m_{k-1}
    std::vector<std::string> labels;
    std::vector<BinarySequence> members;
    for (std::uint64_t c = 0; c < total; ++c) {
        std::vector<std::uint64_t> coeffs{0, 1};
        coeffs.insert(coeffs.end(), message.begin(), message.end());
        members.push_back(flatten_codeword(coeffs, points, gamma));
        labels.push_back("c" + std::to_string(c));
        increment(message, params.p);
    }
    return SequenceSet(std::move(labels), std::move(members),
                       {{"construction", "rs_cpc"},
                        {"n", params.n},
                        {"p", params.p},
                        {"k", params.k},
                        {"alpha", alpha}});
}

SequenceSet rs_schedule(const RsCpcParams& params, std::optional<std::uint64_t> count)
{
    validate(params);
    const auto alpha = *element_of_order(params.n, params.p);
    const CrtCorrespondence gamma(params.p, params.n);
    const auto points = evaluation_points(params, alpha);
    const auto total = resolve_count(count, checked_power(params.p, params.k));

    std::vector<std::uint64_t> message(params.k, 0); // m_{k-1} .. m_0, m_{k-1} most significant
    std::vector<std::string> labels;
    std::vector<BinarySequence> members;
    for (std::uint64_t c = 0; c < total; ++c) {
        std::vector<std::uint64_t> coeffs(message.rbegin(), message.rend());
        members.push_back(flatten_codeword(coeffs, points, gamma));
        labels.push_back("r" + std::to_string(c));
        increment(message, params.p);
    }
    return SequenceSet(std::move(labels), std::move(members),
                       {{"construction", "rs_sched"},
                        {"n", params.n},
                        {"p", params.p},
                        {"k", params.k},
                        {"alpha", alpha}});
}

BinarySequence pad_silent(const BinarySequence& x, std::uint64_t delta)
{
    std::vector<std::uint64_t> ones;
    ones.reserve(x.weight());
    for (auto i : x.ones()) ones.push_back((delta + 1) * i);
    return BinarySequence((delta + 1) * x.period(), std::move(ones));
}

SequenceSet pad_silent(const SequenceSet& set, std::uint64_t delta)
{
    std::vector<BinarySequence> members;
    for (const auto& m : set.members()) members.push_back(pad_silent(m, delta));
    auto meta = set.meta();
    if (!meta.contains("unpadded_period")) meta["unpadded_period"] = set.period();
    meta["pad"] = delta;
    return SequenceSet(set.labels(), std::move(members), std::move(meta));
}

SequenceSet tdma_set(std::uint64_t G, std::uint64_t delta)
{
    require(G >= 1, "TDMA needs at least one cell");
    std::vector<std::string> labels;
    std::vector<BinarySequence> members;
    for (std::uint64_t i = 0; i < G; ++i) {
        labels.push_back("t" + std::to_string(i));
        members.push_back(BinarySequence((delta + 1) * G, {(delta + 1) * i}));
    }
    return SequenceSet(std::move(labels), std::move(members),
                       {{"construction", "tdma"}, {"G", G}, {"delta", delta}});
}

namespace {

// Least k >= min_k with p^(k - offset) >= G.
std::uint64_t least_k(std::uint64_t p, std::uint64_t G, std::uint64_t offset)
{
    std::uint64_t k = 3;
    while (checked_power(p, k - offset) < G) ++k;
    return k;
}

ParamChoice search(std::uint64_t M, std::uint64_t G, std::uint64_t offset, std::uint64_t scale,
                   const SearchLimits& limits, const char* rule)
{
    require(M >= 2, "M must be at least 2");
    require(G >= 1, "G must be at least 1");
    std::optional<ParamChoice> best;
    for (std::uint64_t p = std::max<std::uint64_t>(M, 2); p <= limits.max_p; ++p) {
        if (!is_prime(p)) continue;
        const auto k = least_k(p, G, offset);
        const auto min_n = std::max((k - 1) * (M - 1) + 1, k + 1);
        for (std::uint64_t n = min_n; n <= std::min(p, limits.max_n); ++n) {
            if ((p - 1) % n != 0) continue;
            const auto period = scale * n * p;
            if (!best || period < best->period) best = ParamChoice{{n, p, k}, period};
            break; // larger n only grows the period for this p
        }
    }
    if (!best)
        throw InfeasibleError(std::string("no feasible (n, p, k) for ") + rule + " with M = "
                              + std::to_string(M) + ", G = " + std::to_string(G)
                              + " within p <= " + std::to_string(limits.max_p)
                              + ", n <= " + std::to_string(limits.max_n));
    return *best;
}

} // namespace

ParamChoice select_params_prop1(std::uint64_t M, std::uint64_t G, std::uint64_t delta,
                                const SearchLimits& limits)
{
    return search(M, G, 0, delta + 1, limits, "p^k >= G");
}

ParamChoice select_params_prop2(std::uint64_t M, std::uint64_t G, const SearchLimits& limits)
{
    return search(M, G, 2, 2, limits, "p^(k-2) >= G");
}

LengthBounds length_bounds(std::uint64_t M)
{
    require(M >= 1, "M must be at least 1");
    return {M, (8 * M * M + 8) / 9};
}

} // namespace protoseq
