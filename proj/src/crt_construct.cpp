#include "protoseq/crt_construct.hpp"

#include "protoseq/errors.hpp"
#include "protoseq/verify.hpp"

#include <algorithm>
#include <numeric>

namespace protoseq {

namespace {

void check_crt_params(std::uint64_t p, std::uint64_t q)
{
    require(p >= 2, "CRT construction needs p >= 2");
    require(std::gcd(p, q) == 1, "p and q must be coprime");
    require(q >= 2 * p - 1, "CRT construction needs q >= 2p - 1");
}

} // namespace

BinarySequence crt_sequence(std::uint64_t p, std::uint64_t q, std::uint64_t generator)
{
    check_crt_params(p, q);
    require(generator < p, "sequence generator must lie in [0, p)");
    const CrtCorrespondence gamma(p, q);
    std::vector<std::uint64_t> ones;
    for (std::uint64_t j = 0; j < p; ++j) ones.push_back(gamma.unmap({(j * generator) % p, j}));
    return BinarySequence(p * q, std::move(ones));
}

BinarySequence crt_star_sequence(std::uint64_t p, std::uint64_t q)
{
    check_crt_params(p, q);
    const CrtCorrespondence gamma(p, q);
    std::vector<std::uint64_t> ones;
    for (std::uint64_t j = 0; j < p; ++j) ones.push_back(gamma.unmap({j, 0}));
    return BinarySequence(p * q, std::move(ones));
}

SequenceSet crt_set(std::uint64_t p, std::uint64_t q)
{
    check_crt_params(p, q);
    std::vector<std::string> labels;
    std::vector<BinarySequence> members;
    for (std::uint64_t g = 0; g < p; ++g) {
        labels.push_back("S" + std::to_string(g));
        members.push_back(crt_sequence(p, q, g));
    }
    return SequenceSet(std::move(labels), std::move(members),
                       {{"construction", "crt"}, {"p", p}, {"q", q}});
}

SequenceSet crt0_set(std::uint64_t p, std::uint64_t q)
{
    check_crt_params(p, q);
    std::vector<std::string> labels;
    std::vector<BinarySequence> members;
    for (std::uint64_t g = 0; g < p; ++g) {
        if (g == 1) continue;
        labels.push_back("S" + std::to_string(g));
        members.push_back(crt_sequence(p, q, g));
    }
    labels.push_back("S*");
    members.push_back(crt_star_sequence(p, q));
    return SequenceSet(std::move(labels), std::move(members),
                       {{"construction", "crt0"}, {"p", p}, {"q", q}});
}

BinarySequence product(const BinarySequence& x, const BinarySequence& y)
{
    const CrtCorrespondence gamma(x.period(), y.period());
    std::vector<std::uint64_t> ones;
    ones.reserve(x.weight() * y.weight());
    for (auto i : x.ones())
        for (auto j : y.ones()) ones.push_back(gamma.unmap({i, j}));
    return BinarySequence(gamma.size(), std::move(ones));
}

BinarySequence all_ones(std::uint64_t length)
{
    require(length >= 1, "all-ones sequence needs positive length");
    std::vector<std::uint64_t> ones(length);
    std::iota(ones.begin(), ones.end(), std::uint64_t{0});
    return BinarySequence(length, std::move(ones));
}

SequenceSet expanded_set(const ExpandedSetSpec& spec)
{
    const auto& base = spec.base_set;
    const auto p = spec.p;
    require(!base.empty(), "base set is empty");
    require(is_prime(p), "split parameter p must be prime");
    require(p <= spec.M, "split parameter p must not exceed M");
    require(spec.split_labels.size() == p, "exactly p split labels are required");
    {
        auto sorted = spec.split_labels;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                "split labels must be distinct");
    }
    for (const auto& l : spec.split_labels) base.by_label(l);

    const auto& meta = base.meta();
    require(meta.contains("n") && meta.contains("k"),
            "base set meta must record the code parameters n and k");
    const auto n = meta.at("n").get<std::uint64_t>();
    const auto k = meta.at("k").get<std::uint64_t>();
    require(k >= 1 && n >= (k - 1) * (spec.M - 1) + 1, "base set needs n >= (k-1)(M-1)+1");

    const std::uint64_t q0 = 2 * p - 1;
    const std::uint64_t inner = p * q0;
    const auto base_period = base.period();
    require(std::gcd(inner, base_period) == 1,
            "p(2p-1) = " + std::to_string(inner) + " must be coprime to the base period "
                + std::to_string(base_period));

    const auto audit = xcorr_bound_audit(base, k - 1);
    require(audit.holds(), "base set exceeds cross-correlation bound k-1 = " + std::to_string(k - 1));

    const auto chips = crt0_set(p, q0);
    const auto ones = all_ones(inner);

    std::vector<std::string> labels, p1_labels, p2_labels;
    std::vector<BinarySequence> members;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const auto& label = base.label(i);
        if (std::find(spec.split_labels.begin(), spec.split_labels.end(), label)
            != spec.split_labels.end())
            continue;
        p1_labels.push_back("U(x)" + label);
        members.push_back(product(ones, base[i]));
    }
    for (std::size_t i = 0; i < p; ++i) {
        p2_labels.push_back(chips.label(i) + "(x)" + spec.split_labels[i]);
        members.push_back(product(chips[i], base.by_label(spec.split_labels[i])));
    }
    labels = p1_labels;
    labels.insert(labels.end(), p2_labels.begin(), p2_labels.end());

    nlohmann::json out_meta = {
        {"construction", "expanded"},
        {"p", p},
        {"q", q0},
        {"n", n},
        {"k", k},
        {"M", spec.M},
        {"base_period", base_period},
        {"split_labels", spec.split_labels},
        {"p1_labels", p1_labels},
        {"p2_labels", p2_labels},
        {"base", meta},
    };
    return SequenceSet(std::move(labels), std::move(members), std::move(out_meta));
}

} // namespace protoseq
