#include "protoseq/geo_alloc.hpp"

#include "protoseq/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

namespace protoseq {

namespace {

const double kSqrt3 = std::sqrt(3.0);

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    auto q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

// Returns (g, s, t) with s*a + t*b = g = gcd(a, b).
std::tuple<std::int64_t, std::int64_t, std::int64_t> ext_gcd(std::int64_t a, std::int64_t b)
{
    std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const auto q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
        old_t -= q * t;
        std::swap(old_t, t);
    }
    return {old_r, old_s, old_t};
}

} // namespace

double lattice_spacing(double h) { return kSqrt3 * h; }

Point cell_center(HexCell c, double h)
{
    const double d = lattice_spacing(h);
    return {d * (static_cast<double>(c.m) + 0.5 * static_cast<double>(c.n)),
            d * kSqrt3 / 2.0 * static_cast<double>(c.n)};
}

HexCell quantize(double x, double y, double h)
{
    require(h > 0.0, "cell radius h must be positive");
    const double d = lattice_spacing(h);
    const double nf = y / (d * kSqrt3 / 2.0);
    const double mf = x / d - nf / 2.0;
    const auto m0 = static_cast<std::int64_t>(std::floor(mf));
    const auto n0 = static_cast<std::int64_t>(std::floor(nf));
    HexCell best{};
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::int64_t m = m0 - 1; m <= m0 + 2; ++m) {
        for (std::int64_t n = n0 - 1; n <= n0 + 2; ++n) {
            const auto c = cell_center({m, n}, h);
            const double d2 = (c.x - x) * (c.x - x) + (c.y - y) * (c.y - y);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = {m, n};
            }
        }
    }
    return best;
}

double cell_distance(HexCell a, HexCell b, double h)
{
    const auto u = a.m - b.m;
    const auto v = a.n - b.n;
    return lattice_spacing(h) * std::sqrt(static_cast<double>(loeschian(u, v)));
}

std::int64_t loeschian(std::int64_t b1, std::int64_t b2) { return b1 * b1 + b1 * b2 + b2 * b2; }

ClusterSize smallest_loeschian_at_least(double target)
{
    require(std::isfinite(target), "cluster target must be finite");
    // Relative slack absorbs rounding when the target is an exact Loeschian value.
    const double goal = target * (1.0 - 1e-12);
    if (goal <= 1.0) return {1, 1, 0};
    const auto limit = static_cast<std::int64_t>(std::ceil(std::sqrt(target))) + 1;
    ClusterSize best{std::numeric_limits<std::uint64_t>::max(), 0, 0};
    for (std::int64_t b1 = 1; b1 <= limit; ++b1) {
        for (std::int64_t b2 = 0; b2 <= b1; ++b2) {
            const auto v = loeschian(b1, b2);
            if (static_cast<double>(v) < goal) continue;
            if (static_cast<std::uint64_t>(v) < best.G) best = {static_cast<std::uint64_t>(v), b1, b2};
            break; // larger b2 only grows v
        }
    }
    return best;
}

ClusterSize cluster_size(double R, double h)
{
    require(R > 0.0 && h > 0.0, "R and h must be positive");
    const double ratio = 2.0 * R / lattice_spacing(h);
    return smallest_loeschian_at_least(ratio * ratio);
}

ReusePlan::ReusePlan(double h, double R, ClusterSize size) : ReusePlan(h, R, size, {}) {}

ReusePlan::ReusePlan(double h, double R, ClusterSize size, std::vector<std::uint64_t> assignment)
    : h_(h), R_(R), size_(size), assignment_(std::move(assignment))
{
    require(h > 0.0 && R > 0.0, "plan needs positive h and R");
    require(size.b1 >= 0 && size.b2 >= 0, "b1 and b2 must be non-negative");
    require(size.G >= 1 && static_cast<std::int64_t>(size.G) == loeschian(size.b1, size.b2),
            "G must equal b1^2 + b1 b2 + b2^2");
    const auto [g, s, t] = ext_gcd(size.b2, size.b1 + size.b2);
    height_ = g;
    width_ = static_cast<std::int64_t>(size.G) / g;
    shear_ = floor_mod(s * size.b1 - t * size.b2, width_);
    if (!assignment_.empty()) {
        require(assignment_.size() == size.G, "assignment must cover all G cosets");
        std::set<std::uint64_t> seen(assignment_.begin(), assignment_.end());
        require(seen.size() == assignment_.size(), "assignment must be one-to-one");
    }
}

ReusePlan ReusePlan::for_radius(double R, double h) { return ReusePlan(h, R, cluster_size(R, h)); }

std::uint64_t ReusePlan::coset(HexCell c) const
{
    const auto t = floor_div(c.n, height_);
    const auto row = c.n - t * height_;
    const auto col = floor_mod(c.m - t * shear_, width_);
    return static_cast<std::uint64_t>(row * width_ + col);
}

HexCell ReusePlan::representative(std::uint64_t coset) const
{
    require(coset < size_.G, "coset index out of range");
    const auto idx = static_cast<std::int64_t>(coset);
    return {idx % width_, idx / width_};
}

std::uint64_t ReusePlan::allocate(HexCell c) const
{
    const auto k = coset(c);
    return assignment_.empty() ? k : assignment_[k];
}

double ReusePlan::min_cochannel_distance() const
{
    return lattice_spacing(h_) * std::sqrt(static_cast<double>(size_.G));
}

nlohmann::json to_json(const ReusePlan& plan, bool with_assignment)
{
    nlohmann::json j = {{"h", plan.h()}, {"R", plan.R()}, {"G", plan.G()},
                        {"b1", plan.b1()}, {"b2", plan.b2()}};
    if (with_assignment) {
        nlohmann::json a = nlohmann::json::object();
        for (std::uint64_t k = 0; k < plan.G(); ++k) {
            const auto rep = plan.representative(k);
            a[std::to_string(rep.m) + "," + std::to_string(rep.n)] = plan.allocate(rep);
        }
        j["assignment"] = std::move(a);
    }
    return j;
}

ReusePlan plan_from_json(const nlohmann::json& j)
{
    require(j.is_object(), "plan must be a JSON object");
    const double h = j.at("h").get<double>();
    const double R = j.at("R").get<double>();
    ClusterSize size;
    if (j.contains("G")) {
        size = {j.at("G").get<std::uint64_t>(), j.at("b1").get<std::int64_t>(),
                j.at("b2").get<std::int64_t>()};
    } else {
        size = cluster_size(R, h);
    }
    ReusePlan base(h, R, size);
    if (!j.contains("assignment")) return base;

    std::vector<std::uint64_t> assignment(size.G, std::numeric_limits<std::uint64_t>::max());
    for (const auto& [key, value] : j.at("assignment").items()) {
        const auto comma = key.find(',');
        require(comma != std::string::npos, "assignment key '" + key + "' is not 'm,n'");
        const HexCell cell{std::stoll(key.substr(0, comma)), std::stoll(key.substr(comma + 1))};
        std::uint64_t index = 0;
        if (value.is_number_unsigned()) {
            index = value.get<std::uint64_t>();
        } else {
            const auto label = value.get<std::string>();
            const auto digits = label.find_first_of("0123456789");
            require(digits != std::string::npos, "cannot read sequence index from '" + label + "'");
            index = std::stoull(label.substr(digits));
        }
        auto& slot = assignment[base.coset(cell)];
        require(slot == std::numeric_limits<std::uint64_t>::max(),
                "coset of cell " + key + " assigned twice");
        slot = index;
    }
    for (auto a : assignment)
        require(a != std::numeric_limits<std::uint64_t>::max(), "assignment misses a coset");
    return ReusePlan(h, R, size, std::move(assignment));
}

std::vector<FermionViolation> check_fermion(const std::vector<PositionLogEntry>& log)
{
    std::map<std::pair<std::uint64_t, HexCell>, std::set<std::string>> occupancy;
    for (const auto& e : log) occupancy[{e.superframe, e.cell}].insert(e.user);
    std::vector<FermionViolation> out;
    for (const auto& [key, users] : occupancy)
        if (users.size() >= 2)
            out.push_back({key.first, key.second, std::vector<std::string>(users.begin(), users.end())});
    return out;
}

CochannelAudit audit_cochannel(const ReusePlan& plan, std::int64_t side)
{
    require(side >= 1, "patch side must be positive");
    std::unordered_map<std::uint64_t, std::vector<HexCell>> groups;
    for (std::int64_t m = 0; m < side; ++m)
        for (std::int64_t n = 0; n < side; ++n) groups[plan.allocate({m, n})].push_back({m, n});

    CochannelAudit audit;
    audit.cells = static_cast<std::uint64_t>(side * side);
    // Compare in units of d^2: cells closer than 2R iff loeschian < (2R/d)^2.
    const double d = lattice_spacing(plan.h());
    const double limit = (2.0 * plan.R() / d) * (2.0 * plan.R() / d) * (1.0 - 1e-12);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& [index, cells] : groups) {
        for (std::size_t a = 0; a < cells.size(); ++a) {
            for (std::size_t b = a + 1; b < cells.size(); ++b) {
                const auto l = loeschian(cells[a].m - cells[b].m, cells[a].n - cells[b].n);
                ++audit.pairs_checked;
                if (l < best) best = l;
                if (static_cast<double>(l) < limit && !audit.violation)
                    audit.violation = std::make_pair(cells[a], cells[b]);
            }
        }
    }
    if (best != std::numeric_limits<std::int64_t>::max())
        audit.min_distance = d * std::sqrt(static_cast<double>(best));
    return audit;
}

} // namespace protoseq
