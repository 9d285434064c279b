#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace protoseq {

/// Hexagonal quantization cell: oblique lattice coordinates on axes 60 degrees
/// apart. The centre sits at m*e1 + n*e2 with e1 = (d, 0), e2 = (d/2, d*sqrt(3)/2)
/// and d = sqrt(3) h.
struct HexCell {
    std::int64_t m = 0;
    std::int64_t n = 0;

    friend auto operator<=>(const HexCell&, const HexCell&) = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double lattice_spacing(double h);
Point cell_center(HexCell c, double h);

/// Nearest cell centre; ties go to the lexicographically smaller (m, n).
HexCell quantize(double x, double y, double h);

double cell_distance(HexCell a, HexCell b, double h);

std::int64_t loeschian(std::int64_t b1, std::int64_t b2);

struct ClusterSize {
    std::uint64_t G = 0;
    std::int64_t b1 = 0; // b1 >= b2 >= 0
    std::int64_t b2 = 0;
};

/// Smallest b1^2 + b1 b2 + b2^2 that is >= target.
ClusterSize smallest_loeschian_at_least(double target);

/// Cluster size for hearing radius R and cell radius h: the smallest
/// Loeschian value >= (2R/d)^2.
ClusterSize cluster_size(double R, double h);

/**
 * Cochannel reuse plan. Cells share a sequence iff they differ by an element
 * of the lattice spanned by u1 = (b1, b2) and u2 = (-b2, b1 + b2), which has
 * exactly G cosets and minimum cochannel distance d*sqrt(G).
 */
class ReusePlan {
public:
    ReusePlan(double h, double R, ClusterSize size);
    ReusePlan(double h, double R, ClusterSize size, std::vector<std::uint64_t> assignment);

    /// Plan for (R, h) using the minimal cluster size.
    static ReusePlan for_radius(double R, double h);

    double h() const noexcept { return h_; }
    double R() const noexcept { return R_; }
    std::uint64_t G() const noexcept { return size_.G; }
    std::int64_t b1() const noexcept { return size_.b1; }
    std::int64_t b2() const noexcept { return size_.b2; }

    /// Coset index in [0, G).
    std::uint64_t coset(HexCell c) const;
    /// Canonical representative of the coset with the given index.
    HexCell representative(std::uint64_t coset) const;
    /// Sequence index assigned to the cell's coset.
    std::uint64_t allocate(HexCell c) const;

    double min_cochannel_distance() const;
    const std::vector<std::uint64_t>& assignment() const noexcept { return assignment_; }

private:
    double h_;
    double R_;
    ClusterSize size_;
    // Hermite basis of the reuse lattice: (width, 0) and (shear, height).
    std::int64_t width_ = 1;
    std::int64_t height_ = 1;
    std::int64_t shear_ = 0;
    std::vector<std::uint64_t> assignment_; // coset -> sequence index; empty = identity
};

// Plan file: {"h", "R", "G", "b1", "b2", "assignment": {"m,n": label-or-index}}.
// Assignment entries name the coset representative; labels of the form
// "s<index>" or bare integers map to sequence indices.
nlohmann::json to_json(const ReusePlan& plan, bool with_assignment);
ReusePlan plan_from_json(const nlohmann::json& j);

struct PositionLogEntry {
    std::string user;
    std::uint64_t superframe = 0;
    HexCell cell;
};

struct FermionViolation {
    std::uint64_t superframe = 0;
    HexCell cell;
    std::vector<std::string> users;
};

/// Every (superframe, cell) occupied by two or more distinct users.
std::vector<FermionViolation> check_fermion(const std::vector<PositionLogEntry>& log);

struct CochannelAudit {
    std::uint64_t cells = 0;
    std::uint64_t pairs_checked = 0;
    std::optional<double> min_distance;  // over same-index pairs, if any
    std::optional<std::pair<HexCell, HexCell>> violation; // first pair closer than 2R
};

/// Exhaustive same-index pair audit on the patch 0 <= m, n < side.
CochannelAudit audit_cochannel(const ReusePlan& plan, std::int64_t side);

} // namespace protoseq
