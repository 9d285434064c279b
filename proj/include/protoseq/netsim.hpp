#pragma once

#include "protoseq/cpc_rs.hpp"
#include "protoseq/geo_alloc.hpp"
#include "protoseq/sequence_set.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace protoseq {

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s

/// ceil(R / (c tau)) in slots.
std::uint64_t delta_p(double R, double tau_s);

/// Time is carried in integer picoseconds inside the simulator.
using Picoseconds = std::int64_t;
Picoseconds to_ps(double seconds);
double to_seconds(Picoseconds t);

struct TimingModel {
    double tau_s = 1e-3;         // slot length
    std::uint64_t L = 1;         // slots per frame (sequence period)
    std::uint64_t F = 3;         // frames per superframe
    std::uint64_t delta_c = 0;   // clock-offset bound, slots
    std::uint64_t delta_p = 0;   // propagation bound, slots

    /// delta_p from (R, tau) unless slot-synchronized, where it is 0.
    static TimingModel make(double tau_s, std::uint64_t L, std::uint64_t F, std::uint64_t delta_c,
                            double R, bool slot_synchronized);

    std::uint64_t delta() const noexcept { return delta_c + delta_p; }
    double guard_s() const noexcept { return tau_s * static_cast<double>(delta()); }
    double superframe_s() const noexcept
    {
        return static_cast<double>(F * L) * tau_s + guard_s();
    }
    Picoseconds tau_ps() const { return to_ps(tau_s); }

    /// Throws InputError unless delta <= L and tau is positive.
    void validate() const;
};

struct UserSpec {
    std::string id;
    double x = 0.0;
    double y = 0.0;
    std::optional<double> offset_slots;      // fixed t_i - S_i in slots, else drawn
    std::optional<std::uint64_t> sequence;   // bypasses the reuse plan
    std::uint64_t phase = 0;                 // extra cyclic rotation of the sequence
};

struct Scenario {
    TimingModel timing;
    double R = 500.0;
    double h = 1.0;
    std::uint64_t M = 2;
    double v_mps = 0.0;
    std::uint64_t superframes = 1;
    // Idealised slot synchronisation: propagation delay is zero.
    bool slot_synchronized = false;
    std::vector<UserSpec> users;
    SequenceSet sequences;
    std::optional<ReusePlan> plan; // default: minimal plan for radius R + h

    ReusePlan effective_plan() const;
};

/// Largest number of points inside any closed disk of radius R.
std::uint64_t max_users_in_disk(const std::vector<Point>& points, double R);

/// Positions, cells, start offsets and sequences fixed for one superframe.
struct SuperframeState {
    std::uint64_t index = 0;
    std::vector<Point> positions;
    std::vector<HexCell> cells;
    std::vector<Picoseconds> start_ps;       // t_i - S_k
    std::vector<std::uint64_t> sequence;     // index into the scenario's set
};

/// Throws InputError when the scenario breaks a model invariant
/// (delta <= L, F >= 1, offsets within bounds, Maximum Interferer,
/// Fermion condition on the initial placement, sequence coverage).
void validate_scenario(const Scenario& s);

/// Per-superframe states for the whole run: initial placement, then a
/// seeded random walk (step <= v T) that keeps the M and Fermion limits.
std::vector<SuperframeState> plan_superframes(const Scenario& s, std::uint64_t seed);

struct Reception {
    std::uint64_t superframe = 0;
    std::size_t tx = 0;
    std::size_t rx = 0;
    std::uint64_t slot = 0;        // transmitter's slot index within the superframe
    Picoseconds start_ps = 0;      // arrival interval at the receiver, relative to S_k
    Picoseconds end_ps = 0;
    bool contention_free = false;
};

struct ReceptionLog {
    std::vector<SuperframeState> states;
    std::vector<Reception> receptions;
};

/// Physical layer for one superframe: arrival intervals at every receiver
/// within R of the transmitter; a reception is contention-free iff its
/// interval overlaps no other arrival and none of the receiver's own
/// transmissions (positive-measure overlap destroys both packets).
std::vector<Reception> simulate_superframe(const Scenario& s, const SuperframeState& state);

/// Superframe `superframe` of the seeded run.
ReceptionLog run_superframe(const Scenario& s, std::uint64_t seed, std::uint64_t superframe = 0);

/// Every superframe of the seeded run.
ReceptionLog simulate(const Scenario& s, std::uint64_t seed);

struct BlockFreeEntry {
    std::uint64_t superframe = 0;
    std::size_t rx = 0;
    std::size_t tx = 0;
    std::uint64_t frame = 0; // receiver-local frame index
    std::uint64_t contention_free = 0;
};

struct BlockFreeReport {
    bool verdict = true;
    std::vector<BlockFreeEntry> entries;
    std::vector<BlockFreeEntry> violations;
    std::uint64_t min_count = 0;
};

/// Audits normal frames (1 .. F-2 on the receiver's clock) for at least one
/// contention-free reception from every neighbour within R at superframe start.
BlockFreeReport check_block_free(const ReceptionLog& log, const Scenario& s);

struct FrameOffsetAudit {
    bool holds = true;
    std::uint64_t checked = 0;
    std::vector<Reception> violations;
};

/// Packets sent in normal frame i must be received wholly within receiver
/// frames j with |i - j| <= 1.
FrameOffsetAudit frame_offset_audit(const ReceptionLog& log, const Scenario& s);

struct AdversarialSpec {
    std::uint64_t steps_per_slot = 2;   // offset grid resolution
    std::uint64_t budget = 20000;       // maximum simulated offset vectors
    std::uint64_t seed = 1;             // used when the grid exceeds the budget
};

struct AdversarialResult {
    bool violation_found = false;
    std::uint64_t evaluated = 0;
    std::vector<double> offsets_slots;  // offending per-user offsets, if found
    std::optional<BlockFreeReport> report;
};

/**
 * Grid search over clock offsets of the most crowded receiver neighbourhood
 * (other users fixed at offset 0), hunting for a block-free violation in the
 * first superframe.
 */
AdversarialResult adversarial_offsets(const Scenario& s, const AdversarialSpec& spec);

// --- Baselines -------------------------------------------------------------

struct BaselineRow {
    std::string scheme;                 // "tdma", "prop1", "prop2"
    std::optional<RsCpcParams> params;
    std::uint64_t period = 0;
    bool ui_scheme = false;             // shift-invariant guarantee
    bool meets_floor = false;           // period >= ceil(8 M^2 / 9)
};

struct BaselineTable {
    std::uint64_t M = 0;
    std::uint64_t G = 0;
    std::uint64_t delta = 0;
    std::uint64_t floor = 0;
    std::vector<BaselineRow> rows;
    std::string winner;
    std::vector<std::string> notes;
};

BaselineTable baseline_compare(std::uint64_t M, std::uint64_t G, std::uint64_t delta,
                               const SearchLimits& limits = {});

/// A small clique scenario realising one row of the table: M users in
/// distinct cells of a plan with cluster size G, sequences from the scheme.
Scenario baseline_scenario(const BaselineTable& table, const BaselineRow& row);

// --- Serialisation ---------------------------------------------------------

/// Config keys: tau_s, L (optional), F, delta_c_slots, R_m, h_m, M, v_mps,
/// superframes, slot_synchronized, users | random_users, sequences, plan.
Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

nlohmann::json to_json(const BlockFreeReport& report, const Scenario& s);
nlohmann::json to_json(const FrameOffsetAudit& audit);
nlohmann::json to_json(const BaselineTable& table);

/// One row per reception: tx,rx,superframe,slot,t_arrive_s,t_end_s,contention_free.
std::string reception_csv(const ReceptionLog& log, const Scenario& s);

} // namespace protoseq
