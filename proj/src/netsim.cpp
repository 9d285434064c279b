#include "protoseq/netsim.hpp"

#include "protoseq/crt_construct.hpp"
#include "protoseq/errors.hpp"
#include "protoseq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace protoseq {

std::uint64_t delta_p(double R, double tau_s)
{
    require(R >= 0.0 && std::isfinite(R), "R must be non-negative");
    require(tau_s > 0.0 && std::isfinite(tau_s), "tau must be positive");
    return static_cast<std::uint64_t>(std::ceil(R / (kSpeedOfLight * tau_s)));
}

Picoseconds to_ps(double seconds) { return std::llround(seconds * 1e12); }
double to_seconds(Picoseconds t) { return static_cast<double>(t) * 1e-12; }

TimingModel TimingModel::make(double tau_s, std::uint64_t L, std::uint64_t F,
                              std::uint64_t delta_c, double R, bool slot_synchronized)
{
    TimingModel t;
    t.tau_s = tau_s;
    t.L = L;
    t.F = F;
    t.delta_c = delta_c;
    t.delta_p = slot_synchronized ? 0 : protoseq::delta_p(R, tau_s);
    return t;
}

void TimingModel::validate() const
{
    require(tau_s > 0.0 && std::isfinite(tau_s), "tau must be positive");
    require(tau_ps() >= 1, "tau below one picosecond is not representable");
    require(L >= 1, "frame length L must be positive");
    require(delta() <= L, "delta = " + std::to_string(delta()) + " exceeds frame length L = "
                              + std::to_string(L));
}

ReusePlan Scenario::effective_plan() const
{
    // Quantization moves a user by up to h, so two users that are both
    // within R of one receiver sit in cells up to 2(R + h) apart.
    return plan ? *plan : ReusePlan::for_radius(R + h, h);
}

// ---------------------------------------------------------------------------
// Geometry helpers

namespace {

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool within_disk(Point p, Point c, double R) { return dist(p, c) <= R * (1.0 + 1e-9); }

std::uint64_t count_in_disk(const std::vector<Point>& pts, Point c, double R)
{
    std::uint64_t n = 0;
    for (const auto& p : pts) n += within_disk(p, c, R) ? 1 : 0;
    return n;
}

} // namespace

std::uint64_t max_users_in_disk(const std::vector<Point>& points, double R)
{
    require(R > 0.0, "disk radius must be positive");
    if (points.empty()) return 0;
    std::uint64_t best = 1;
    // An optimal disk can be moved until two points lie on its boundary, or
    // it holds a single point; so these centres suffice.
    for (std::size_t i = 0; i < points.size(); ++i) {
        best = std::max(best, count_in_disk(points, points[i], R));
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double dd = dist(points[i], points[j]);
            if (dd == 0.0 || dd > 2.0 * R) continue;
            const Point mid{(points[i].x + points[j].x) / 2, (points[i].y + points[j].y) / 2};
            const double off = std::sqrt(std::max(0.0, R * R - dd * dd / 4.0));
            const double ux = -(points[j].y - points[i].y) / dd;
            const double uy = (points[j].x - points[i].x) / dd;
            best = std::max(best, count_in_disk(points, {mid.x + off * ux, mid.y + off * uy}, R));
            best = std::max(best, count_in_disk(points, {mid.x - off * ux, mid.y - off * uy}, R));
        }
    }
    return best;
}

namespace {

// Largest disk count among disks containing points[idx]; only points within 2R matter.
std::uint64_t max_users_around(const std::vector<Point>& points, std::size_t idx, double R)
{
    std::vector<Point> local{points[idx]};
    for (std::size_t i = 0; i < points.size(); ++i)
        if (i != idx && dist(points[i], points[idx]) <= 2.0 * R * (1.0 + 1e-9))
            local.push_back(points[i]);
    return max_users_in_disk(local, R);
}

std::uint64_t resolve_sequence(const Scenario& s, const ReusePlan& plan, std::size_t user,
                               HexCell cell)
{
    const auto index = s.users[user].sequence ? *s.users[user].sequence : plan.allocate(cell);
    require(index < s.sequences.size(),
            "user '" + s.users[user].id + "' needs sequence " + std::to_string(index)
                + " but the set has " + std::to_string(s.sequences.size()));
    return index;
}

} // namespace

void validate_scenario(const Scenario& s)
{
    s.timing.validate();
    require(s.timing.F >= 3, "F must be at least 3 so that a normal frame exists");
    require(s.R > 0.0 && s.h > 0.0, "R and h must be positive");
    require(s.M >= 1, "M must be at least 1");
    require(s.v_mps >= 0.0, "speed must be non-negative");
    require(s.superframes >= 1, "at least one superframe is needed");
    require(!s.sequences.empty(), "scenario has no sequences");
    require(s.sequences.period() == s.timing.L,
            "sequence period " + std::to_string(s.sequences.period())
                + " differs from frame length L = " + std::to_string(s.timing.L));
    if (s.slot_synchronized)
        require(s.timing.delta_p == 0, "slot-synchronized scenarios have no propagation skew");

    std::set<std::string> ids;
    std::vector<Point> pts;
    std::map<HexCell, std::string> cells;
    const auto plan = s.effective_plan();
    for (std::size_t i = 0; i < s.users.size(); ++i) {
        const auto& u = s.users[i];
        require(ids.insert(u.id).second, "duplicate user id '" + u.id + "'");
        if (u.offset_slots) {
            require(*u.offset_slots >= 0.0
                        && *u.offset_slots <= static_cast<double>(s.timing.delta_c),
                    "user '" + u.id + "' offset outside [0, delta_c]");
        }
        const auto cell = quantize(u.x, u.y, s.h);
        const auto [it, fresh] = cells.emplace(cell, u.id);
        require(fresh, "users '" + it->second + "' and '" + u.id + "' share cell ("
                           + std::to_string(cell.m) + "," + std::to_string(cell.n) + ")");
        resolve_sequence(s, plan, i, cell);
        pts.push_back({u.x, u.y});
    }
    const auto crowd = max_users_in_disk(pts, s.R);
    require(crowd <= s.M, std::to_string(crowd) + " users fit in one disk of radius R but M = "
                              + std::to_string(s.M));
}

std::vector<SuperframeState> plan_superframes(const Scenario& s, std::uint64_t seed)
{
    validate_scenario(s);
    const auto plan = s.effective_plan();
    const auto n = s.users.size();
    const Picoseconds tau = s.timing.tau_ps();
    const double step = s.v_mps * s.timing.superframe_s();

    std::vector<Point> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = {s.users[i].x, s.users[i].y};

    std::vector<SuperframeState> out;
    for (std::uint64_t k = 0; k < s.superframes; ++k) {
        SplitMix64 rng(seed, k);
        if (k > 0 && step > 0.0) {
            std::map<HexCell, std::size_t> occupied;
            for (std::size_t i = 0; i < n; ++i) occupied[quantize(pos[i].x, pos[i].y, s.h)] = i;
            for (std::size_t i = 0; i < n; ++i) {
                const double angle = 2.0 * std::numbers::pi * rng.unit();
                const double r = step * rng.unit();
                const Point old = pos[i];
                const Point cand{old.x + r * std::cos(angle), old.y + r * std::sin(angle)};
                const auto old_cell = quantize(old.x, old.y, s.h);
                const auto new_cell = quantize(cand.x, cand.y, s.h);
                if (new_cell != old_cell && occupied.contains(new_cell)) continue;
                pos[i] = cand;
                if (max_users_around(pos, i, s.R) > s.M) {
                    pos[i] = old; // a blocked move leaves the user in place
                    continue;
                }
                occupied.erase(old_cell);
                occupied[new_cell] = i;
            }
        }

        SuperframeState st;
        st.index = k;
        st.positions = pos;
        for (std::size_t i = 0; i < n; ++i) {
            const auto cell = quantize(pos[i].x, pos[i].y, s.h);
            st.cells.push_back(cell);
            st.sequence.push_back(resolve_sequence(s, plan, i, cell));
            const auto max_offset = static_cast<std::uint64_t>(tau) * s.timing.delta_c;
            const auto drawn = static_cast<Picoseconds>(rng.below(max_offset + 1));
            const auto& fixed = s.users[i].offset_slots;
            st.start_ps.push_back(fixed ? std::llround(*fixed * static_cast<double>(tau)) : drawn);
        }
        out.push_back(std::move(st));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Physical layer

namespace {

struct Arrival {
    Picoseconds start;
    Picoseconds end;
    std::size_t reception; // index into the output, or npos for own transmissions
};

constexpr std::size_t kOwn = static_cast<std::size_t>(-1);

std::vector<std::uint64_t> transmit_slots(const Scenario& s, const SuperframeState& st,
                                          std::size_t user)
{
    const auto& base = s.sequences[st.sequence[user]];
    const auto rotated = cyclic_shift(base, static_cast<std::int64_t>(s.users[user].phase));
    std::vector<std::uint64_t> slots;
    slots.reserve(rotated.weight() * s.timing.F);
    for (std::uint64_t f = 0; f < s.timing.F; ++f)
        for (auto pos : rotated.ones()) slots.push_back(f * s.timing.L + pos);
    return slots;
}

} // namespace

std::vector<Reception> simulate_superframe(const Scenario& s, const SuperframeState& st)
{
    const auto n = st.positions.size();
    const Picoseconds tau = s.timing.tau_ps();
    std::vector<std::vector<std::uint64_t>> slots(n);
    for (std::size_t i = 0; i < n; ++i) slots[i] = transmit_slots(s, st, i);

    std::vector<Reception> out;
    for (std::size_t rx = 0; rx < n; ++rx) {
        std::vector<Arrival> arrivals;
        for (auto slot : slots[rx]) {
            const auto start = st.start_ps[rx] + static_cast<Picoseconds>(slot) * tau;
            arrivals.push_back({start, start + tau, kOwn});
        }
        for (std::size_t tx = 0; tx < n; ++tx) {
            if (tx == rx) continue;
            const double d = dist(st.positions[tx], st.positions[rx]);
            if (d >= s.R) continue; // beyond hearing distance: ignored entirely
            const Picoseconds delay = s.slot_synchronized ? 0 : to_ps(d / kSpeedOfLight);
            for (auto slot : slots[tx]) {
                const auto start = st.start_ps[tx] + static_cast<Picoseconds>(slot) * tau + delay;
                arrivals.push_back({start, start + tau, out.size()});
                out.push_back({st.index, tx, rx, slot, start, start + tau, true});
            }
        }
        std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
            return a.start != b.start ? a.start < b.start : a.end < b.end;
        });
        // After sorting by start, an interval overlaps something iff an
        // earlier one ends after its start or the next one starts before its end.
        Picoseconds reach = std::numeric_limits<Picoseconds>::min();
        for (std::size_t i = 0; i < arrivals.size(); ++i) {
            const auto& a = arrivals[i];
            const bool hit_before = reach > a.start;
            const bool hit_after = i + 1 < arrivals.size() && arrivals[i + 1].start < a.end;
            if ((hit_before || hit_after) && a.reception != kOwn)
                out[a.reception].contention_free = false;
            reach = std::max(reach, a.end);
        }
    }
    return out;
}

ReceptionLog run_superframe(const Scenario& s, std::uint64_t seed, std::uint64_t superframe)
{
    require(superframe < s.superframes, "superframe index out of range");
    auto states = plan_superframes(s, seed);
    ReceptionLog log;
    log.receptions = simulate_superframe(s, states[superframe]);
    log.states.push_back(std::move(states[superframe]));
    return log;
}

ReceptionLog simulate(const Scenario& s, std::uint64_t seed)
{
    ReceptionLog log;
    log.states = plan_superframes(s, seed);
    for (const auto& st : log.states) {
        auto r = simulate_superframe(s, st);
        log.receptions.insert(log.receptions.end(), r.begin(), r.end());
    }
    return log;
}

// ---------------------------------------------------------------------------
// Audits

namespace {

Picoseconds floor_div(Picoseconds a, Picoseconds b)
{
    auto q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

const SuperframeState& state_of(const ReceptionLog& log, std::uint64_t superframe)
{
    for (const auto& st : log.states)
        if (st.index == superframe) return st;
    throw InputError("log has no state for superframe " + std::to_string(superframe));
}

} // namespace

BlockFreeReport check_block_free(const ReceptionLog& log, const Scenario& s)
{
    require(s.timing.F >= 3, "F must be at least 3 so that a normal frame exists");
    const Picoseconds frame = static_cast<Picoseconds>(s.timing.L) * s.timing.tau_ps();

    // (superframe, rx, tx, frame) -> contention-free count
    std::map<std::tuple<std::uint64_t, std::size_t, std::size_t, std::uint64_t>, std::uint64_t> cnt;
    for (const auto& st : log.states) {
        const auto n = st.positions.size();
        for (std::size_t rx = 0; rx < n; ++rx)
            for (std::size_t tx = 0; tx < n; ++tx)
                if (tx != rx && dist(st.positions[tx], st.positions[rx]) < s.R)
                    for (std::uint64_t f = 1; f + 1 < s.timing.F; ++f) cnt[{st.index, rx, tx, f}] = 0;
    }
    for (const auto& r : log.receptions) {
        if (!r.contention_free) continue;
        const auto& st = state_of(log, r.superframe);
        const auto j = floor_div(r.start_ps - st.start_ps[r.rx], frame);
        if (j < 1 || j + 1 >= static_cast<Picoseconds>(s.timing.F)) continue;
        auto it = cnt.find({r.superframe, r.rx, r.tx, static_cast<std::uint64_t>(j)});
        if (it != cnt.end()) ++it->second;
    }

    BlockFreeReport rep;
    rep.min_count = std::numeric_limits<std::uint64_t>::max();
    for (const auto& [key, c] : cnt) {
        const auto [sf, rx, tx, f] = key;
        BlockFreeEntry e{sf, rx, tx, f, c};
        rep.entries.push_back(e);
        rep.min_count = std::min(rep.min_count, c);
        if (c == 0) rep.violations.push_back(e);
    }
    if (rep.entries.empty()) rep.min_count = 0;
    rep.verdict = rep.violations.empty();
    return rep;
}

FrameOffsetAudit frame_offset_audit(const ReceptionLog& log, const Scenario& s)
{
    const Picoseconds frame = static_cast<Picoseconds>(s.timing.L) * s.timing.tau_ps();
    FrameOffsetAudit audit;
    for (const auto& r : log.receptions) {
        const auto i = static_cast<Picoseconds>(r.slot / s.timing.L);
        if (i < 1 || i + 1 >= static_cast<Picoseconds>(s.timing.F)) continue;
        const auto& st = state_of(log, r.superframe);
        const auto first = floor_div(r.start_ps - st.start_ps[r.rx], frame);
        const auto last = floor_div(r.end_ps - 1 - st.start_ps[r.rx], frame);
        ++audit.checked;
        if (std::abs(first - i) > 1 || std::abs(last - i) > 1) audit.violations.push_back(r);
    }
    audit.holds = audit.violations.empty();
    return audit;
}

AdversarialResult adversarial_offsets(const Scenario& s, const AdversarialSpec& spec)
{
    require(spec.steps_per_slot >= 1, "offset grid needs at least one step per slot");
    auto base = s;
    base.superframes = 1;
    const auto states = plan_superframes(base, spec.seed);
    const auto& st = states.front();
    const auto n = st.positions.size();

    // Crowded receiver first; ties go to the lower index.
    std::size_t hub = 0;
    std::vector<std::size_t> focus;
    for (std::size_t rx = 0; rx < n; ++rx) {
        std::vector<std::size_t> nb{rx};
        for (std::size_t tx = 0; tx < n; ++tx)
            if (tx != rx && dist(st.positions[tx], st.positions[rx]) < s.R) nb.push_back(tx);
        if (nb.size() > focus.size()) {
            focus = nb;
            hub = rx;
        }
    }
    (void)hub;

    const auto levels = s.timing.delta_c * spec.steps_per_slot + 1;
    AdversarialResult res;
    for (auto& u : base.users) u.offset_slots = 0.0;

    std::uint64_t grid = 1;
    bool full = true;
    for (std::size_t i = 0; i < focus.size() && full; ++i) {
        if (grid > spec.budget / levels) full = false;
        else grid *= levels;
    }
    const auto total = full ? grid : spec.budget;
    SplitMix64 rng(spec.seed, 0xad7e);
    std::vector<std::uint64_t> digits(focus.size(), 0);
    for (std::uint64_t e = 0; e < total; ++e) {
        if (full) {
            auto v = e;
            for (auto& d : digits) {
                d = v % levels;
                v /= levels;
            }
        } else {
            for (auto& d : digits) d = rng.below(levels);
        }
        for (std::size_t i = 0; i < focus.size(); ++i)
            base.users[focus[i]].offset_slots =
                static_cast<double>(digits[i]) / static_cast<double>(spec.steps_per_slot);
        const auto log = run_superframe(base, spec.seed, 0);
        ++res.evaluated;
        auto rep = check_block_free(log, base);
        if (!rep.verdict) {
            res.violation_found = true;
            for (const auto& u : base.users) res.offsets_slots.push_back(*u.offset_slots);
            res.report = std::move(rep);
            return res;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Baselines

BaselineTable baseline_compare(std::uint64_t M, std::uint64_t G, std::uint64_t delta,
                               const SearchLimits& limits)
{
    BaselineTable t;
    t.M = M;
    t.G = G;
    t.delta = delta;
    t.floor = length_bounds(M).quadratic;

    const auto tdma = (delta + 1) * G;
    const auto p1 = select_params_prop1(M, G, delta, limits);
    const auto p2 = select_params_prop2(M, G, limits);
    t.rows.push_back({"tdma", std::nullopt, tdma, false, tdma >= t.floor});
    t.rows.push_back({"prop1", p1.params, p1.period, false, p1.period >= t.floor});
    t.rows.push_back({"prop2", p2.params, p2.period, true, p2.period >= t.floor});

    const auto best = std::min_element(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
        return a.period < b.period;
    });
    t.winner = best->scheme;
    t.notes.push_back("tdma period is (delta+1)*G = " + std::to_string(delta + 1) + "*" + std::to_string(G) + " = "
                      + std::to_string(tdma));
    if (M * 2 >= G)
        t.notes.push_back("M is comparable to G, so a plain TDMA frame is competitive here");
    else
        t.notes.push_back("TDMA pays for every cell of the cluster; sequence schemes pay for M");
    t.notes.push_back("TDMA and the prop1 schedule assume frame-aligned slots; only prop2 is "
                      "user-irrepressible under arbitrary shifts");
    for (const auto& r : t.rows)
        if (r.ui_scheme && !r.meets_floor)
            t.notes.push_back(r.scheme + " period is below the quadratic floor");
    return t;
}

namespace {

// Users in distinct cells, pairwise closer than R, gathered around the
// vertex shared by cells (0,0), (0,1), (-1,1).
std::vector<UserSpec> clique_users(std::uint64_t M, double R, double h)
{
    const Point anchor{0.0, h};
    std::vector<std::pair<double, HexCell>> cand;
    const auto span = static_cast<std::int64_t>(M) + 2;
    for (std::int64_t m = -span; m <= span; ++m)
        for (std::int64_t n = -span; n <= span; ++n)
            cand.push_back({dist(cell_center({m, n}, h), anchor), {m, n}});
    std::sort(cand.begin(), cand.end());
    std::vector<UserSpec> users;
    for (std::uint64_t i = 0; i < M; ++i) {
        const auto cell = cand[i].second;
        const auto c = cell_center(cell, h);
        const double dd = cand[i].first;
        const double lambda = std::min(0.8, 0.8 * (std::sqrt(3.0) / 2.0) * h / dd);
        const Point p{c.x + lambda * (anchor.x - c.x), c.y + lambda * (anchor.y - c.y)};
        require(quantize(p.x, p.y, h) == cell, "clique placement left its cell");
        users.push_back({"u" + std::to_string(i), p.x, p.y, std::nullopt, std::nullopt, 0});
    }
    for (std::size_t a = 0; a < users.size(); ++a)
        for (std::size_t b = a + 1; b < users.size(); ++b)
            require(dist({users[a].x, users[a].y}, {users[b].x, users[b].y}) < R,
                    "cluster too small to host a clique of M users");
    return users;
}

std::optional<ClusterSize> loeschian_split(std::uint64_t G)
{
    for (std::int64_t b1 = 1; loeschian(b1, 0) <= static_cast<std::int64_t>(G); ++b1)
        for (std::int64_t b2 = 0; b2 <= b1; ++b2)
            if (loeschian(b1, b2) == static_cast<std::int64_t>(G)) return ClusterSize{G, b1, b2};
    return std::nullopt;
}

} // namespace

Scenario baseline_scenario(const BaselineTable& table, const BaselineRow& row)
{
    const auto size = loeschian_split(table.G);
    require(size.has_value(), "G = " + std::to_string(table.G) + " is not a Loeschian number");

    Scenario s;
    s.h = 1.0;
    s.M = table.M;
    // Largest R whose plan for R + h still has cluster size G.
    s.R = lattice_spacing(s.h) * std::sqrt(static_cast<double>(table.G)) / 2.0 - s.h;
    require(s.R > 0.0, "cluster size too small for a positive hearing radius");
    s.plan = ReusePlan(s.h, s.R, *size);
    s.slot_synchronized = table.delta == 0;
    s.users = clique_users(table.M, s.R, s.h);

    if (row.scheme == "tdma") {
        s.sequences = tdma_set(table.G, table.delta);
    } else if (row.scheme == "prop1") {
        s.sequences = pad_silent(rs_schedule(*row.params, table.G), table.delta);
    } else if (row.scheme == "prop2") {
        s.sequences = pad_silent(rs_cpc(*row.params, table.G), 1);
    } else {
        throw InputError("unknown baseline scheme '" + row.scheme + "'");
    }
    const std::uint64_t delta_c = table.delta == 0 ? 0 : table.delta - 1;
    s.timing = TimingModel::make(1e-3, s.sequences.period(), 4, delta_c, s.R, s.slot_synchronized);
    require(s.timing.delta() == table.delta, "baseline timing does not reproduce delta");
    return s;
}

// ---------------------------------------------------------------------------
// Config and output

namespace {

std::uint64_t pad_amount(const nlohmann::json& j, const TimingModel& t)
{
    if (!j.contains("pad")) return 0;
    const auto& p = j.at("pad");
    if (p.is_string()) {
        require(p.get<std::string>() == "auto", "pad must be an integer or \"auto\"");
        return t.delta();
    }
    return p.get<std::uint64_t>();
}

std::optional<std::uint64_t> opt_count(const nlohmann::json& j)
{
    if (!j.contains("count")) return std::nullopt;
    return j.at("count").get<std::uint64_t>();
}

RsCpcParams params_of(const nlohmann::json& j)
{
    return {j.at("n").get<std::uint64_t>(), j.at("p").get<std::uint64_t>(),
            j.at("k").get<std::uint64_t>()};
}

SequenceSet sequences_from_config(const nlohmann::json& j, const Scenario& s,
                                  const std::string& base_dir)
{
    if (j.is_string())
        return load_sequence_set((std::filesystem::path(base_dir) / j.get<std::string>()).string());
    require(j.is_object(), "sequences must be an object or a file name");
    if (j.contains("file"))
        return pad_silent(
            load_sequence_set((std::filesystem::path(base_dir) / j.at("file").get<std::string>()).string()),
            pad_amount(j, s.timing));
    if (j.contains("sequences")) return pad_silent(sequence_set_from_json(j), pad_amount(j, s.timing));

    const auto kind = j.at("construction").get<std::string>();
    const auto G = s.effective_plan().G();
    SequenceSet raw;
    if (kind == "crt") {
        raw = crt_set(j.at("p").get<std::uint64_t>(), j.at("q").get<std::uint64_t>());
    } else if (kind == "crt0") {
        raw = crt0_set(j.at("p").get<std::uint64_t>(), j.at("q").get<std::uint64_t>());
    } else if (kind == "rs_cpc") {
        raw = rs_cpc(params_of(j), opt_count(j));
    } else if (kind == "rs_sched") {
        raw = rs_schedule(params_of(j), opt_count(j));
    } else if (kind == "tdma") {
        const auto g = j.value("G", G);
        const auto delta = j.contains("delta") ? j.at("delta").get<std::uint64_t>() : s.timing.delta();
        return tdma_set(g, delta);
    } else if (kind == "prop1") {
        const auto choice = select_params_prop1(s.M, G, s.timing.delta());
        return pad_silent(rs_schedule(choice.params, G), s.timing.delta());
    } else if (kind == "prop2") {
        const auto choice = select_params_prop2(s.M, G);
        return pad_silent(rs_cpc(choice.params, G), j.contains("pad") ? pad_amount(j, s.timing) : 1);
    } else {
        throw InputError("unknown sequence construction '" + kind + "'");
    }
    return pad_silent(raw, pad_amount(j, s.timing));
}

std::vector<UserSpec> random_users(const nlohmann::json& j, const Scenario& s)
{
    const auto count = j.at("random_users").get<std::uint64_t>();
    const auto area = j.at("area").get<std::vector<double>>();
    require(area.size() == 2 || area.size() == 4, "area is [width, height] or [x0, y0, x1, y1]");
    const double x0 = area.size() == 4 ? area[0] : 0.0;
    const double y0 = area.size() == 4 ? area[1] : 0.0;
    const double x1 = area.size() == 4 ? area[2] : area[0];
    const double y1 = area.size() == 4 ? area[3] : area[1];
    require(x1 > x0 && y1 > y0, "area must have positive extent");
    SplitMix64 rng(j.value("seed", std::uint64_t{1}), 0x5eed);

    std::vector<UserSpec> users;
    std::vector<Point> pts;
    std::set<HexCell> cells;
    const std::uint64_t attempts = 1000 * std::max<std::uint64_t>(count, 1);
    for (std::uint64_t a = 0; a < attempts && users.size() < count; ++a) {
        const Point p{x0 + (x1 - x0) * rng.unit(), y0 + (y1 - y0) * rng.unit()};
        const auto cell = quantize(p.x, p.y, s.h);
        if (cells.contains(cell)) continue;
        pts.push_back(p);
        if (max_users_around(pts, pts.size() - 1, s.R) > s.M) {
            pts.pop_back();
            continue;
        }
        cells.insert(cell);
        users.push_back({"u" + std::to_string(users.size()), p.x, p.y, std::nullopt, std::nullopt, 0});
    }
    require(users.size() == count, "could not place " + std::to_string(count)
                                       + " users in the area while keeping at most M per disk");
    return users;
}

} // namespace

Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir)
{
    require(j.is_object(), "scenario config must be a JSON object");
    Scenario s;
    s.R = j.at("R_m").get<double>();
    s.h = j.at("h_m").get<double>();
    s.M = j.at("M").get<std::uint64_t>();
    s.v_mps = j.value("v_mps", 0.0);
    s.superframes = j.value("superframes", std::uint64_t{1});
    s.slot_synchronized = j.value("slot_synchronized", false);
    require(s.R > 0.0 && s.h > 0.0, "R_m and h_m must be positive");

    if (j.contains("plan")) {
        const auto& p = j.at("plan");
        if (p.is_string()) {
            std::ifstream in(std::filesystem::path(base_dir) / p.get<std::string>());
            require(in.good(), "cannot open plan file '" + p.get<std::string>() + "'");
            s.plan = plan_from_json(nlohmann::json::parse(in));
        } else {
            s.plan = plan_from_json(p);
        }
    }

    // L is only known once the sequences are built; the padding rule needs delta first.
    s.timing = TimingModel::make(j.at("tau_s").get<double>(), 1, j.value("F", std::uint64_t{3}),
                                 j.value("delta_c_slots", std::uint64_t{0}), s.R, s.slot_synchronized);
    s.sequences = sequences_from_config(j.at("sequences"), s, base_dir);
    s.timing.L = s.sequences.period();
    if (j.contains("L"))
        require(j.at("L").get<std::uint64_t>() == s.timing.L,
                "config L = " + std::to_string(j.at("L").get<std::uint64_t>())
                    + " but the sequences have period " + std::to_string(s.timing.L));

    if (j.contains("random_users")) {
        s.users = random_users(j, s);
    } else {
        for (const auto& u : j.at("users")) {
            UserSpec spec;
            spec.id = u.contains("id") ? (u.at("id").is_string() ? u.at("id").get<std::string>()
                                                                 : u.at("id").dump())
                                       : "u" + std::to_string(s.users.size());
            spec.x = u.at("x").get<double>();
            spec.y = u.at("y").get<double>();
            if (u.contains("offset_slots")) spec.offset_slots = u.at("offset_slots").get<double>();
            if (u.contains("sequence")) {
                const auto& q = u.at("sequence");
                if (q.is_string()) {
                    const auto idx = s.sequences.find(q.get<std::string>());
                    require(idx.has_value(), "unknown sequence label '" + q.get<std::string>() + "'");
                    spec.sequence = *idx;
                } else {
                    spec.sequence = q.get<std::uint64_t>();
                }
            }
            spec.phase = u.value("phase", std::uint64_t{0});
            s.users.push_back(std::move(spec));
        }
    }
    validate_scenario(s);
    return s;
}

nlohmann::json to_json(const BlockFreeReport& report, const Scenario& s)
{
    auto entry = [&](const BlockFreeEntry& e) {
        return nlohmann::json{{"superframe", e.superframe},
                              {"rx", s.users.at(e.rx).id},
                              {"tx", s.users.at(e.tx).id},
                              {"frame", e.frame},
                              {"contention_free", e.contention_free}};
    };
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) entries.push_back(entry(e));
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& e : report.violations) violations.push_back(entry(e));
    return {{"property", "block_free"},
            {"verdict", report.verdict ? "holds" : "violated"},
            {"triples", report.entries.size()},
            {"min_count", report.min_count},
            {"timing",
             {{"tau_s", s.timing.tau_s},
              {"L", s.timing.L},
              {"F", s.timing.F},
              {"delta_c", s.timing.delta_c},
              {"delta_p", s.timing.delta_p},
              {"delta", s.timing.delta()},
              {"guard_s", s.timing.guard_s()},
              {"superframe_s", s.timing.superframe_s()}}},
            {"violations", std::move(violations)},
            {"entries", std::move(entries)}};
}

nlohmann::json to_json(const FrameOffsetAudit& audit)
{
    nlohmann::json v = nlohmann::json::array();
    for (const auto& r : audit.violations)
        v.push_back({{"superframe", r.superframe}, {"tx", r.tx}, {"rx", r.rx}, {"slot", r.slot}});
    return {{"property", "frame_offset"},
            {"verdict", audit.holds ? "holds" : "violated"},
            {"checked", audit.checked},
            {"violations", std::move(v)}};
}

nlohmann::json to_json(const BaselineTable& table)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
        nlohmann::json row{{"scheme", r.scheme},
                           {"L", r.period},
                           {"ui_scheme", r.ui_scheme},
                           {"meets_floor", r.meets_floor}};
        if (r.params) row["params"] = {{"n", r.params->n}, {"p", r.params->p}, {"k", r.params->k}};
        rows.push_back(std::move(row));
    }
    return {{"M", table.M},   {"G", table.G},         {"delta", table.delta},
            {"floor", table.floor}, {"rows", std::move(rows)}, {"winner", table.winner},
            {"notes", table.notes}};
}

std::string reception_csv(const ReceptionLog& log, const Scenario& s)
{
    std::ostringstream out;
    out << "tx,rx,superframe,slot,t_arrive_s,t_end_s,contention_free\n";
    out << std::setprecision(12);
    for (const auto& r : log.receptions) {
        out << s.users.at(r.tx).id << ',' << s.users.at(r.rx).id << ',' << r.superframe << ','
            << r.slot << ',' << to_seconds(r.start_ps) << ',' << to_seconds(r.end_ps) << ','
            << (r.contention_free ? 1 : 0) << '\n';
    }
    return out.str();
}

} // namespace protoseq
