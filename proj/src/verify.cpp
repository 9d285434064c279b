#include "protoseq/verify.hpp"

#include "protoseq/errors.hpp"
#include "protoseq/rng.hpp"

#include <atomic>
#include <bit>
#include <limits>
#include <thread>

namespace protoseq {

std::size_t BitRow::count() const
{
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

std::vector<std::uint64_t> BitRow::positions() const
{
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        auto w = words_[i];
        while (w) {
            out.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

StackedMatrix::StackedMatrix(std::span<const BinarySequence> rows, const ShiftAssignment& shifts)
{
    require(!rows.empty(), "stacked matrix needs at least one row");
    require(shifts.shifts.size() == rows.size(), "one shift per row required");
    columns_ = rows.front().period();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        require(rows[r].period() == columns_, "stacked rows must share a period");
        BitRow row(columns_);
        const auto s = shifts.shifts[r] % columns_;
        for (auto o : rows[r].ones()) row.set((o + s) % columns_);
        rows_.push_back(std::move(row));
    }
}

StackedMatrix::StackedMatrix(std::span<const BinarySequence> rows)
    : StackedMatrix(rows, ShiftAssignment{std::vector<std::uint64_t>(rows.size(), 0)})
{
}

std::vector<std::uint64_t> StackedMatrix::zero_columns() const
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t c = 0; c < columns_; ++c) {
        bool any = false;
        for (const auto& r : rows_) any = any || r.test(c);
        if (!any) out.push_back(c);
    }
    return out;
}

std::vector<std::uint64_t> conflict_free_positions(const StackedMatrix& m, std::size_t row)
{
    require(row < m.rows(), "row index out of range");
    std::vector<std::uint64_t> out;
    for (auto c : m.row(row).positions()) {
        bool alone = true;
        for (std::size_t r = 0; r < m.rows() && alone; ++r)
            if (r != row && m.at(r, c)) alone = false;
        if (alone) out.push_back(c);
    }
    return out;
}

std::optional<std::uint64_t> max_circular_gap(std::span<const std::uint64_t> cols,
                                              std::uint64_t period)
{
    if (cols.empty()) return std::nullopt;
    std::uint64_t gap = period - cols.back() + cols.front();
    for (std::size_t i = 1; i < cols.size(); ++i) gap = std::max(gap, cols[i] - cols[i - 1]);
    return gap;
}

std::string to_string(SearchMode mode)
{
    return mode == SearchMode::exhaustive ? "exhaustive" : "random";
}

nlohmann::json to_json(const VerifyReport& report)
{
    nlohmann::json j = {
        {"property", report.property},
        {"mode", to_string(report.mode.mode)},
        {"samples", report.mode.mode == SearchMode::random ? nlohmann::json(report.mode.samples)
                                                           : nlohmann::json(nullptr)},
        {"seed", report.mode.mode == SearchMode::random ? nlohmann::json(report.mode.seed)
                                                        : nlohmann::json(nullptr)},
        {"verdict", report.verdict ? "holds" : "violated"},
        {"counterexample", report.counterexample},
        {"checked", report.checked},
        {"stats", report.stats},
    };
    return j;
}

namespace {

// Rebuilds the stacked rows for a shift vector and keeps the column
// occupancy masks: `once` has every occupied column, `twice` every column
// holding two or more ones.
class StackState {
public:
    explicit StackState(std::span<const BinarySequence> seqs)
        : seqs_(seqs), period_(seqs.front().period()), once_(period_), twice_(period_)
    {
        rows_.assign(seqs.size(), BitRow(period_));
    }

    void load(std::span<const std::uint64_t> shifts)
    {
        once_.clear();
        twice_.clear();
        auto once = once_.words();
        auto twice = twice_.words();
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            auto& row = rows_[r];
            row.clear();
            const auto s = shifts[r];
            for (auto o : seqs_[r].ones()) {
                auto c = o + s;
                if (c >= period_) c -= period_;
                row.set(c);
            }
            auto w = row.words();
            for (std::size_t i = 0; i < w.size(); ++i) {
                twice[i] |= once[i] & w[i];
                once[i] |= w[i];
            }
        }
    }

    std::size_t rows() const noexcept { return rows_.size(); }
    std::uint64_t period() const noexcept { return period_; }

    std::size_t cf_count(std::size_t r) const
    {
        std::size_t total = 0;
        auto w = rows_[r].words();
        auto twice = twice_.words();
        for (std::size_t i = 0; i < w.size(); ++i)
            total += static_cast<std::size_t>(std::popcount(w[i] & ~twice[i]));
        return total;
    }

    std::vector<std::uint64_t> cf_positions(std::size_t r) const
    {
        std::vector<std::uint64_t> out;
        auto w = rows_[r].words();
        auto twice = twice_.words();
        for (std::size_t i = 0; i < w.size(); ++i) {
            auto bits = w[i] & ~twice[i];
            while (bits) {
                out.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    std::vector<std::uint64_t> zero_positions() const
    {
        std::vector<std::uint64_t> out;
        auto once = once_.words();
        for (std::size_t i = 0; i < once.size(); ++i) {
            auto bits = ~once[i];
            if (i + 1 == once.size() && period_ % 64 != 0)
                bits &= (std::uint64_t{1} << (period_ % 64)) - 1;
            while (bits) {
                out.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

private:
    std::span<const BinarySequence> seqs_;
    std::uint64_t period_;
    std::vector<BitRow> rows_;
    BitRow once_;
    BitRow twice_;
};

struct SearchOutcome {
    bool violated = false;
    std::vector<std::uint64_t> counterexample;
    std::uint64_t checked = 0;
    bool stats_partial = false;
};

unsigned resolve_jobs(unsigned jobs)
{
    if (jobs != 0) return jobs;
    const auto hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// period^(rows-1), or nullopt on overflow past `limit`.
std::optional<std::uint64_t> state_count(std::uint64_t period, std::size_t rows, std::uint64_t limit)
{
    std::uint64_t total = 1;
    for (std::size_t i = 1; i < rows; ++i) {
        if (total > limit / period) return std::nullopt;
        total *= period;
    }
    return total;
}

/**
 * Drives a probe over the shift space. A probe is copied per worker and must
 * provide `bool operator()(const StackState&, std::span<const std::uint64_t>)`
 * (false = violation) and `void merge(const Probe&)`.
 *
 * Exhaustive order is lexicographic in (shift_1, ..., shift_{k-1}) with
 * shift_0 pinned to 0; the reported counterexample is the earliest one in
 * that order (random mode: the lowest sample index), independent of the
 * number of workers.
 */
template <class Probe>
SearchOutcome search_shift_space(std::span<const BinarySequence> seqs, const ModeSpec& mode,
                                 Probe& probe)
{
    require(!seqs.empty(), "shift search needs at least one sequence");
    const auto period = seqs.front().period();
    for (const auto& s : seqs) require(s.period() == period, "sequences must share a period");
    const auto rows = seqs.size();

    std::uint64_t total = 0;
    if (mode.mode == SearchMode::exhaustive) {
        auto count = state_count(period, rows, mode.cap);
        if (!count || *count > mode.cap)
            throw CapExceededError("exhaustive search over " + std::to_string(period) + "^"
                                   + std::to_string(rows - 1)
                                   + " shift assignments exceeds the cap of "
                                   + std::to_string(mode.cap) + "; use random mode");
        total = *count;
    } else {
        total = mode.samples;
    }

    const auto jobs = static_cast<std::uint64_t>(
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(resolve_jobs(mode.jobs), total)));
    std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
    std::vector<Probe> probes(jobs, probe);
    std::vector<std::uint64_t> checked(jobs, 0);

    auto worker = [&](std::uint64_t w) {
        const auto begin = total * w / jobs;
        const auto end = total * (w + 1) / jobs;
        StackState state(seqs);
        std::vector<std::uint64_t> shifts(rows, 0);
        if (mode.mode == SearchMode::exhaustive) {
            auto rem = begin;
            for (std::size_t r = rows; r-- > 1;) {
                shifts[r] = rem % period;
                rem /= period;
            }
        }
        for (auto idx = begin; idx < end; ++idx) {
            if (idx > best.load(std::memory_order_relaxed)) break;
            if (mode.mode == SearchMode::random) {
                SplitMix64 rng(mode.seed, idx);
                for (std::size_t r = 1; r < rows; ++r) shifts[r] = rng.below(period);
            }
            state.load(shifts);
            ++checked[w];
            if (!probes[w](state, shifts)) {
                auto cur = best.load();
                while (idx < cur && !best.compare_exchange_weak(cur, idx)) {
                }
                break;
            }
            if (mode.mode == SearchMode::exhaustive) {
                for (std::size_t r = rows; r-- > 1;) {
                    if (++shifts[r] < period) break;
                    shifts[r] = 0;
                }
            }
        }
    };

    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (std::uint64_t w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
        for (auto& t : threads) t.join();
    }

    SearchOutcome out;
    for (std::uint64_t w = 0; w < jobs; ++w) {
        out.checked += checked[w];
        if (w == 0)
            probe = probes[0];
        else
            probe.merge(probes[w]);
    }
    const auto first = best.load();
    if (first != std::numeric_limits<std::uint64_t>::max()) {
        out.violated = true;
        out.stats_partial = true;
        out.counterexample.assign(rows, 0);
        if (mode.mode == SearchMode::exhaustive) {
            auto rem = first;
            for (std::size_t r = rows; r-- > 1;) {
                out.counterexample[r] = rem % period;
                rem /= period;
            }
        } else {
            SplitMix64 rng(mode.seed, first);
            for (std::size_t r = 1; r < rows; ++r) out.counterexample[r] = rng.below(period);
        }
    }
    return out;
}

VerifyReport make_report(std::string property, const ModeSpec& mode, const SearchOutcome& outcome,
                         nlohmann::json stats)
{
    VerifyReport report;
    report.property = std::move(property);
    report.mode = mode;
    report.verdict = !outcome.violated;
    report.checked = outcome.checked;
    report.stats = std::move(stats);
    if (outcome.violated) {
        report.counterexample = {{"shifts", outcome.counterexample}};
        report.stats["partial"] = true;
    } else {
        report.counterexample = nullptr;
    }
    return report;
}

struct UiProbe {
    std::size_t min_cf = std::numeric_limits<std::size_t>::max();

    bool operator()(const StackState& s, std::span<const std::uint64_t>)
    {
        bool ok = true;
        for (std::size_t r = 0; r < s.rows(); ++r) {
            const auto c = s.cf_count(r);
            min_cf = std::min(min_cf, c);
            if (c == 0) ok = false;
        }
        return ok;
    }
    void merge(const UiProbe& o) { min_cf = std::min(min_cf, o.min_cf); }
};

std::vector<std::size_t> resolve_rows(const SequenceSet& set, const std::vector<std::string>& labels)
{
    require(!labels.empty(), "at least one protected label is required");
    std::vector<std::size_t> rows;
    for (const auto& l : labels) {
        auto i = set.find(l);
        require(i.has_value(), "protected label '" + l + "' is not in the set");
        rows.push_back(*i);
    }
    return rows;
}

struct CountProbe {
    std::vector<std::size_t> rows;
    std::uint64_t threshold = 0;
    std::size_t min_cf = std::numeric_limits<std::size_t>::max();
    std::size_t min_cf_any = std::numeric_limits<std::size_t>::max();

    bool operator()(const StackState& s, std::span<const std::uint64_t>)
    {
        bool ok = true;
        for (std::size_t r = 0; r < s.rows(); ++r) {
            const auto c = s.cf_count(r);
            min_cf_any = std::min(min_cf_any, c);
            if (std::find(rows.begin(), rows.end(), r) == rows.end()) continue;
            min_cf = std::min(min_cf, c);
            if (c < threshold) ok = false;
        }
        return ok;
    }
    void merge(const CountProbe& o)
    {
        min_cf = std::min(min_cf, o.min_cf);
        min_cf_any = std::min(min_cf_any, o.min_cf_any);
    }
};

struct GapProbe {
    std::vector<std::size_t> rows;
    std::uint64_t bound = 0;
    std::uint64_t max_gap = 0;
    bool starved = false; // some protected row had no conflict-free column

    bool operator()(const StackState& s, std::span<const std::uint64_t>)
    {
        bool ok = true;
        for (auto r : rows) {
            const auto cols = s.cf_positions(r);
            const auto gap = max_circular_gap(cols, s.period());
            if (!gap) {
                starved = true;
                ok = false;
                continue;
            }
            max_gap = std::max(max_gap, *gap);
            if (*gap > bound) ok = false;
        }
        return ok;
    }
    void merge(const GapProbe& o)
    {
        max_gap = std::max(max_gap, o.max_gap);
        starved = starved || o.starved;
    }
};

struct WindowProbe {
    std::uint64_t window = 0;
    std::uint64_t max_zero_gap = 0;

    bool operator()(const StackState& s, std::span<const std::uint64_t>)
    {
        const auto zeros = s.zero_positions();
        const auto gap = max_circular_gap(zeros, s.period());
        if (!gap) {
            max_zero_gap = std::numeric_limits<std::uint64_t>::max();
            return false;
        }
        max_zero_gap = std::max(max_zero_gap, *gap);
        // A window of `window` columns misses every zero column iff some
        // run of occupied columns between consecutive zeros is >= window.
        return *gap <= window;
    }
    void merge(const WindowProbe& o) { max_zero_gap = std::max(max_zero_gap, o.max_zero_gap); }
};

nlohmann::json size_or_null(std::size_t v)
{
    if (v == std::numeric_limits<std::size_t>::max()) return nullptr;
    return v;
}

} // namespace

VerifyReport is_ui(const SequenceSet& set, const ModeSpec& mode)
{
    require(!set.empty(), "UI check needs a non-empty set");
    UiProbe probe;
    const auto outcome = search_shift_space(std::span<const BinarySequence>(set.members()), mode, probe);
    return make_report("ui", mode, outcome, {{"min_conflict_free_count", size_or_null(probe.min_cf)}});
}

VerifyReport min_conflict_free_count(const SequenceSet& set,
                                     const std::vector<std::string>& protected_labels,
                                     std::uint64_t threshold, const ModeSpec& mode)
{
    CountProbe probe;
    probe.rows = resolve_rows(set, protected_labels);
    probe.threshold = threshold;
    const auto outcome = search_shift_space(std::span<const BinarySequence>(set.members()), mode, probe);
    return make_report("cf-count", mode, outcome,
                       {{"min_conflict_free_count", size_or_null(probe.min_cf)},
                        {"min_conflict_free_count_all_rows", size_or_null(probe.min_cf_any)},
                        {"threshold", threshold}});
}

VerifyReport max_conflict_free_gap(const SequenceSet& set,
                                   const std::vector<std::string>& protected_labels,
                                   std::uint64_t bound, const ModeSpec& mode)
{
    GapProbe probe;
    probe.rows = resolve_rows(set, protected_labels);
    probe.bound = bound;
    const auto outcome = search_shift_space(std::span<const BinarySequence>(set.members()), mode, probe);
    return make_report("cf-gap", mode, outcome,
                       {{"max_gap", probe.max_gap},
                        {"row_without_conflict_free", probe.starved},
                        {"bound", bound}});
}

VerifyReport zero_column_window(const StackedMatrix& m, std::uint64_t window)
{
    require(window >= 1, "window must be positive");
    const auto zeros = m.zero_columns();
    const auto gap = max_circular_gap(zeros, m.columns());
    VerifyReport report;
    report.property = "window";
    report.checked = 1;
    report.verdict = gap.has_value() && *gap <= window;
    report.stats = {{"window", window},
                    {"zero_columns", zeros.size()},
                    {"max_zero_gap", gap ? nlohmann::json(*gap) : nlohmann::json(nullptr)}};
    if (!report.verdict) {
        // First column of an all-occupied window.
        std::uint64_t start = 0;
        if (gap) {
            for (std::size_t i = 0; i < zeros.size(); ++i) {
                const auto next = zeros[(i + 1) % zeros.size()];
                const auto d = (next + m.columns() - zeros[i]) % m.columns();
                if ((d == 0 ? m.columns() : d) > window) {
                    start = (zeros[i] + 1) % m.columns();
                    break;
                }
            }
        }
        report.counterexample = {{"window_start", start}};
    }
    return report;
}

VerifyReport zero_column_window_audit(const SequenceSet& set, std::uint64_t window,
                                      const ModeSpec& mode)
{
    require(window >= 1, "window must be positive");
    WindowProbe probe;
    probe.window = window;
    const auto outcome = search_shift_space(std::span<const BinarySequence>(set.members()), mode, probe);
    nlohmann::json gap = probe.max_zero_gap == std::numeric_limits<std::uint64_t>::max()
                             ? nlohmann::json(nullptr)
                             : nlohmann::json(probe.max_zero_gap);
    return make_report("window", mode, outcome, {{"window", window}, {"max_zero_gap", gap}});
}

VerifyReport xcorr_bound_audit(const SequenceSet& set, std::uint64_t bound)
{
    VerifyReport report;
    report.property = "xcorr";
    report.mode = ModeSpec::exhaustive_mode();
    std::size_t worst = 0;
    nlohmann::json witness = nullptr;
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = a + 1; b < set.size(); ++b) {
            const auto profile = hamming_xcorr_profile(set[a], set[b]);
            report.checked += profile.size();
            for (std::size_t t = 0; t < profile.size(); ++t) {
                if (profile[t] > worst) {
                    worst = profile[t];
                    if (worst > bound && witness.is_null())
                        witness = {{"pair", {set.label(a), set.label(b)}}, {"shift", t},
                                   {"correlation", worst}};
                }
            }
        }
    }
    report.verdict = worst <= bound;
    report.counterexample = report.verdict ? nlohmann::json(nullptr) : witness;
    report.stats = {{"max_correlation", worst}, {"bound", bound}};
    return report;
}

VerifyReport separation_audit(const SequenceSet& set, std::uint64_t bound)
{
    VerifyReport report;
    report.property = "separation";
    report.mode = ModeSpec::exhaustive_mode();
    std::uint64_t worst = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto sep = min_separation(set[i]);
        ++report.checked;
        if (sep < worst) {
            worst = sep;
            if (sep < bound && report.counterexample.is_null())
                report.counterexample = {{"label", set.label(i)}, {"separation", sep}};
        }
    }
    report.verdict = worst >= bound;
    if (report.verdict) report.counterexample = nullptr;
    report.stats = {{"min_separation", worst}, {"bound", bound}};
    return report;
}

std::uint64_t split_cf_count_threshold(std::uint64_t p) { return p * (3 * p - 1) / 2; }

std::uint64_t split_cf_gap_bound(std::uint64_t p, std::uint64_t base_period)
{
    return 2 * p * base_period;
}

std::pair<SequenceSet, std::vector<std::string>> expanded_selection(const SequenceSet& expanded,
                                                                    std::uint64_t M)
{
    const auto& meta = expanded.meta();
    require(meta.value("construction", "") == "expanded", "set is not an expanded set");
    const auto p1 = meta.at("p1_labels").get<std::vector<std::string>>();
    const auto p2 = meta.at("p2_labels").get<std::vector<std::string>>();
    require(M >= 1 && M - 1 <= p1.size(), "expanded set has fewer than M - 1 unsplit members");
    std::vector<std::string> labels(p2.begin(), p2.end());
    std::vector<std::string> protected_labels(p1.begin(), p1.begin() + static_cast<long>(M - 1));
    labels.insert(labels.end(), protected_labels.begin(), protected_labels.end());
    return {expanded.select(labels), protected_labels};
}

} // namespace protoseq
