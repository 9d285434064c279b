#pragma once

#include "protoseq/sequence_set.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace protoseq {

/// One cyclic shift per set member, each in [0, period).
struct ShiftAssignment {
    std::vector<std::uint64_t> shifts;

    friend bool operator==(const ShiftAssignment&, const ShiftAssignment&) = default;
};

/// Fixed-length bit row; bit c is column c.
class BitRow {
public:
    BitRow() = default;
    explicit BitRow(std::uint64_t length) : length_(length), words_((length + 63) / 64, 0) {}

    std::uint64_t length() const noexcept { return length_; }
    bool test(std::uint64_t c) const { return (words_[c >> 6] >> (c & 63)) & 1U; }
    void set(std::uint64_t c) { words_[c >> 6] |= std::uint64_t{1} << (c & 63); }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }
    std::size_t count() const;
    std::vector<std::uint64_t> positions() const;

    std::span<std::uint64_t> words() noexcept { return words_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

private:
    std::uint64_t length_ = 0;
    std::vector<std::uint64_t> words_;
};

/**
 * k x l binary matrix whose row i is R^{shift_i}(sequence_i). Used both
 * for the permutation-submatrix check and for zero-column scans.
 */
class StackedMatrix {
public:
    StackedMatrix(std::span<const BinarySequence> rows, const ShiftAssignment& shifts);
    StackedMatrix(const SequenceSet& set, const ShiftAssignment& shifts)
        : StackedMatrix(std::span<const BinarySequence>(set.members()), shifts)
    {
    }
    /// All shifts zero.
    explicit StackedMatrix(std::span<const BinarySequence> rows);

    std::size_t rows() const noexcept { return rows_.size(); }
    std::uint64_t columns() const noexcept { return columns_; }
    bool at(std::size_t row, std::uint64_t col) const { return rows_.at(row).test(col); }
    const BitRow& row(std::size_t r) const { return rows_.at(r); }

    /// Columns where every row is zero.
    std::vector<std::uint64_t> zero_columns() const;

private:
    std::uint64_t columns_ = 0;
    std::vector<BitRow> rows_;
};

/// Columns where `row` holds the only one of its column.
std::vector<std::uint64_t> conflict_free_positions(const StackedMatrix& m, std::size_t row);

/// Largest circular distance between consecutive entries of a sorted column
/// list; a single entry yields `period`; an empty list yields nullopt.
std::optional<std::uint64_t> max_circular_gap(std::span<const std::uint64_t> sorted_columns,
                                              std::uint64_t period);

enum class SearchMode { exhaustive, random };

struct ModeSpec {
    SearchMode mode = SearchMode::exhaustive;
    std::uint64_t samples = 10000;          // random mode only
    std::uint64_t seed = 1;                 // random mode only
    std::uint64_t cap = 100'000'000;        // exhaustive state-count limit
    unsigned jobs = 0;                      // 0 = hardware concurrency

    static ModeSpec exhaustive_mode(std::uint64_t cap = 100'000'000)
    {
        return {SearchMode::exhaustive, 0, 0, cap, 0};
    }
    static ModeSpec random_mode(std::uint64_t samples, std::uint64_t seed)
    {
        return {SearchMode::random, samples, seed, 100'000'000, 0};
    }
};

std::string to_string(SearchMode mode);

struct VerifyReport {
    std::string property;
    ModeSpec mode;
    bool verdict = true;                 // true = holds
    nlohmann::json counterexample;       // null iff verdict holds
    nlohmann::json stats = nlohmann::json::object();
    std::uint64_t checked = 0;           // matrices / pairs examined

    bool holds() const noexcept { return verdict; }
};

nlohmann::json to_json(const VerifyReport& report);

/**
 * User-irrepressibility: under every shift assignment (first shift pinned to
 * 0 in exhaustive mode) each row has a column where it is the only one.
 * Exhaustive mode throws CapExceededError when period^(k-1) exceeds the cap.
 */
VerifyReport is_ui(const SequenceSet& set, const ModeSpec& mode);

/// Minimum conflict-free count over the protected rows; holds iff >= threshold.
VerifyReport min_conflict_free_count(const SequenceSet& set,
                                     const std::vector<std::string>& protected_labels,
                                     std::uint64_t threshold, const ModeSpec& mode);

/// Maximum circular gap between consecutive conflict-free columns of any
/// protected row; holds iff every gap <= bound (a row without conflict-free
/// columns is a violation).
VerifyReport max_conflict_free_gap(const SequenceSet& set,
                                   const std::vector<std::string>& protected_labels,
                                   std::uint64_t bound, const ModeSpec& mode);

/// Every circular window of `window` consecutive columns holds an all-zero column.
VerifyReport zero_column_window(const StackedMatrix& m, std::uint64_t window);

/// zero_column_window over the shift space of `set`.
VerifyReport zero_column_window_audit(const SequenceSet& set, std::uint64_t window,
                                      const ModeSpec& mode);

/// Max over unordered pairs and all shifts of H; holds iff max <= bound.
VerifyReport xcorr_bound_audit(const SequenceSet& set, std::uint64_t bound);

/// Minimum circular separation over members; holds iff every member >= bound.
VerifyReport separation_audit(const SequenceSet& set, std::uint64_t bound);

/// p(3p - 1)/2: conflict-free ones guaranteed per period for unsplit rows.
std::uint64_t split_cf_count_threshold(std::uint64_t p);
/// 2pL with L the base-set period.
std::uint64_t split_cf_gap_bound(std::uint64_t p, std::uint64_t base_period);

/// All split products plus the first M - 1 unsplit products of an expanded
/// set; the second member lists the unsplit (protected) labels.
std::pair<SequenceSet, std::vector<std::string>> expanded_selection(const SequenceSet& expanded,
                                                                    std::uint64_t M);

} // namespace protoseq
