#pragma once

#include "protoseq/sequence.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace protoseq {

/**
 * Labeled family of equal-period sequences plus the construction record
 * that produced it ("meta"). Labels are unique within a set.
 */
class SequenceSet {
public:
    SequenceSet() = default;
    SequenceSet(std::vector<std::string> labels, std::vector<BinarySequence> members,
                nlohmann::json meta = nlohmann::json::object());

    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    std::uint64_t period() const;

    const std::vector<BinarySequence>& members() const noexcept { return members_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const BinarySequence& operator[](std::size_t i) const { return members_.at(i); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const nlohmann::json& meta() const noexcept { return meta_; }

    std::optional<std::size_t> find(const std::string& label) const;
    const BinarySequence& by_label(const std::string& label) const;

    /// Subset in the order the labels are given.
    SequenceSet select(const std::vector<std::string>& labels) const;

    friend bool operator==(const SequenceSet&, const SequenceSet&) = default;

private:
    std::vector<std::string> labels_;
    std::vector<BinarySequence> members_;
    nlohmann::json meta_ = nlohmann::json::object();
};

// Interchange format:
//   sequence: {"period": n, "ones": [...], "label": "..."}
//   set:      {"meta": {...}, "sequences": [sequence, ...]}
// A sequence may instead carry "dense": "0101..." on input.
nlohmann::json to_json(const BinarySequence& x, const std::string& label);
nlohmann::json to_json(const SequenceSet& set);
BinarySequence sequence_from_json(const nlohmann::json& j);
SequenceSet sequence_set_from_json(const nlohmann::json& j);

SequenceSet load_sequence_set(const std::string& path);
void save_sequence_set(const SequenceSet& set, const std::string& path);

} // namespace protoseq
