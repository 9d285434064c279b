#include "protoseq/sequence_set.hpp"

#include "protoseq/errors.hpp"

#include <fstream>
#include <unordered_set>

namespace protoseq {

SequenceSet::SequenceSet(std::vector<std::string> labels, std::vector<BinarySequence> members,
                         nlohmann::json meta)
    : labels_(std::move(labels)), members_(std::move(members)), meta_(std::move(meta))
{
    require(labels_.size() == members_.size(), "one label per sequence required");
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        require(seen.insert(labels_[i]).second, "duplicate sequence label '" + labels_[i] + "'");
        require(members_[i].period() == members_.front().period(),
                "sequence '" + labels_[i] + "' has period " + std::to_string(members_[i].period())
                    + ", expected " + std::to_string(members_.front().period()));
    }
    if (meta_.is_null()) meta_ = nlohmann::json::object();
}

std::uint64_t SequenceSet::period() const
{
    require(!members_.empty(), "empty sequence set has no period");
    return members_.front().period();
}

std::optional<std::size_t> SequenceSet::find(const std::string& label) const
{
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return i;
    return std::nullopt;
}

const BinarySequence& SequenceSet::by_label(const std::string& label) const
{
    auto i = find(label);
    require(i.has_value(), "no sequence labeled '" + label + "'");
    return members_[*i];
}

SequenceSet SequenceSet::select(const std::vector<std::string>& labels) const
{
    std::vector<BinarySequence> picked;
    for (const auto& l : labels) picked.push_back(by_label(l));
    return SequenceSet(labels, std::move(picked), meta_);
}

nlohmann::json to_json(const BinarySequence& x, const std::string& label)
{
    return {{"period", x.period()}, {"ones", x.ones()}, {"label", label}};
}

nlohmann::json to_json(const SequenceSet& set)
{
    nlohmann::json seqs = nlohmann::json::array();
    for (std::size_t i = 0; i < set.size(); ++i) seqs.push_back(to_json(set[i], set.label(i)));
    return {{"meta", set.meta()}, {"sequences", std::move(seqs)}};
}

BinarySequence sequence_from_json(const nlohmann::json& j)
{
    require(j.is_object(), "sequence must be a JSON object");
    if (j.contains("dense")) {
        auto x = BinarySequence::from_string(j.at("dense").get<std::string>());
        if (j.contains("period"))
            require(j.at("period").get<std::uint64_t>() == x.period(),
                    "dense string length disagrees with period");
        return x;
    }
    require(j.contains("period") && j.contains("ones"), "sequence needs 'period' and 'ones'");
    return BinarySequence(j.at("period").get<std::uint64_t>(),
                          j.at("ones").get<std::vector<std::uint64_t>>());
}

SequenceSet sequence_set_from_json(const nlohmann::json& j)
{
    const nlohmann::json* seqs = &j;
    nlohmann::json meta = nlohmann::json::object();
    if (j.is_object()) {
        require(j.contains("sequences"), "sequence set object needs 'sequences'");
        seqs = &j.at("sequences");
        if (j.contains("meta")) meta = j.at("meta");
    }
    require(seqs->is_array(), "sequence list must be a JSON array");
    std::vector<std::string> labels;
    std::vector<BinarySequence> members;
    for (std::size_t i = 0; i < seqs->size(); ++i) {
        const auto& s = (*seqs)[i];
        members.push_back(sequence_from_json(s));
        labels.push_back(s.value("label", "s" + std::to_string(i)));
    }
    return SequenceSet(std::move(labels), std::move(members), std::move(meta));
}

SequenceSet load_sequence_set(const std::string& path)
{
    std::ifstream in(path);
    require(in.good(), "cannot open sequence set file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("malformed JSON in '" + path + "': " + e.what());
    }
    return sequence_set_from_json(j);
}

void save_sequence_set(const SequenceSet& set, const std::string& path)
{
    std::ofstream out(path);
    require(out.good(), "cannot write '" + path + "'");
    out << to_json(set).dump(2) << '\n';
}

} // namespace protoseq
