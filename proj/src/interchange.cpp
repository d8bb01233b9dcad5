#include "cer/interchange.hpp"

#include <cmath>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "json.hpp"

namespace cer::veracity {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    return "?";
}

std::optional<Split> split_from_string(std::string_view name) {
    for (auto s : {Split::train, Split::validation, Split::test}) {
        if (name == to_string(s)) return s;
    }
    return std::nullopt;
}

const char* to_string(RecordFlag flag) {
    switch (flag) {
        case RecordFlag::empty_evidence: return "empty_evidence";
        case RecordFlag::parse_failed: return "parse_failed";
    }
    return "?";
}

std::optional<RecordFlag> flag_from_string(std::string_view name) {
    for (auto f : {RecordFlag::empty_evidence, RecordFlag::parse_failed}) {
        if (name == to_string(f)) return f;
    }
    return std::nullopt;
}

Label argmax_label(const std::map<Label, double>& probabilities) {
    if (probabilities.empty()) throw InvalidArgument("argmax of an empty distribution");
    LabelSet present;
    for (const auto& [label, p] : probabilities) present.push_back(label);
    Label best = present.front();
    bool first = true;
    for (Label l : lexicographic(present)) {
        if (first || probabilities.at(l) > probabilities.at(best)) best = l;
        first = false;
    }
    return best;
}

void validate(const VerdictRecord& record) {
    if (!record.probabilities) return;
    double sum = 0.0;
    for (const auto& [label, p] : *record.probabilities) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidArgument("probability of " + std::string(to_string(label)) + " outside [0, 1]");
        }
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw InvalidArgument("probabilities sum to " + std::to_string(sum) + ", not 1");
    if (record.predicted_label && *record.predicted_label != argmax_label(*record.probabilities)) {
        throw InvalidArgument("predicted_label is not the argmax of probabilities");
    }
}

std::string to_json_line(const VerdictRecord& r) {
    validate(r);
    ordered_json j;
    j["claim_id"] = r.claim_id;
    j["claim"] = r.claim;
    j["dataset"] = r.dataset;
    j["split"] = to_string(r.split);
    if (r.gold_label) j["gold_label"] = to_string(*r.gold_label);
    j["evidence"] = r.evidence;
    j["justification"] = r.justification;
    j["llm_label"] = to_string(r.llm_label);
    if (r.predicted_label) j["predicted_label"] = to_string(*r.predicted_label);
    if (r.probabilities) {
        ordered_json p = ordered_json::object();
        for (const auto& [label, v] : *r.probabilities) p[std::string(to_string(label))] = v;
        j["probabilities"] = p;
    }
    ordered_json flags = ordered_json::array();
    for (RecordFlag f : r.flags) flags.push_back(to_string(f));
    j["flags"] = flags;
    return j.dump();
}

namespace {

class RowReader {
  public:
    RowReader(const json& row, std::string where) : row_(row), where_(std::move(where)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& problem) const {
        throw FormatError(where_ + ": field '" + field + "' " + problem);
    }

    const json* find(const std::string& field) const {
        auto it = row_.find(field);
        return it == row_.end() ? nullptr : &*it;
    }

    std::string string(const std::string& field) const {
        const json* v = find(field);
        if (v == nullptr) fail(field, "is missing");
        if (!v->is_string()) fail(field, "must be a string");
        return v->get<std::string>();
    }

    Label label(const std::string& field, const json& v) const {
        if (!v.is_string()) fail(field, "must be a label string");
        auto l = label_from_name(v.get<std::string>());
        if (!l) fail(field, "has unknown label '" + v.get<std::string>() + "'");
        return *l;
    }

    std::optional<Label> optional_label(const std::string& field) const {
        const json* v = find(field);
        if (v == nullptr || v->is_null()) return std::nullopt;
        return label(field, *v);
    }

    const std::string& where() const { return where_; }

  private:
    const json& row_;
    std::string where_;
};

}  // namespace

VerdictRecord from_json_line(std::string_view line, std::size_t line_no, const std::string& source) {
    const std::string where = source + ":" + std::to_string(line_no);
    json row;
    try {
        row = json::parse(line);
    } catch (const json::parse_error&) {
        throw FormatError(where + ": invalid JSON");
    }
    if (!row.is_object()) throw FormatError(where + ": expected a JSON object");
    RowReader in(row, where);

    static const std::set<std::string> kKnown = {"claim_id",      "claim",     "dataset",         "split",
                                                 "gold_label",    "evidence",  "justification",   "llm_label",
                                                 "predicted_label", "probabilities", "flags"};
    for (const auto& [key, value] : row.items()) {
        if (kKnown.count(key) == 0) in.fail(key, "is not part of the schema");
    }

    VerdictRecord r;
    r.claim_id = in.string("claim_id");
    if (r.claim_id.empty()) in.fail("claim_id", "must not be empty");
    r.claim = in.string("claim");
    r.dataset = in.string("dataset");
    const std::string split = in.string("split");
    auto s = split_from_string(split);
    if (!s) in.fail("split", "must be train, validation or test");
    r.split = *s;
    r.gold_label = in.optional_label("gold_label");

    const json* ev = in.find("evidence");
    if (ev == nullptr) in.fail("evidence", "is missing");
    if (!ev->is_array()) in.fail("evidence", "must be a list of strings");
    for (const auto& e : *ev) {
        if (!e.is_string()) in.fail("evidence", "must be a list of strings");
        r.evidence.push_back(e.get<std::string>());
    }
    r.justification = in.string("justification");
    const json* llm = in.find("llm_label");
    if (llm == nullptr) in.fail("llm_label", "is missing");
    r.llm_label = in.label("llm_label", *llm);
    r.predicted_label = in.optional_label("predicted_label");

    if (const json* p = in.find("probabilities"); p != nullptr && !p->is_null()) {
        if (!p->is_object()) in.fail("probabilities", "must be an object of label -> number");
        std::map<Label, double> probs;
        for (const auto& [name, v] : p->items()) {
            auto l = label_from_name(name);
            if (!l) in.fail("probabilities", "has unknown label '" + name + "'");
            if (!v.is_number()) in.fail("probabilities", "value for " + name + " must be a number");
            probs[*l] = v.get<double>();
        }
        if (probs.empty()) in.fail("probabilities", "must not be empty");
        r.probabilities = std::move(probs);
    }

    if (const json* f = in.find("flags"); f != nullptr) {
        if (!f->is_array()) in.fail("flags", "must be a list");
        for (const auto& v : *f) {
            if (!v.is_string()) in.fail("flags", "must be a list of strings");
            auto flag = flag_from_string(v.get<std::string>());
            if (!flag) in.fail("flags", "has unknown flag '" + v.get<std::string>() + "'");
            r.flags.insert(*flag);
        }
    }

    try {
        validate(r);
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        in.fail(msg.rfind("predicted_label", 0) == 0 ? "predicted_label" : "probabilities", "invalid: " + msg);
    }
    return r;
}

std::string serialize_interchange(const std::vector<VerdictRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += to_json_line(r);
        out += '\n';
    }
    return out;
}

void write_interchange(const std::vector<VerdictRecord>& records, const std::filesystem::path& path) {
    io::write_file_atomic(path, serialize_interchange(records));
}

std::vector<VerdictRecord> parse_interchange(std::string_view text, const std::string& source) {
    std::vector<VerdictRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        out.push_back(from_json_line(line, line_no, source));
    }
    return out;
}

std::vector<VerdictRecord> read_interchange(const std::filesystem::path& path) {
    return parse_interchange(io::read_file(path), path.string());
}

}  // namespace cer::veracity
