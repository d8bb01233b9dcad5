#include "cer/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "cer/hashing.hpp"
#include "cer/log.hpp"
#include "json.hpp"

namespace cer::evaluation {

using nlohmann::json;

const std::vector<DatasetInfo>& known_datasets() {
    static const std::vector<DatasetInfo> kInfo = [] {
        using enum Label;
        std::vector<DatasetInfo> v;
        v.push_back({"HealthFC", three_class_labels(), {{Supported, 202}, {Refuted, 125}, {NEI, 433}},
                     SplitSizes{451, 151, 151}, SplitPolicy::exact});
        // 447 + 150 + 150 exceeds the 745 published records, so train is fitted.
        v.push_back({"BioASQ-7b", two_class_labels(), {{Supported, 614}, {Refuted, 131}}, SplitSizes{447, 150, 150},
                     SplitPolicy::fit});
        v.push_back({"SciFact", three_class_labels(), {{Supported, 556}, {Refuted, 516}, {NEI, 337}},
                     SplitSizes{809, 300, 300}, SplitPolicy::exact});
        v.push_back({"HealthFC-2", two_class_labels(), {{Supported, 202}, {Refuted, 125}}, std::nullopt,
                     SplitPolicy::exact});
        v.push_back({"SciFact-2", two_class_labels(), {{Supported, 556}, {Refuted, 516}}, std::nullopt,
                     SplitPolicy::exact});
        return v;
    }();
    return kInfo;
}

const DatasetInfo* find_dataset(std::string_view name) {
    for (const auto& d : known_datasets()) {
        if (d.name == name) return &d;
    }
    return nullptr;
}

LabelCounts DatasetSpec::counts() const {
    LabelCounts c;
    for (Label l : labels) c[l] = 0;
    for (const auto& r : records) ++c[r.label];
    return c;
}

ColumnMap ColumnMap::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw FormatError(path.string() + ": expected an object");
    ColumnMap m;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) throw FormatError(path.string() + ": column '" + key + "' must map to a string");
        const auto v = value.get<std::string>();
        if (key == "id") m.id = v;
        else if (key == "claim") m.claim = v;
        else if (key == "label") m.label = v;
        else if (key == "split") m.split = v;
        else if (key != "dataset" && key != "notes") throw FormatError(path.string() + ": unknown key '" + key + "'");
    }
    return m;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return out;
}

std::optional<Split> parse_split(std::string_view raw) {
    std::string s;
    for (char c : raw) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "dev" || s == "val") return Split::validation;
    return veracity::split_from_string(s);
}

struct RawRow {
    std::string id;
    std::string claim;
    std::string label;
    std::string split;
};

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    throw FormatError("expected a string");
}

std::vector<std::pair<std::size_t, RawRow>> read_rows(const std::filesystem::path& path, const ColumnMap& cols) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read dataset file " + path.string());
    std::vector<std::pair<std::size_t, RawRow>> rows;
    std::string line;
    std::size_t line_no = 0;
    const bool tsv = path.extension() == ".tsv";
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        RawRow row;
        if (tsv) {
            if (header.empty()) {
                header = split_tabs(line);
                continue;
            }
            const auto fields = split_tabs(line);
            auto field = [&](const std::string& name, bool required) -> std::string {
                auto it = std::find(header.begin(), header.end(), name);
                if (it == header.end()) {
                    if (required) throw FormatError(path.string() + ": header lacks column '" + name + "'");
                    return {};
                }
                const auto idx = static_cast<std::size_t>(it - header.begin());
                if (idx >= fields.size()) throw FormatError(where + ": row lacks column '" + name + "'");
                return fields[idx];
            };
            row.id = field(cols.id, true);
            row.claim = field(cols.claim, true);
            row.label = field(cols.label, true);
            if (!cols.split.empty()) row.split = field(cols.split, false);
        } else {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error&) {
                throw FormatError(where + ": invalid JSON");
            }
            if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
            auto field = [&](const std::string& name, bool required) -> std::string {
                auto it = j.find(name);
                if (it == j.end() || it->is_null()) {
                    if (required) throw FormatError(where + ": missing field '" + name + "'");
                    return {};
                }
                try {
                    return scalar_text(*it);
                } catch (const FormatError&) {
                    throw FormatError(where + ": field '" + name + "' must be a string");
                }
            };
            row.id = field(cols.id, true);
            row.claim = field(cols.claim, true);
            row.label = field(cols.label, true);
            if (!cols.split.empty()) row.split = field(cols.split, false);
        }
        if (row.id.empty()) throw FormatError(where + ": empty id");
        rows.emplace_back(line_no, std::move(row));
    }
    return rows;
}

/// Largest-remainder apportionment of `size` over classes in proportion to
/// `weights`, capped by `avail`.
std::vector<std::size_t> apportion(std::size_t size, const std::vector<std::size_t>& weights,
                                   const std::vector<std::size_t>& avail) {
    const std::size_t total = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
    const std::size_t L = weights.size();
    std::vector<std::size_t> q(L, 0);
    if (total == 0 || size == 0) return q;
    std::vector<std::size_t> rem(L);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < L; ++c) {
        const std::uint64_t num = static_cast<std::uint64_t>(size) * weights[c];
        q[c] = static_cast<std::size_t>(num / total);
        rem[c] = static_cast<std::size_t>(num % total);
        assigned += q[c];
    }
    std::vector<std::size_t> order(L);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t i = 0; assigned < size; i = (i + 1) % L) {
        ++q[order[i]];
        ++assigned;
    }
    std::size_t deficit = 0;
    for (std::size_t c = 0; c < L; ++c) {
        if (q[c] > avail[c]) {
            deficit += q[c] - avail[c];
            q[c] = avail[c];
        }
    }
    while (deficit > 0) {
        std::size_t best = L;
        for (std::size_t c = 0; c < L; ++c) {
            if (q[c] < avail[c] && (best == L || avail[c] - q[c] > avail[best] - q[best])) best = c;
        }
        if (best == L) throw InvalidArgument("split sizes exceed the available records");
        ++q[best];
        --deficit;
    }
    return q;
}

}  // namespace

DatasetSpec load_dataset(std::string_view name, const std::filesystem::path& path, const LoadOptions& options) {
    DatasetSpec ds;
    ds.name = std::string(name);
    const DatasetInfo* info = find_dataset(name);
    ds.labels = info ? info->labels : three_class_labels();
    if (info) ds.expected_counts = info->expected_counts;

    for (auto& [line_no, row] : read_rows(path, options.columns)) {
        const std::string where = path.string() + ":" + std::to_string(line_no) + " (id " + row.id + ")";
        auto label = normalize_label(row.label);
        if (!label) throw FormatError(where + ": unknown label '" + row.label + "'");
        if (!contains(ds.labels, *label)) {
            throw FormatError(where + ": label " + std::string(to_string(*label)) + " is not used by " + ds.name);
        }
        ClaimRecord rec{row.id, row.claim, *label, ds.name, std::nullopt};
        if (!row.split.empty()) {
            rec.split = parse_split(row.split);
            if (!rec.split) throw FormatError(where + ": unknown split '" + row.split + "'");
        }
        ds.records.push_back(std::move(rec));
    }
    if (options.strict_counts) check_counts(ds);
    return ds;
}

DatasetSpec dataset_from_counts(std::string_view name, const LabelSet& labels, const LabelCounts& counts) {
    DatasetSpec ds;
    ds.name = std::string(name);
    ds.labels = labels;
    std::size_t n = 0;
    for (Label l : labels) {
        auto it = counts.find(l);
        const std::size_t c = it == counts.end() ? 0 : it->second;
        for (std::size_t i = 0; i < c; ++i) {
            ds.records.push_back(ClaimRecord{ds.name + "-" + std::to_string(n++), "", l, ds.name, std::nullopt});
        }
    }
    ds.expected_counts = counts;
    return ds;
}

void check_counts(const DatasetSpec& ds) {
    if (!ds.expected_counts) return;
    const auto actual = ds.counts();
    std::string diff;
    for (Label l : ds.labels) {
        const auto want = ds.expected_counts->count(l) ? ds.expected_counts->at(l) : 0;
        const auto got = actual.count(l) ? actual.at(l) : 0;
        if (want != got) {
            diff += " " + std::string(to_string(l)) + "=" + std::to_string(got) + " (expected " + std::to_string(want) + ")";
        }
    }
    if (!diff.empty()) throw Error(ds.name + ": label counts differ from the published ones:" + diff);
}

DatasetSpec drop_nei(const DatasetSpec& ds) {
    if (!contains(ds.labels, Label::NEI)) throw InvalidArgument(ds.name + " has no NEI class to drop");
    DatasetSpec out;
    out.name = ds.name + "-2";
    for (Label l : ds.labels) {
        if (l != Label::NEI) out.labels.push_back(l);
    }
    for (const auto& r : ds.records) {
        if (r.label != Label::NEI) out.records.push_back(r);
    }
    if (ds.expected_counts) {
        LabelCounts c = *ds.expected_counts;
        c.erase(Label::NEI);
        out.expected_counts = c;
    }
    return out;
}

SplitSizes proportional_sizes(std::size_t n) {
    SplitSizes s;
    s.validation = n / 5;
    s.test = n / 5;
    s.train = n - s.validation - s.test;
    return s;
}

DatasetSplits split_dataset(const DatasetSpec& ds, const SplitSizes& requested, std::uint64_t seed, SplitPolicy policy) {
    const std::size_t n = ds.records.size();
    if (n == 0) throw InvalidArgument(ds.name + ": cannot split an empty dataset");
    SplitSizes sizes = requested;
    if (policy == SplitPolicy::fit) {
        if (sizes.validation + sizes.test > n) {
            throw InvalidArgument(ds.name + ": validation + test sizes exceed the " + std::to_string(n) + " records");
        }
        sizes.train = n - sizes.validation - sizes.test;
    }
    if (sizes.total() > n) {
        throw InvalidArgument(ds.name + ": split sizes " + std::to_string(sizes.train) + "/" +
                              std::to_string(sizes.validation) + "/" + std::to_string(sizes.test) + " exceed the " +
                              std::to_string(n) + " records");
    }

    const std::size_t L = ds.labels.size();
    std::vector<std::vector<std::size_t>> members(L);
    for (std::size_t i = 0; i < n; ++i) {
        auto c = index_in(ds.labels, ds.records[i].label);
        if (!c) throw InvalidArgument(ds.name + ": record " + ds.records[i].id + " has a label outside the set");
        members[*c].push_back(i);
    }
    SplitMix64 rng(seed);
    for (auto& m : members) {
        for (std::size_t i = m.size(); i > 1; --i) std::swap(m[i - 1], m[rng.below(i)]);
    }

    std::vector<std::size_t> counts(L);
    for (std::size_t c = 0; c < L; ++c) counts[c] = members[c].size();
    std::vector<std::size_t> avail = counts;
    auto take = [&](std::size_t size) {
        auto q = apportion(size, counts, avail);
        for (std::size_t c = 0; c < L; ++c) avail[c] -= q[c];
        return q;
    };
    const auto q_test = take(sizes.test);
    const auto q_val = take(sizes.validation);
    const auto q_train = take(sizes.train);

    std::vector<int> where(n, -1);
    for (std::size_t c = 0; c < L; ++c) {
        std::size_t pos = 0;
        for (std::size_t k = 0; k < q_test[c]; ++k) where[members[c][pos++]] = 2;
        for (std::size_t k = 0; k < q_val[c]; ++k) where[members[c][pos++]] = 1;
        for (std::size_t k = 0; k < q_train[c]; ++k) where[members[c][pos++]] = 0;
    }
    DatasetSplits out;
    for (std::size_t i = 0; i < n; ++i) {
        ClaimRecord r = ds.records[i];
        switch (where[i]) {
            case 0: r.split = Split::train; out.train.push_back(std::move(r)); break;
            case 1: r.split = Split::validation; out.validation.push_back(std::move(r)); break;
            case 2: r.split = Split::test; out.test.push_back(std::move(r)); break;
            default: out.unused.push_back(std::move(r)); break;
        }
    }
    return out;
}

DatasetSplits split_dataset(const DatasetSpec& ds, std::uint64_t seed) {
    const bool preassigned = !ds.records.empty() && std::all_of(ds.records.begin(), ds.records.end(),
                                                                 [](const ClaimRecord& r) { return r.split.has_value(); });
    if (preassigned) {
        DatasetSplits out;
        for (const auto& r : ds.records) {
            switch (*r.split) {
                case Split::train: out.train.push_back(r); break;
                case Split::validation: out.validation.push_back(r); break;
                case Split::test: out.test.push_back(r); break;
            }
        }
        return out;
    }
    const DatasetInfo* info = find_dataset(ds.name);
    if (info && info->split_sizes) {
        const auto& s = *info->split_sizes;
        const std::size_t need = info->split_policy == SplitPolicy::fit ? s.validation + s.test : s.total();
        if (ds.records.size() >= need) return split_dataset(ds, s, seed, info->split_policy);
        log::warn(ds.name + ": " + std::to_string(ds.records.size()) +
                  " records are fewer than the published split sizes; using 60/20/20 proportions");
    }
    return split_dataset(ds, proportional_sizes(ds.records.size()), seed, SplitPolicy::exact);
}

}  // namespace cer::evaluation
