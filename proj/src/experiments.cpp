#include "cer/experiments.hpp"

#include <cstdio>
#include <sstream>

#include "cer/classifier.hpp"
#include "cer/error.hpp"
#include "json.hpp"

namespace cer::evaluation {

using veracity::Split;
using veracity::VerdictRecord;

const char* to_string(Baseline which) {
    switch (which) {
        case Baseline::all_supported: return "all_supported";
        case Baseline::all_refuted: return "all_refuted";
        case Baseline::all_nei: return "all_nei";
    }
    return "?";
}

Baseline baseline_from_string(std::string_view name) {
    if (name == "all_supported" || name == "all_true") return Baseline::all_supported;
    if (name == "all_refuted" || name == "all_false") return Baseline::all_refuted;
    if (name == "all_nei") return Baseline::all_nei;
    throw ConfigError("unknown baseline '" + std::string(name) + "' (expected all_supported, all_refuted or all_nei)");
}

EvalReport run_baseline(const DatasetSpec& ds, Baseline which) {
    const Label constant = which == Baseline::all_supported ? Label::Supported
                           : which == Baseline::all_refuted ? Label::Refuted
                                                            : Label::NEI;
    if (!contains(ds.labels, constant)) {
        throw InvalidArgument(std::string(to_string(which)) + " is undefined for " + ds.name + " (labels " +
                              join_labels(ds.labels) + ")");
    }
    std::vector<Label> gold;
    gold.reserve(ds.records.size());
    for (const auto& r : ds.records) gold.push_back(r.label);
    const std::vector<Label> pred(gold.size(), constant);
    return macro_metrics(gold, pred, ds.labels);
}

namespace {

std::string row(const std::string& name, const EvalReport& r, int width) {
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %8s %8s %8s\n", width, name.c_str(), percent(r.macro_precision).c_str(),
                  percent(r.macro_recall).c_str(), percent(r.macro_f1).c_str());
    return line;
}

std::string header(const std::string& first, int width) {
    char line[256];
    std::snprintf(line, sizeof line, "%-*s %8s %8s %8s\n", width, first.c_str(), "P (%)", "R (%)", "F1 (%)");
    return line;
}

}  // namespace

std::string baseline_table(const DatasetSpec& ds) {
    std::string out = ds.name + "\n" + header("baseline", 16);
    for (auto b : {Baseline::all_supported, Baseline::all_refuted, Baseline::all_nei}) {
        if (b == Baseline::all_nei && !contains(ds.labels, Label::NEI)) {
            char line[128];
            std::snprintf(line, sizeof line, "%-16s %8s %8s %8s\n", to_string(b), "--", "--", "--");
            out += line;
            continue;
        }
        out += row(to_string(b), run_baseline(ds, b), 16);
    }
    return out;
}

std::string variant_title(reasoning::PromptVariant variant) {
    switch (variant) {
        case reasoning::PromptVariant::full: return "full prompt";
        case reasoning::PromptVariant::no_role: return "w/o Doctor role assignment";
        case reasoning::PromptVariant::no_evidence: return "w/o scientific evidence";
        case reasoning::PromptVariant::no_justification: return "w/o justification";
    }
    return "?";
}

std::vector<AblationRow> ablation_run(const DatasetSpec& ds, std::span<const reasoning::PromptVariant> variants,
                                      const pipeline::Stage& stage, const pipeline::PipelineConfig& config) {
    std::vector<AblationRow> rows;
    for (auto v : variants) {
        auto cfg = config;
        cfg.reasoning.prompt.variant = v;
        rows.push_back(AblationRow{v, pipeline::run_pipeline(ds, stage, cfg).report});
    }
    return rows;
}

std::string ablation_table(const std::string& dataset, std::span<const AblationRow> rows) {
    std::string out = dataset + "\n" + header("prompt construction", 28);
    for (const auto& r : rows) out += row(variant_title(r.variant), r.report, 28);
    return out;
}

std::string ablation_json(const std::string& dataset, std::span<const AblationRow> rows) {
    nlohmann::ordered_json j;
    j["dataset"] = dataset;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"variant", reasoning::to_string(r.variant)},
                             {"title", variant_title(r.variant)},
                             {"macro_precision", r.report.macro_precision},
                             {"macro_recall", r.report.macro_recall},
                             {"macro_f1", r.report.macro_f1}});
    }
    return j.dump(2);
}

LabeledRecords drop_nei(const LabeledRecords& data) {
    if (!contains(data.labels, Label::NEI)) throw InvalidArgument(data.name + " has no NEI class to drop");
    LabeledRecords out;
    out.name = data.name + "-2";
    for (Label l : data.labels) {
        if (l != Label::NEI) out.labels.push_back(l);
    }
    for (const auto& r : data.records) {
        if (r.gold_label != Label::NEI) out.records.push_back(r);
    }
    return out;
}

namespace {

std::vector<VerdictRecord> of_split(const LabeledRecords& data, Split s) {
    std::vector<VerdictRecord> out;
    for (const auto& r : data.records) {
        if (r.split == s) out.push_back(r);
    }
    return out;
}

EvalReport train_on_test_on(const LabeledRecords& train, const LabeledRecords& test, const veracity::TrainConfig& config) {
    const auto train_rows = of_split(train, Split::train);
    const auto val_rows = of_split(train, Split::validation);
    auto model = veracity::train_classifier(train_rows, val_rows, config, train.name, train.labels).model;
    auto test_rows = of_split(test, Split::test);
    if (test_rows.empty()) throw InvalidArgument(test.name + ": test split is empty");
    veracity::apply_predictions(model, test_rows);
    return pipeline::evaluate_records(test_rows, test.labels);
}

std::pair<LabeledRecords, LabeledRecords> align(const LabeledRecords& a, const LabeledRecords& b) {
    if (a.labels == b.labels) return {a, b};
    const bool a_nei = contains(a.labels, Label::NEI);
    const bool b_nei = contains(b.labels, Label::NEI);
    LabeledRecords x = a_nei && !b_nei ? drop_nei(a) : a;
    LabeledRecords y = b_nei && !a_nei ? drop_nei(b) : b;
    if (x.labels != y.labels) {
        throw InvalidArgument("label sets of " + a.name + " (" + join_labels(a.labels) + ") and " + b.name + " (" +
                              join_labels(b.labels) + ") cannot be aligned by dropping NEI");
    }
    return {std::move(x), std::move(y)};
}

}  // namespace

EvalReport train_and_evaluate(const LabeledRecords& data, const veracity::TrainConfig& config) {
    return train_on_test_on(data, data, config);
}

CrossEvalMatrix cross_eval_records(std::span<const LabeledRecords> train_sets, std::span<const LabeledRecords> test_sets,
                                   const veracity::TrainConfig& config) {
    CrossEvalMatrix m;
    for (const auto& t : train_sets) m.train_names.push_back(t.name);
    for (const auto& t : test_sets) m.test_names.push_back(t.name);
    m.cells.resize(train_sets.size());
    for (std::size_t i = 0; i < train_sets.size(); ++i) {
        for (std::size_t j = 0; j < test_sets.size(); ++j) {
            auto [tr, te] = align(train_sets[i], test_sets[j]);
            m.cells[i].push_back(train_on_test_on(tr, te, config));
        }
    }
    return m;
}

CrossEvalMatrix cross_eval(std::span<const DatasetSpec> train_sets, std::span<const DatasetSpec> test_sets,
                           const pipeline::Stage& stage, const pipeline::PipelineConfig& config) {
    std::map<std::string, LabeledRecords> reasoned;
    auto prepare = [&](const DatasetSpec& ds) {
        if (reasoned.count(ds.name) != 0) return reasoned.at(ds.name);
        const auto splits = split_dataset(ds, config.split_seed);
        std::vector<ClaimRecord> claims;
        for (const auto* part : {&splits.train, &splits.validation, &splits.test}) {
            claims.insert(claims.end(), part->begin(), part->end());
        }
        LabeledRecords data{ds.name, ds.labels, pipeline::reason_claims(claims, stage, config.reasoning)};
        reasoned.emplace(ds.name, data);
        return data;
    };
    std::vector<LabeledRecords> train;
    std::vector<LabeledRecords> test;
    for (const auto& ds : train_sets) train.push_back(prepare(ds));
    for (const auto& ds : test_sets) test.push_back(prepare(ds));
    return cross_eval_records(train, test, config.train);
}

std::string cross_eval_table(const CrossEvalMatrix& m) {
    std::ostringstream out;
    char cell[64];
    std::snprintf(cell, sizeof cell, "%-18s", "train \\ test");
    out << "macro F1 (%)\n" << cell;
    for (const auto& t : m.test_names) {
        std::snprintf(cell, sizeof cell, " %12s", t.c_str());
        out << cell;
    }
    out << '\n';
    for (std::size_t i = 0; i < m.train_names.size(); ++i) {
        std::snprintf(cell, sizeof cell, "%-18s", m.train_names[i].c_str());
        out << cell;
        for (const auto& r : m.cells[i]) {
            std::snprintf(cell, sizeof cell, " %12s", percent(r.macro_f1).c_str());
            out << cell;
        }
        out << '\n';
    }
    return out.str();
}

std::string cross_eval_json(const CrossEvalMatrix& m) {
    nlohmann::ordered_json j;
    j["train"] = m.train_names;
    j["test"] = m.test_names;
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& rowv : m.cells) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& c : rowv) {
            r.push_back({{"macro_precision", c.macro_precision},
                         {"macro_recall", c.macro_recall},
                         {"macro_f1", c.macro_f1}});
        }
        j["cells"].push_back(r);
    }
    return j.dump(2);
}

}  // namespace cer::evaluation
