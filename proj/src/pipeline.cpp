#include "cer/pipeline.hpp"

#include <algorithm>
#include <unordered_map>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "cer/log.hpp"
#include "cer/parallel.hpp"
#include "json.hpp"

namespace cer::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

std::string serialize_pairs(const std::vector<PairRecord>& pairs) {
    std::string out;
    for (const auto& p : pairs) {
        ordered_json j;
        j["claim_id"] = p.claim_id;
        j["claim"] = p.claim;
        j["dataset"] = p.dataset;
        j["split"] = veracity::to_string(p.split);
        if (p.gold_label) j["gold_label"] = to_string(*p.gold_label);
        j["evidence"] = p.evidence;
        j["context"] = p.context;
        j["pair"] = p.pair;
        ordered_json flags = ordered_json::array();
        for (auto f : p.flags) flags.push_back(veracity::to_string(f));
        j["flags"] = flags;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<PairRecord> parse_pairs(std::string_view text, const std::string& source) {
    std::vector<PairRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw FormatError(where + ": invalid JSON");
        }
        auto fail = [&](const std::string& field, const std::string& why) {
            throw FormatError(where + ": field '" + field + "' " + why);
        };
        auto str = [&](const char* field) {
            if (!j.contains(field)) fail(field, "is missing");
            if (!j[field].is_string()) fail(field, "must be a string");
            return j[field].get<std::string>();
        };
        auto list = [&](const char* field) {
            std::vector<std::string> v;
            if (!j.contains(field)) fail(field, "is missing");
            if (!j[field].is_array()) fail(field, "must be a list of strings");
            for (const auto& x : j[field]) {
                if (!x.is_string()) fail(field, "must be a list of strings");
                v.push_back(x.get<std::string>());
            }
            return v;
        };
        if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
        PairRecord p;
        p.claim_id = str("claim_id");
        p.claim = str("claim");
        p.dataset = j.contains("dataset") ? str("dataset") : "";
        if (j.contains("split")) {
            auto s = veracity::split_from_string(str("split"));
            if (!s) fail("split", "must be train, validation or test");
            p.split = *s;
        }
        if (j.contains("gold_label") && !j["gold_label"].is_null()) {
            auto l = label_from_name(str("gold_label"));
            if (!l) fail("gold_label", "has an unknown label");
            p.gold_label = l;
        }
        p.evidence = list("evidence");
        p.context = j.contains("context") ? list("context") : p.evidence;
        p.pair = j.contains("pair") ? str("pair") : "";
        if (j.contains("flags")) {
            for (const auto& f : list("flags")) {
                auto flag = veracity::flag_from_string(f);
                if (!flag) fail("flags", "has unknown flag '" + f + "'");
                p.flags.insert(*flag);
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_pairs(const std::vector<PairRecord>& pairs, const std::filesystem::path& path) {
    io::write_file_atomic(path, serialize_pairs(pairs));
}

std::vector<PairRecord> read_pairs(const std::filesystem::path& path) {
    return parse_pairs(io::read_file(path), path.string());
}

std::vector<PairRecord> retrieve_pairs(std::span<const ClaimRecord> claims, const evidence::Retriever& retriever,
                                       const ReasoningConfig& config) {
    std::vector<PairRecord> out(claims.size());
    parallel_for(claims.size(), config.max_in_flight, [&](std::size_t i) {
        const auto& c = claims[i];
        const auto set = retriever.retrieve(c.id, c.claim, config.k);
        const auto pair = evidence::assemble_pair(c.claim, set, config.m);
        PairRecord& p = out[i];
        p.claim_id = c.id;
        p.claim = c.claim;
        p.dataset = c.dataset;
        p.split = c.split.value_or(veracity::Split::test);
        p.gold_label = c.label;
        p.evidence = pair.evidence;
        p.context = set.texts();
        p.pair = pair.text;
        if (pair.empty_evidence) p.flags.insert(RecordFlag::empty_evidence);
    });
    return out;
}

std::vector<VerdictRecord> reason_pairs(std::span<const PairRecord> pairs, const reasoning::LlmProvider& llm,
                                        const reasoning::ResponseCache* cache, const ReasoningConfig& config) {
    std::vector<VerdictRecord> out(pairs.size());
    parallel_for(pairs.size(), config.max_in_flight, [&](std::size_t i) {
        const auto& p = pairs[i];
        const auto prompt = reasoning::build_prompt(p.claim, p.context, config.prompt);
        if (prompt.dropped_sentences > 0) {
            log::info(p.claim_id + ": dropped " + std::to_string(prompt.dropped_sentences) +
                      " context sentence(s) to fit the prompt budget");
        }
        const auto parsed = reasoning::parse_reasoning(reasoning::invoke_llm(prompt, llm, cache));
        VerdictRecord& r = out[i];
        r.claim_id = p.claim_id;
        r.claim = p.claim;
        r.dataset = p.dataset;
        r.split = p.split;
        r.gold_label = p.gold_label;
        r.evidence = p.evidence;
        if (r.evidence.size() > config.m) r.evidence.resize(config.m);
        r.justification = parsed.justification;
        r.llm_label = parsed.llm_label;
        r.flags = p.flags;
        if (r.evidence.empty()) r.flags.insert(RecordFlag::empty_evidence);
        if (!parsed.parse_ok) r.flags.insert(RecordFlag::parse_failed);
    });
    return out;
}

std::vector<VerdictRecord> reason_claims(std::span<const ClaimRecord> claims, const Stage& stage,
                                         const ReasoningConfig& config) {
    if (stage.retriever == nullptr || stage.llm == nullptr) throw InvalidArgument("stage needs a retriever and an LLM");
    const auto pairs = retrieve_pairs(claims, *stage.retriever, config);
    return reason_pairs(pairs, *stage.llm, stage.cache, config);
}

const char* to_string(ClassifyMode mode) { return mode == ClassifyMode::trained ? "trained" : "zero-shot"; }

ClassifyMode classify_mode_from_string(std::string_view name) {
    if (name == "trained") return ClassifyMode::trained;
    if (name == "zero-shot" || name == "zero_shot") return ClassifyMode::zero_shot;
    throw ConfigError("unknown classify mode '" + std::string(name) + "' (expected trained or zero-shot)");
}

evaluation::EvalReport evaluate_records(std::span<const VerdictRecord> records, const LabelSet& labels) {
    std::vector<const VerdictRecord*> sorted;
    for (const auto& r : records) {
        if (!r.gold_label) throw InvalidArgument("record " + r.claim_id + " has no gold label");
        if (!r.predicted_label) throw InvalidArgument("record " + r.claim_id + " has no predicted label");
        sorted.push_back(&r);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const VerdictRecord* a, const VerdictRecord* b) { return a->claim_id < b->claim_id; });
    std::vector<Label> gold;
    std::vector<Label> pred;
    for (const auto* r : sorted) {
        gold.push_back(*r->gold_label);
        pred.push_back(*r->predicted_label);
    }
    return evaluation::macro_metrics(gold, pred, labels, true);
}

evaluation::EvalReport evaluate_against(std::span<const VerdictRecord> pred, std::span<const VerdictRecord> gold,
                                        const LabelSet& labels) {
    std::unordered_map<std::string, Label> gold_by_id;
    for (const auto& g : gold) {
        if (!g.gold_label) throw InvalidArgument("gold record " + g.claim_id + " has no gold label");
        if (!gold_by_id.emplace(g.claim_id, *g.gold_label).second) {
            throw InvalidArgument("gold file repeats claim_id " + g.claim_id);
        }
    }
    std::vector<VerdictRecord> joined;
    joined.reserve(pred.size());
    for (const auto& p : pred) {
        auto it = gold_by_id.find(p.claim_id);
        if (it == gold_by_id.end()) throw InvalidArgument("no gold label for claim_id " + p.claim_id);
        VerdictRecord r = p;
        r.gold_label = it->second;
        joined.push_back(std::move(r));
    }
    if (joined.size() != gold_by_id.size()) {
        log::warn("predictions cover " + std::to_string(joined.size()) + " of " + std::to_string(gold_by_id.size()) +
                  " gold claims");
    }
    return evaluate_records(joined, labels);
}

PipelineRun classify_and_evaluate(std::string dataset, LabelSet labels, std::vector<VerdictRecord> records,
                                  const PipelineConfig& config) {
    PipelineRun run;
    run.dataset = std::move(dataset);
    run.labels = std::move(labels);
    std::vector<VerdictRecord> train;
    std::vector<VerdictRecord> val;
    for (const auto& r : records) {
        if (r.split == veracity::Split::train) train.push_back(r);
        if (r.split == veracity::Split::validation) val.push_back(r);
    }
    if (config.classify == ClassifyMode::trained) {
        auto trained = veracity::train_classifier(train, val, config.train, run.dataset, run.labels);
        for (auto& r : records) {
            if (r.split != veracity::Split::test) continue;
            auto p = trained.model.predict(r);
            r.predicted_label = p.label;
            r.probabilities = std::move(p.probabilities);
        }
        run.model = std::move(trained.model);
    } else {
        auto options = config.zero_shot;
        options.candidate_labels = run.labels;
        for (auto& r : records) {
            if (r.split != veracity::Split::test) continue;
            auto z = veracity::zero_shot_classify(r, options);
            r.predicted_label = z.label;
            r.probabilities = std::move(z.probabilities);
        }
    }
    std::vector<VerdictRecord> test;
    for (const auto& r : records) {
        if (r.split == veracity::Split::test) test.push_back(r);
    }
    if (test.empty()) throw InvalidArgument(run.dataset + ": test split is empty");
    run.report = evaluate_records(test, run.labels);
    run.records = std::move(records);
    return run;
}

PipelineRun run_pipeline(const evaluation::DatasetSpec& ds, const Stage& stage, const PipelineConfig& config) {
    const auto splits = evaluation::split_dataset(ds, config.split_seed);
    std::vector<ClaimRecord> claims;
    for (const auto* part : {&splits.train, &splits.validation, &splits.test}) {
        claims.insert(claims.end(), part->begin(), part->end());
    }
    auto records = reason_claims(claims, stage, config.reasoning);
    return classify_and_evaluate(ds.name, ds.labels, std::move(records), config);
}

}  // namespace cer::pipeline
