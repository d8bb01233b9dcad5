// cer: command-line entry point. Each subcommand parses flags, resolves a
// RunConfig and hands off to the library.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cer/binary_io.hpp"
#include "cer/classifier.hpp"
#include "cer/corpus.hpp"
#include "cer/dataset.hpp"
#include "cer/dense_index.hpp"
#include "cer/error.hpp"
#include "cer/evidence.hpp"
#include "cer/experiments.hpp"
#include "cer/interchange.hpp"
#include "cer/log.hpp"
#include "cer/metrics.hpp"
#include "cer/pipeline.hpp"
#include "cer/run_config.hpp"
#include "cer/sparse_index.hpp"
#include "cer/stats.hpp"
#include "cer/zero_shot.hpp"

namespace fs = std::filesystem;
using namespace cer;

namespace {

// Raised for bad flag combinations found after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_file;
    std::string log_level = "info";
    std::vector<std::string> sets;  // key=value overrides
    std::map<std::string, std::string> flags;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

log::Level parse_level(const std::string& s) {
    if (s == "debug") return log::Level::debug;
    if (s == "info") return log::Level::info;
    if (s == "warn") return log::Level::warn;
    if (s == "error") return log::Level::error;
    if (s == "off") return log::Level::off;
    throw UsageError("--log-level must be debug, info, warn, error or off");
}

RunConfig resolve(const Common& common) {
    log::set_level(parse_level(common.log_level));
    std::map<std::string, std::string> cli = common.flags;
    for (const auto& kv : common.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        cli[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    std::optional<fs::path> file;
    if (!common.config_file.empty()) file = common.config_file;
    auto cfg = RunConfig::resolve(cli, file);
    log::debug("configuration:\n" + cfg.describe());
    return cfg;
}

// Binds a flag whose value lands in the config map under `key`.
CLI::Option* config_flag(CLI::App* app, Common& common, const std::string& names, const std::string& key,
                         const std::string& help) {
    return app->add_option_function<std::string>(
        names, [&common, key](const std::string& v) { common.flags[key] = v; }, help);
}

void add_common(CLI::App* app, Common& common) {
    app->add_option("--config", common.config_file, "config file (key=value or JSON)");
    app->add_option("--log-level", common.log_level, "debug, info, warn, error or off");
    app->add_option("--set", common.sets, "override any configuration key, key=value");
    config_flag(app, common, "--seed", "seed", "seed for splits and training");
}

std::vector<corpus::SentenceUnit> load_units(const fs::path& path) {
    auto report = corpus::ingest_corpus(path, corpus::format_from_path(path));
    for (const auto& w : report.warnings) log::warn(w);
    auto units = corpus::segment_documents(report.documents);
    log::info(path.string() + ": " + std::to_string(report.documents.size()) + " document(s), " +
              std::to_string(units.size()) + " sentence(s), " + std::to_string(report.skipped()) + " skipped");
    return units;
}

// Retriever over a saved index or, failing that, an index built in memory.
evidence::Retriever open_retriever(const RunConfig& cfg, const std::string& index_path, const std::string& corpus_path) {
    const auto mode = cfg.retriever_mode();
    if (index_path.empty() && corpus_path.empty()) throw UsageError("one of --index or --corpus is required");
    if (mode == retrieval::RetrieverMode::sparse) {
        auto idx = index_path.empty()
                       ? retrieval::SparseIndex::build(load_units(corpus_path), cfg.bm25())
                       : retrieval::SparseIndex::load(index_path);
        return evidence::Retriever::sparse(std::make_shared<const retrieval::SparseIndex>(std::move(idx)));
    }
    auto embedder = cfg.make_embedder();
    retrieval::DenseBuildOptions opts;
    opts.max_in_flight = cfg.get_count("max_in_flight");
    auto idx = index_path.empty() ? retrieval::DenseIndex::build(load_units(corpus_path), *embedder, opts)
                                  : retrieval::DenseIndex::load(index_path, embedder.get());
    return evidence::Retriever::dense(std::make_shared<const retrieval::DenseIndex>(std::move(idx)), embedder);
}

std::string base_name(const std::string& name) {
    if (name.size() > 2 && name.compare(name.size() - 2, 2, "-2") == 0) return name.substr(0, name.size() - 2);
    return name;
}

bool is_dropped_variant(const std::string& name) {
    const std::string base = base_name(name);
    return base != name && evaluation::find_dataset(base) != nullptr &&
           contains(evaluation::find_dataset(base)->labels, Label::NEI);
}

fs::path locate_dataset(const RunConfig& cfg, const std::string& base) {
    const std::string dir = cfg.get("data_dir");
    if (dir.empty()) throw UsageError("no data file for " + base + "; pass --data or set data_dir");
    for (const char* ext : {".jsonl", ".tsv"}) {
        const fs::path p = fs::path(dir) / (base + ext);
        if (fs::exists(p)) return p;
    }
    throw IoError("no " + base + ".jsonl or " + base + ".tsv under " + dir);
}

// HealthFC-2 and SciFact-2 are read from the 3-class file with NEI removed.
evaluation::DatasetSpec load_named(const RunConfig& cfg, const std::string& name, const std::string& path) {
    const bool dropped = is_dropped_variant(name);
    const std::string base = dropped ? base_name(name) : name;
    evaluation::LoadOptions opts;
    opts.strict_counts = cfg.get_flag("strict_counts");
    if (!cfg.get("columns_dir").empty()) {
        const fs::path cols = fs::path(cfg.get("columns_dir")) / (base + ".json");
        if (fs::exists(cols)) opts.columns = evaluation::ColumnMap::load(cols);
    }
    auto ds = evaluation::load_dataset(base, path.empty() ? locate_dataset(cfg, base) : fs::path(path), opts);
    return dropped ? evaluation::drop_nei(ds) : ds;
}

LabelSet parse_labels(const std::string& s) {
    if (s == "3") return three_class_labels();
    if (s == "2") return two_class_labels();
    LabelSet out;
    for (const auto& name : split_list(s)) {
        auto l = normalize_label(name);
        if (!l) throw UsageError("unknown label '" + name + "' in --labels");
        out.push_back(*l);
    }
    if (out.empty()) throw UsageError("--labels is empty");
    return out;
}

// Label set of a run: registry entry for the dataset, else 2- or 3-class by
// whether NEI occurs.
LabelSet infer_labels(const std::vector<veracity::VerdictRecord>& records) {
    if (!records.empty()) {
        if (const auto* info = evaluation::find_dataset(records.front().dataset)) return info->labels;
    }
    for (const auto& r : records) {
        if (r.gold_label == Label::NEI || r.predicted_label == Label::NEI) {
            return three_class_labels();
        }
    }
    return two_class_labels();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        io::write_file_atomic(out_path, text.back() == '\n' ? text : text + "\n");
        log::info("wrote " + out_path);
    }
}

std::vector<veracity::VerdictRecord> of_split(std::vector<veracity::VerdictRecord> records, veracity::Split s,
                                               const std::string& what) {
    std::vector<veracity::VerdictRecord> out;
    for (auto& r : records) {
        if (r.split == s) out.push_back(std::move(r));
    }
    if (out.empty()) throw InvalidArgument(what + " has no " + veracity::to_string(s) + " records");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"claim verification with retrieved evidence and LLM justifications", "cer"};
    app.require_subcommand(1);
    Common common;
    std::function<void()> action;

    // index build
    auto* index = app.add_subcommand("index", "build a retrieval index");
    index->require_subcommand(1);
    auto* index_build = index->add_subcommand("build", "index the sentences of a corpus");
    std::string corpus_path;
    std::string out_path;
    add_common(index_build, common);
    index_build->add_option("--corpus", corpus_path, "corpus JSONL or TSV")->required();
    config_flag(index_build, common, "--mode", "mode", "sparse or dense");
    index_build->add_option("--out", out_path, "index file")->required();
    index_build->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            const auto units = load_units(corpus_path);
            if (cfg.retriever_mode() == retrieval::RetrieverMode::sparse) {
                const auto idx = retrieval::SparseIndex::build(units, cfg.bm25());
                idx.save(out_path);
                std::printf("sparse index: %zu units, %zu terms -> %s\n", idx.size(), idx.term_count(), out_path.c_str());
            } else {
                const auto embedder = cfg.make_embedder();
                retrieval::DenseBuildOptions opts;
                opts.max_in_flight = cfg.get_count("max_in_flight");
                const auto idx = retrieval::DenseIndex::build(units, *embedder, opts);
                idx.save(out_path);
                std::printf("dense index: %zu units, dimension %zu, provider %s -> %s\n", idx.size(), idx.dimension(),
                            idx.provider_tag().c_str(), out_path.c_str());
            }
        };
    });

    // retrieve
    auto* retrieve = app.add_subcommand("retrieve", "retrieve evidence for one claim or a claims file");
    std::string index_path;
    std::string claim_text;
    std::string claims_path;
    std::string dataset_name;
    add_common(retrieve, common);
    retrieve->add_option("--index", index_path, "index file from `index build`");
    retrieve->add_option("--corpus", corpus_path, "corpus to index in memory instead of --index");
    config_flag(retrieve, common, "--mode", "mode", "sparse or dense (must match the index)");
    config_flag(retrieve, common, "-k,--k", "k", "sentences per claim");
    config_flag(retrieve, common, "-m,--m", "m", "evidence sentences in the claim-evidence pair");
    auto* claim_opt = retrieve->add_option("--claim", claim_text, "claim text; prints ranked hits");
    auto* claims_opt = retrieve->add_option("--claims", claims_path, "dataset file; writes claim-evidence pairs");
    claim_opt->excludes(claims_opt);
    retrieve->add_option("--dataset", dataset_name, "dataset name for --claims (split sizes, label set)");
    retrieve->add_option("--out", out_path, "pairs JSONL for --claims");
    retrieve->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            if (claim_text.empty() && claims_path.empty()) throw UsageError("one of --claim or --claims is required");
            const auto retriever = open_retriever(cfg, index_path, corpus_path);
            const auto k = cfg.get_count("k");
            if (!claim_text.empty()) {
                const auto set = retriever.retrieve("query", claim_text, k);
                for (const auto& h : set.hits) {
                    std::printf("%zu\t%.6f\t%s\t%s\n", h.rank, h.score, h.sentence_id.c_str(), h.text.c_str());
                }
                return;
            }
            if (out_path.empty()) throw UsageError("--claims needs --out");
            const std::string name = dataset_name.empty() ? fs::path(claims_path).stem().string() : dataset_name;
            const auto ds = load_named(cfg, name, claims_path);
            const auto splits = evaluation::split_dataset(ds, cfg.get_u64("seed"));
            std::vector<evaluation::ClaimRecord> claims;
            for (const auto* part : {&splits.train, &splits.validation, &splits.test}) {
                claims.insert(claims.end(), part->begin(), part->end());
            }
            const auto pairs = pipeline::retrieve_pairs(claims, retriever, cfg.pipeline_config().reasoning);
            pipeline::write_pairs(pairs, out_path);
            std::printf("%zu claim-evidence pair(s) (%zu train, %zu validation, %zu test, %zu unused) -> %s\n",
                        pairs.size(), splits.train.size(), splits.validation.size(), splits.test.size(),
                        splits.unused.size(), out_path.c_str());
        };
    });

    // reason
    auto* reason = app.add_subcommand("reason", "prompt the LLM for a label and justification per pair");
    std::string pairs_path;
    add_common(reason, common);
    reason->add_option("--pairs", pairs_path, "pairs JSONL from `retrieve --claims`")->required();
    config_flag(reason, common, "--variant", "variant", "full, no_role, no_evidence or no_justification");
    config_flag(reason, common, "--llm-fixture", "llm_fixture", "mock LLM response file");
    config_flag(reason, common, "--cache-dir", "cache_dir", "response cache directory");
    reason->add_option("--out", out_path, "interchange JSONL")->required();
    reason->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            const auto pairs = pipeline::read_pairs(pairs_path);
            const auto llm = cfg.make_llm();
            const auto cache = cfg.make_cache();
            const auto records = pipeline::reason_pairs(pairs, *llm, cache.get(), cfg.pipeline_config().reasoning);
            veracity::write_interchange(records, out_path);
            std::size_t failed = 0;
            for (const auto& r : records) failed += r.has(veracity::RecordFlag::parse_failed) ? 1 : 0;
            std::printf("%zu record(s), %zu unparsed response(s) -> %s\n", records.size(), failed, out_path.c_str());
        };
    });

    // classify
    auto* classify = app.add_subcommand("classify", "predict veracity labels for interchange records");
    std::string in_path;
    std::string classify_mode = "trained";
    std::string model_path;
    std::string labels_arg;
    add_common(classify, common);
    classify->add_option("--in", in_path, "interchange JSONL")->required();
    classify->add_option("--mode", classify_mode, "zero-shot or trained");
    classify->add_option("--model", model_path, "model file from `train` (trained mode)");
    classify->add_option("--labels", labels_arg, "candidate labels for zero-shot: 2, 3 or a comma list");
    config_flag(classify, common, "--zeroshot-endpoint", "zeroshot_endpoint", "external zero-shot classifier URL");
    classify->add_option("--out", out_path, "interchange JSONL with predictions")->required();
    classify->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            const auto mode = pipeline::classify_mode_from_string(classify_mode);
            auto records = veracity::read_interchange(in_path);
            if (mode == pipeline::ClassifyMode::trained) {
                if (model_path.empty()) throw UsageError("--mode trained needs --model");
                const auto model = veracity::ClassifierModel::load(model_path);
                veracity::apply_predictions(model, records);
            } else {
                auto options = cfg.pipeline_config().zero_shot;
                options.candidate_labels = labels_arg.empty() ? infer_labels(records) : parse_labels(labels_arg);
                for (auto& r : records) {
                    auto z = veracity::zero_shot_classify(r, options);
                    r.predicted_label = z.label;
                    r.probabilities = std::move(z.probabilities);
                }
            }
            veracity::write_interchange(records, out_path);
            std::printf("%zu prediction(s) (%s) -> %s\n", records.size(), pipeline::to_string(mode), out_path.c_str());
        };
    });

    // train
    auto* train = app.add_subcommand("train", "train the logistic-regression veracity classifier");
    std::string train_path;
    std::string val_path;
    add_common(train, common);
    train->add_option("--train", train_path, "interchange JSONL; its train-split records are used")->required();
    train->add_option("--val", val_path, "interchange JSONL; its validation-split records select the epoch");
    train->add_option("--labels", labels_arg, "label set: 2, 3 or a comma list (default: gold labels present)");
    train->add_option("--out-model", out_path, "model file")->required();
    config_flag(train, common, "--lr", "lr", "learning rate");
    config_flag(train, common, "--l2", "l2", "L2 penalty");
    config_flag(train, common, "--epochs", "epochs", "epoch limit");
    train->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            const auto rows = of_split(veracity::read_interchange(train_path), veracity::Split::train, train_path);
            std::vector<veracity::VerdictRecord> val;
            if (!val_path.empty()) {
                val = of_split(veracity::read_interchange(val_path), veracity::Split::validation, val_path);
            }
            const std::string trained_on = rows.front().dataset;
            const auto labels = labels_arg.empty() ? LabelSet{} : parse_labels(labels_arg);
            const auto t = veracity::train_classifier(rows, val, cfg.pipeline_config().train, trained_on, labels);
            t.model.save(out_path);
            std::printf("trained on %zu record(s), %zu feature(s), best epoch %zu of %zu -> %s\n", rows.size(),
                        t.model.model.features, t.result.best_epoch, t.result.history.size(), out_path.c_str());
        };
    });

    // eval
    auto* eval = app.add_subcommand("eval", "score predictions against gold labels");
    std::string pred_path;
    std::string gold_path;
    std::string split_arg;
    bool as_json = false;
    add_common(eval, common);
    eval->add_option("--pred", pred_path, "interchange JSONL with predicted_label")->required();
    eval->add_option("--gold", gold_path, "interchange JSONL or dataset file with gold labels")->required();
    eval->add_option("--dataset", dataset_name, "dataset name when --gold is a dataset file");
    eval->add_option("--split", split_arg, "score only records of this split");
    eval->add_option("--labels", labels_arg, "label set: 2, 3 or a comma list");
    eval->add_flag("--json", as_json, "print the report as JSON");
    eval->add_option("--out", out_path, "write the report here instead of stdout");
    eval->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            auto pred = veracity::read_interchange(pred_path);
            if (!split_arg.empty()) {
                const auto s = veracity::split_from_string(split_arg);
                if (!s) throw UsageError("--split must be train, validation or test");
                pred = of_split(std::move(pred), *s, pred_path);
            }
            std::vector<veracity::VerdictRecord> gold;
            std::optional<LabelSet> dataset_labels;
            try {
                gold = veracity::read_interchange(gold_path);
            } catch (const FormatError&) {
                const std::string name = dataset_name.empty()
                                             ? (pred.empty() ? fs::path(gold_path).stem().string() : pred.front().dataset)
                                             : dataset_name;
                const auto ds = load_named(cfg, name, gold_path);
                dataset_labels = ds.labels;
                for (const auto& c : ds.records) {
                    veracity::VerdictRecord g;
                    g.claim_id = c.id;
                    g.gold_label = c.label;
                    gold.push_back(std::move(g));
                }
            }
            std::vector<veracity::VerdictRecord> gold_in_scope;
            std::map<std::string, bool> wanted;
            for (const auto& p : pred) wanted[p.claim_id] = true;
            for (auto& g : gold) {
                if (wanted.count(g.claim_id) != 0) gold_in_scope.push_back(std::move(g));
            }
            auto both = pred;
            both.insert(both.end(), gold.begin(), gold.end());
            const auto labels = !labels_arg.empty() ? parse_labels(labels_arg)
                                : dataset_labels    ? *dataset_labels
                                                    : infer_labels(both);
            const auto report = pipeline::evaluate_against(pred, gold_in_scope, labels);
            const std::string title = pred.empty() ? std::string{} : pred.front().dataset;
            emit(as_json ? evaluation::report_json(report) : evaluation::report_table(report, title), out_path);
        };
    });

    // baseline
    auto* baseline = app.add_subcommand("baseline", "constant-label baselines");
    std::string which = "all";
    std::string data_path;
    add_common(baseline, common);
    baseline->add_option("--dataset", dataset_name, "HealthFC, BioASQ-7b, SciFact, HealthFC-2, SciFact-2 or a file stem")
        ->required();
    baseline->add_option("--which", which, "all_supported, all_refuted, all_nei or all");
    baseline->add_option("--data", data_path, "dataset file (default: published label counts)");
    baseline->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            evaluation::DatasetSpec ds;
            if (!data_path.empty() || !cfg.get("data_dir").empty()) {
                ds = load_named(cfg, dataset_name, data_path);
            } else if (const auto* info = evaluation::find_dataset(dataset_name)) {
                ds = evaluation::dataset_from_counts(info->name, info->labels, info->expected_counts);
            } else {
                throw UsageError("unknown dataset '" + dataset_name + "'; pass --data");
            }
            if (which == "all") {
                std::cout << evaluation::baseline_table(ds);
            } else {
                const auto b = evaluation::baseline_from_string(which);
                std::cout << evaluation::report_table(evaluation::run_baseline(ds, b),
                                                      ds.name + " " + evaluation::to_string(b));
            }
        };
    });

    // ablate
    auto* ablate = app.add_subcommand("ablate", "prompt-construction ablation");
    std::string variants_arg = "full,no_role,no_evidence,no_justification";
    add_common(ablate, common);
    ablate->add_option("--dataset", dataset_name, "dataset name")->required();
    ablate->add_option("--data", data_path, "dataset file (default: data_dir)");
    ablate->add_option("--index", index_path, "index file");
    ablate->add_option("--corpus", corpus_path, "corpus to index in memory");
    ablate->add_option("--variants", variants_arg, "comma list of prompt variants");
    config_flag(ablate, common, "--mode", "mode", "sparse or dense");
    config_flag(ablate, common, "--llm-fixture", "llm_fixture", "mock LLM response file");
    config_flag(ablate, common, "--cache-dir", "cache_dir", "response cache directory");
    ablate->add_flag("--json", as_json, "print JSON instead of a table");
    ablate->add_option("--out", out_path, "write the JSON report here");
    ablate->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            std::vector<reasoning::PromptVariant> variants;
            for (const auto& v : split_list(variants_arg)) variants.push_back(reasoning::prompt_variant_from_string(v));
            if (variants.empty()) throw UsageError("--variants is empty");
            const auto ds = load_named(cfg, dataset_name, data_path);
            const auto retriever = open_retriever(cfg, index_path, corpus_path);
            const auto llm = cfg.make_llm();
            const auto cache = cfg.make_cache();
            const pipeline::Stage stage{&retriever, llm.get(), cache.get()};
            const auto rows = evaluation::ablation_run(ds, variants, stage, cfg.pipeline_config());
            if (!out_path.empty()) io::write_file_atomic(out_path, evaluation::ablation_json(ds.name, rows) + "\n");
            std::cout << (as_json ? evaluation::ablation_json(ds.name, rows) + "\n" : evaluation::ablation_table(ds.name, rows));
        };
    });

    // cross-eval
    auto* cross = app.add_subcommand("cross-eval", "train on one dataset, test on another");
    std::string train_names;
    std::string test_names;
    add_common(cross, common);
    cross->add_option("--train", train_names, "comma list of training datasets")->required();
    cross->add_option("--test", test_names, "comma list of test datasets")->required();
    config_flag(cross, common, "--data-dir", "data_dir", "directory of dataset files");
    cross->add_option("--index", index_path, "index file");
    cross->add_option("--corpus", corpus_path, "corpus to index in memory");
    config_flag(cross, common, "--mode", "mode", "sparse or dense");
    config_flag(cross, common, "--llm-fixture", "llm_fixture", "mock LLM response file");
    config_flag(cross, common, "--cache-dir", "cache_dir", "response cache directory");
    cross->add_flag("--json", as_json, "print JSON instead of a table");
    cross->add_option("--out", out_path, "write the JSON report here");
    cross->callback([&] {
        action = [&] {
            const auto cfg = resolve(common);
            std::vector<evaluation::DatasetSpec> tr;
            std::vector<evaluation::DatasetSpec> te;
            for (const auto& n : split_list(train_names)) tr.push_back(load_named(cfg, n, ""));
            for (const auto& n : split_list(test_names)) te.push_back(load_named(cfg, n, ""));
            if (tr.empty() || te.empty()) throw UsageError("--train and --test need at least one dataset each");
            const auto retriever = open_retriever(cfg, index_path, corpus_path);
            const auto llm = cfg.make_llm();
            const auto cache = cfg.make_cache();
            const pipeline::Stage stage{&retriever, llm.get(), cache.get()};
            const auto m = evaluation::cross_eval(tr, te, stage, cfg.pipeline_config());
            if (!out_path.empty()) io::write_file_atomic(out_path, evaluation::cross_eval_json(m) + "\n");
            std::cout << (as_json ? evaluation::cross_eval_json(m) + "\n" : evaluation::cross_eval_table(m));
        };
    });

    // stats
    auto* stats = app.add_subcommand("stats", "sentence length histogram of a corpus");
    std::size_t bins = 50;
    add_common(stats, common);
    stats->add_option("--corpus", corpus_path, "corpus JSONL or TSV")->required();
    stats->add_option("--out", out_path, "histogram CSV")->required();
    stats->add_option("--bins", bins, "number of equal-width bins")->check(CLI::PositiveNumber);
    stats->callback([&] {
        action = [&] {
            resolve(common);
            const auto units = load_units(corpus_path);
            const auto s = evaluation::corpus_stats(units, bins);
            io::write_file_atomic(out_path, evaluation::histogram_csv(s));
            std::printf("%zu document(s), %zu bin(s) -> %s\n", s.documents.size(), s.bins.size(), out_path.c_str());
        };
    });

    // config
    auto* config = app.add_subcommand("config", "print the resolved configuration");
    add_common(config, common);
    config->callback([&] { action = [&] { std::cout << resolve(common).describe(); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "cer: %s\n", e.what());
        std::fprintf(stderr, "run `cer --help` or `cer <command> --help` for usage\n");
        return 2;
    }
    try {
        if (action) action();
        return 0;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "cer: %s\n", e.what());
        std::fprintf(stderr, "run `cer <command> --help` for usage\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "cer: %s\n", e.what());
        std::fprintf(stderr, "fix the flag, environment variable or config file entry named above\n");
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "cer: %s\n", e.what());
        return 1;
    }
}
