// Acceptance checks, one per criterion. `cer_acceptance N` runs criterion N;
// without arguments every criterion runs. Each prints one PASS/FAIL line.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cer/binary_io.hpp"
#include "cer/classifier.hpp"
#include "cer/corpus.hpp"
#include "cer/dataset.hpp"
#include "cer/dense_index.hpp"
#include "cer/evidence.hpp"
#include "cer/experiments.hpp"
#include "cer/hashing.hpp"
#include "cer/metrics.hpp"
#include "cer/prompt.hpp"
#include "cer/sparse_index.hpp"
#include "json.hpp"
#include "prompt_diff.hpp"
#include "support.hpp"
#include "synthetic.hpp"

using namespace cer;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

// Runs the cer binary; stdout goes to `out` when given.
int cer_run(const std::vector<std::string>& args, const std::filesystem::path& out = {}) {
    std::string cmd = quote(CER_BINARY);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += out.empty() ? " >/dev/null" : " >" + quote(out.string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<corpus::SentenceUnit> fixture_units() {
    const auto r = corpus::ingest_corpus(cer::testing::fixture("corpus50.jsonl"), corpus::CorpusFormat::jsonl);
    return corpus::segment_documents(r.documents);
}

// ---------------------------------------------------------------------------
// 1. Metric oracle equivalence

Outcome metric_oracle() {
    SplitMix64 rng(20240601);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 1 + rng.below(500);
        std::vector<Label> gold(len), pred(len);
        for (std::size_t i = 0; i < len; ++i) {
            gold[i] = kAllLabels[rng.below(3)];
            pred[i] = kAllLabels[rng.below(3)];
        }
        double mp = 0, mr = 0, mf = 0;
        for (Label c : kAllLabels) {
            double tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < len; ++i) {
                tp += gold[i] == c && pred[i] == c;
                fp += gold[i] != c && pred[i] == c;
                fn += gold[i] == c && pred[i] != c;
            }
            const double p = tp + fp > 0 ? tp / (tp + fp) : 0;
            const double r = tp + fn > 0 ? tp / (tp + fn) : 0;
            mp += p / 3;
            mr += r / 3;
            mf += (p + r > 0 ? 2 * p * r / (p + r) : 0) / 3;
        }
        const auto rep = evaluation::macro_metrics(gold, pred, three_class_labels());
        worst = std::max({worst, std::abs(rep.macro_precision - mp), std::abs(rep.macro_recall - mr),
                          std::abs(rep.macro_f1 - mf)});
    }
    return {worst <= 1e-9, "200 random pairs, max |diff| = " + fmt("%.3g", worst) + " (tolerance 1e-9)"};
}

// ---------------------------------------------------------------------------
// 2. Baseline reproduction

Outcome baselines() {
    struct Target {
        const char* dataset;
        double f1[3];  // all_supported, all_refuted, all_nei, in percent
    };
    const Target targets[] = {{"HealthFC", {14.14, 9.52, 24.04}}, {"SciFact", {19.43, 11.78, 18.15}}};
    const evaluation::Baseline which[] = {evaluation::Baseline::all_supported, evaluation::Baseline::all_refuted,
                                          evaluation::Baseline::all_nei};
    bool pass = true;
    std::string detail;
    for (const auto& t : targets) {
        const auto* info = evaluation::find_dataset(t.dataset);
        const auto ds = evaluation::dataset_from_counts(t.dataset, info->labels, info->expected_counts);
        detail += std::string(detail.empty() ? "" : "; ") + t.dataset + " ";
        for (int i = 0; i < 3; ++i) {
            const double got = 100.0 * evaluation::run_baseline(ds, which[i]).macro_f1;
            const bool ok = std::abs(got - t.f1[i]) <= 0.5;
            pass = pass && ok;
            detail += std::string(i ? " / " : "") + fmt("%.2f", got) + " vs " + fmt("%.2f", t.f1[i]) + (ok ? "" : " (off)");
        }
    }
    return {pass, detail + " (tolerance 0.5 points)"};
}

// ---------------------------------------------------------------------------
// 3. BM25 oracle

Outcome bm25_oracle() {
    const auto units = fixture_units();
    if (units.size() != 50) return {false, "fixture corpus has " + std::to_string(units.size()) + " sentences, want 50"};
    const auto idx = retrieval::SparseIndex::build(units);
    std::vector<corpus::TokenStream> docs;
    double total = 0;
    for (const auto& u : units) {
        docs.push_back(corpus::preprocess(u.text));
        total += static_cast<double>(docs.back().size());
    }
    const double N = static_cast<double>(docs.size());
    const double avgdl = total / N;
    const double k1 = 1.2, b = 0.75;

    const std::vector<std::string> queries = {
        "coffee consumption and liver cirrhosis", "vitamin D supplements respiratory infections",
        "aspirin heart disease older adults",      "the effect of exercise on blood pressure",
        "risk risk risk",                          "zinc lozenges shorten the common cold",
        "no matching words xylophone"};
    double worst = 0;
    std::size_t checked = 0;
    for (const auto& q : queries) {
        const auto qt = corpus::preprocess(q);
        for (std::size_t i = 0; i < docs.size(); ++i) {
            double s = 0;
            for (const auto& t : qt) {
                double n = 0;
                for (const auto& d : docs) n += std::find(d.begin(), d.end(), t) != d.end();
                const double f = static_cast<double>(std::count(docs[i].begin(), docs[i].end(), t));
                if (f == 0) continue;
                const double len = static_cast<double>(docs[i].size());
                s += std::log((N - n + 0.5) / (n + 0.5)) * f * (k1 + 1) / (f + k1 * (1 - b + b * len / avgdl));
            }
            worst = std::max(worst, std::abs(idx.bm25_score(qt, i) - s));
            ++checked;
        }
    }
    double anti = 0;
    for (std::uint64_t n_total : {1ULL, 2ULL, 50ULL, 51ULL, 1000ULL}) {
        for (std::uint64_t a = 0; a <= n_total; ++a) {
            anti = std::max(anti, std::abs(retrieval::bm25_idf(n_total, a) + retrieval::bm25_idf(n_total, n_total - a)));
        }
    }
    const bool pass = worst <= 1e-9 && anti <= 1e-9;
    return {pass, std::to_string(checked) + " scores, max |diff| = " + fmt("%.3g", worst) +
                      "; idf(a) + idf(N-a) max |sum| = " + fmt("%.3g", anti) + " (tolerance 1e-9)"};
}

// ---------------------------------------------------------------------------
// 4. Dense search oracle

Outcome dense_oracle() {
    constexpr std::size_t kCount = 1000, kDim = 64;
    SplitMix64 rng(64);
    std::vector<retrieval::EmbeddingVector> vectors;
    std::vector<retrieval::StoredSentence> sentences;
    for (std::size_t i = 0; i < kCount; ++i) {
        retrieval::EmbeddingVector v(kDim);
        if (i % 10 == 9) {
            v = vectors[rng.below(vectors.size())];  // exact duplicate: forces score ties
        } else {
            for (auto& x : v) x = static_cast<float>(rng.uniform() * 2 - 1);
        }
        vectors.push_back(v);
        // Ids not in ordinal order, so tie-breaks by id are observable.
        sentences.push_back({"s" + std::to_string((i * 7919) % 100000), "sentence " + std::to_string(i)});
    }
    const auto idx = retrieval::DenseIndex::from_vectors(vectors, sentences, "synthetic");

    std::size_t mismatches = 0, ties_seen = 0;
    for (int q = 0; q < 25; ++q) {
        retrieval::EmbeddingVector query(kDim);
        if (q % 5 == 0) {
            query = vectors[rng.below(kCount)];
        } else {
            for (auto& x : query) x = static_cast<float>(rng.uniform() * 2 - 1);
        }
        std::vector<std::pair<double, std::string>> all;
        double qn = 0;
        for (float x : query) qn += static_cast<double>(x) * x;
        for (std::size_t i = 0; i < kCount; ++i) {
            double dot = 0, dn = 0;
            for (std::size_t j = 0; j < kDim; ++j) {
                dot += static_cast<double>(query[j]) * vectors[i][j];
                dn += static_cast<double>(vectors[i][j]) * vectors[i][j];
            }
            all.emplace_back(dot / (std::sqrt(qn) * std::sqrt(dn)), sentences[i].sentence_id);
        }
        std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (std::size_t k : {1UL, 10UL, 50UL, 1000UL}) {
            const auto hits = idx.search_vector(query, k);
            if (hits.size() != k) {
                ++mismatches;
                continue;
            }
            for (std::size_t i = 0; i < k; ++i) {
                if (hits[i].sentence_id != all[i].second || hits[i].rank != i + 1 ||
                    std::abs(hits[i].score - all[i].first) > 1e-12) {
                    ++mismatches;
                    break;
                }
            }
        }
        for (std::size_t i = 1; i < all.size(); ++i) ties_seen += all[i].first == all[i - 1].first;
    }
    return {mismatches == 0, "1000 vectors, d = 64, 25 queries x 4 depths, " + std::to_string(ties_seen) +
                                 " tied pairs, " + std::to_string(mismatches) + " order mismatches"};
}

// ---------------------------------------------------------------------------
// 5. End-to-end determinism

// One CLI pipeline run into `dir`; returns an error description or "".
std::string pipeline_run(const std::filesystem::path& dir) {
    const auto p = [&](const char* name) { return (dir / name).string(); };
    const std::string fx_corpus = cer::testing::fixture("corpus50.jsonl").string();
    const std::string fx_claims = cer::testing::fixture("claims12.jsonl").string();
    const std::string fx_llm = cer::testing::fixture("llm_mock.json").string();
    const std::vector<std::vector<std::string>> steps = {
        {"index", "build", "--corpus", fx_corpus, "--mode", "sparse", "--out", p("corpus.idx")},
        {"retrieve", "--index", p("corpus.idx"), "-k", "20", "--claims", fx_claims, "--dataset", "fixture", "--seed",
         "42", "--out", p("pairs.jsonl")},
        {"reason", "--pairs", p("pairs.jsonl"), "--llm-fixture", fx_llm, "--out", p("reasoned.jsonl")},
        {"train", "--train", p("reasoned.jsonl"), "--val", p("reasoned.jsonl"), "--seed", "42", "--out-model",
         p("model.bin")},
        {"classify", "--in", p("reasoned.jsonl"), "--mode", "trained", "--model", p("model.bin"), "--out",
         p("pred.jsonl")},
        {"eval", "--pred", p("pred.jsonl"), "--gold", fx_claims, "--dataset", "fixture", "--split", "test", "--json",
         "--out", p("report.json")},
    };
    for (const auto& s : steps) {
        if (cer_run(s) != 0) return "`cer " + s[0] + "` failed";
    }
    return "";
}

Outcome determinism() {
    cer::testing::TempDir a, b;
    for (const auto* dir : {&a, &b}) {
        const auto err = pipeline_run(dir->path());
        if (!err.empty()) return {false, err};
    }
    std::string differing;
    for (const char* f : {"corpus.idx", "pairs.jsonl", "reasoned.jsonl", "model.bin", "pred.jsonl", "report.json"}) {
        if (io::read_file(a / f) != io::read_file(b / f)) differing += std::string(" ") + f;
    }
    const auto report = nlohmann::json::parse(io::read_file(a / "report.json"));
    const std::string interchange = io::read_file(a / "pred.jsonl");
    const auto records = static_cast<std::size_t>(std::count(interchange.begin(), interchange.end(), '\n'));
    if (!differing.empty()) return {false, "outputs differ between runs:" + differing};
    return {records == 12, "12-claim pipeline run twice: interchange (" + std::to_string(records) +
                               " records) and report byte-identical; test macro F1 " +
                               fmt("%.4f", report["macro_f1"].get<double>())};
}

// ---------------------------------------------------------------------------
// 6. Ablation plumbing

Outcome ablation() {
    const auto units = fixture_units();
    const auto idx = retrieval::SparseIndex::build(units);
    const auto claims = evaluation::load_dataset("fixture", cer::testing::fixture("claims12.jsonl"));
    using reasoning::PromptVariant;
    std::size_t diffs = 0;
    for (const auto& c : claims.records) {
        std::vector<std::string> context;
        for (const auto& h : idx.search(c.claim, 20)) context.push_back(idx.sentence(idx.ordinal_of(h.sentence_id)).text);
        const auto full = reasoning::build_prompt(c.claim, context);
        for (auto v : {PromptVariant::no_role, PromptVariant::no_evidence, PromptVariant::no_justification}) {
            const auto verdict = cer::testing::sectioned_diff(full, reasoning::build_prompt(c.claim, context, {v}));
            if (!verdict.ok) return {false, c.id + " " + reasoning::to_string(v) + ": " + verdict.detail};
            ++diffs;
        }
    }

    cer::testing::TempDir dir;
    const int code = cer_run({"ablate", "--dataset", "fixture", "--data", cer::testing::fixture("claims12.jsonl").string(),
                              "--corpus", cer::testing::fixture("corpus50.jsonl").string(), "--llm-fixture",
                              cer::testing::fixture("llm_mock.json").string()},
                             dir / "table.txt");
    if (code != 0) return {false, "`cer ablate` exited " + std::to_string(code)};
    const std::string table = io::read_file(dir / "table.txt");
    std::istringstream lines(table);
    std::string line;
    std::vector<std::string> rows;
    bool header = false;
    while (std::getline(lines, line)) {
        if (line.find("P (%)") != std::string::npos && line.find("R (%)") != std::string::npos &&
            line.find("F1 (%)") != std::string::npos) {
            header = true;
        } else if (header && !line.empty()) {
            rows.push_back(line);
        }
    }
    const std::vector<PromptVariant> order = {PromptVariant::full, PromptVariant::no_role, PromptVariant::no_evidence,
                                              PromptVariant::no_justification};
    bool shaped = header && rows.size() == order.size();
    for (std::size_t i = 0; shaped && i < rows.size(); ++i) {
        shaped = rows[i].rfind(evaluation::variant_title(order[i]), 0) == 0;
    }
    if (!shaped) return {false, "ablate report is not variants x P/R/F1:\n" + table};
    return {true, std::to_string(diffs) + " variant prompts differ only in their named segments; ablate report has " +
                      std::to_string(rows.size()) + " variant rows x P/R/F1"};
}

// ---------------------------------------------------------------------------
// 7. Classifier properties

Outcome classifier() {
    using namespace veracity;
    const LabelSet labels = three_class_labels();
    auto matrix = [](const Vocabulary& v, const std::vector<VerdictRecord>& rs) {
        CsrMatrix x;
        x.cols = v.dimension();
        for (const auto& r : rs) x.add_row(v.featurize(r));
        return x;
    };
    auto targets = [&](const std::vector<VerdictRecord>& rs) {
        std::vector<std::size_t> t;
        for (const auto& r : rs) t.push_back(*index_in(labels, *r.gold_label));
        return t;
    };

    const auto small = cer::testing::planted_records("syn", labels, 48, Split::train, 71);
    const auto vocab = Vocabulary::build(small);
    const auto x = matrix(vocab, small);
    const auto t = targets(small);
    auto m = LogisticModel::zeros(labels, x.cols);
    SplitMix64 rng(5);
    for (auto& w : m.weights) w = rng.uniform() - 0.5;
    for (auto& b : m.bias) b = rng.uniform() - 0.5;
    const double l2 = 1e-3, h = 1e-4;  // rounding noise in the differences grows as h shrinks
    const auto g = objective_gradient(m, x, t, l2);
    double worst = 0;
    auto rel = [](double fd, double an) { return std::abs(fd - an) / std::max({1e-12, std::abs(fd), std::abs(an)}); };
    for (std::size_t j = 0; j < m.weights.size(); ++j) {
        auto p = m, q = m;
        p.weights[j] += h;
        q.weights[j] -= h;
        worst = std::max(worst, rel((objective(p, x, t, l2) - objective(q, x, t, l2)) / (2 * h), g.weights[j]));
    }
    for (std::size_t j = 0; j < m.bias.size(); ++j) {
        auto p = m, q = m;
        p.bias[j] += h;
        q.bias[j] -= h;
        worst = std::max(worst, rel((objective(p, x, t, l2) - objective(q, x, t, l2)) / (2 * h), g.bias[j]));
    }

    const double init = negative_log_likelihood(LogisticModel::zeros(labels, x.cols), x, t);
    const double want = static_cast<double>(small.size()) * std::log(3.0);

    const auto train = cer::testing::planted_records("syn", labels, 300, Split::train, 301);
    const auto test = cer::testing::planted_records("syn", labels, 60, Split::test, 302, "t");
    const auto trained = train_classifier(train, {}, TrainConfig{}, "syn");
    std::vector<Label> gold, pred;
    for (const auto& r : test) {
        gold.push_back(*r.gold_label);
        pred.push_back(trained.model.predict(r).label);
    }
    const double f1 = evaluation::macro_metrics(gold, pred, labels).macro_f1;
    const bool pass = worst <= 1e-5 && init == want && trained.result.initial_nll == 300 * std::log(3.0) && f1 >= 0.95;
    return {pass, "gradient max relative error " + fmt("%.3g", worst) + " (<= 1e-5); initial NLL " + fmt("%.17g", init) +
                      (init == want ? " == " : " != ") + "n ln 3; planted 300/60 held-out macro F1 " + fmt("%.4f", f1) +
                      " (>= 0.95)"};
}

// ---------------------------------------------------------------------------
// 8. Cross-dataset protocol

Outcome cross_dataset() {
    std::string detail;
    bool pass = true;
    for (auto [name, want] : {std::pair{"HealthFC", 327UL}, std::pair{"SciFact", 1072UL}}) {
        const auto* info = evaluation::find_dataset(name);
        const auto two = evaluation::drop_nei(evaluation::dataset_from_counts(name, info->labels, info->expected_counts));
        pass = pass && two.records.size() == want;
        detail += two.name + " " + std::to_string(two.records.size()) + " (want " + std::to_string(want) + "); ";
    }

    auto synthetic = [](const std::string& name, const LabelSet& labels, std::uint64_t seed) {
        evaluation::LabeledRecords d{name, labels, {}};
        const std::tuple<veracity::Split, std::size_t, const char*> parts[] = {
            {veracity::Split::train, 150, "a"}, {veracity::Split::validation, 30, "b"}, {veracity::Split::test, 60, "c"}};
        for (const auto& [split, n, prefix] : parts) {
            auto rs = cer::testing::planted_records(name, labels, n, split, seed++, name + "-" + prefix);
            d.records.insert(d.records.end(), rs.begin(), rs.end());
        }
        return d;
    };
    const std::vector<evaluation::LabeledRecords> sets = {synthetic("syn-3", three_class_labels(), 800),
                                                          synthetic("syn-2", two_class_labels(), 900)};
    const veracity::TrainConfig cfg;
    const auto m = evaluation::cross_eval_records(sets, sets, cfg);
    bool diagonal = m.cells.size() == 2 && m.cells[0].size() == 2;
    for (std::size_t i = 0; diagonal && i < 2; ++i) diagonal = m.cells[i][i] == evaluation::train_and_evaluate(sets[i], cfg);
    pass = pass && diagonal;
    detail += "2x2 cross-eval completed, diagonal cells ";
    detail += diagonal ? "equal standalone runs" : "differ from standalone runs";
    if (m.cells.size() == 2) {
        detail += " (F1 " + fmt("%.4f", m.cells[0][0].macro_f1) + ", " + fmt("%.4f", m.cells[1][1].macro_f1) + ")";
    }
    return {pass, detail};
}

struct Criterion {
    int number;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "metric oracle equivalence", 5, metric_oracle},  {2, "baseline reproduction", 5, baselines},
        {3, "BM25 oracle", 5, bm25_oracle},                  {4, "dense search oracle", 10, dense_oracle},
        {5, "end-to-end determinism", 30, determinism},      {6, "ablation plumbing", 10, ablation},
        {7, "classifier properties", 60, classifier},        {8, "cross-dataset protocol", 60, cross_dataset},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_s) {
            o.pass = false;
            o.detail += "; took " + fmt("%.2f", secs) + " s, limit " + fmt("%.0f", c.limit_s) + " s";
        }
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str(),
                    secs);
        failures += !o.pass;
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
