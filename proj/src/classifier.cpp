#include "cer/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "cer/hashing.hpp"
#include "cer/log.hpp"
#include "cer/metrics.hpp"

namespace cer::veracity {
namespace {

constexpr std::string_view kMagic = "CERMODL1";

class NeumaierSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double log_sum_exp(std::span<const double> z) {
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
}

void check_shapes(const LogisticModel& model, const CsrMatrix& x, std::span<const std::size_t> targets) {
    if (x.rows() != targets.size()) throw InvalidArgument("row and target counts differ");
    if (x.cols != model.features) throw InvalidArgument("feature count differs from the model");
    for (std::size_t t : targets) {
        if (t >= model.labels.size()) throw InvalidArgument("target index outside the label set");
    }
}

double macro_f1_of(const LogisticModel& model, const CsrMatrix& x, std::span<const std::size_t> targets) {
    std::vector<Label> gold;
    std::vector<Label> pred;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto z = model.logits(x, i);
        pred.push_back(make_prediction(model.labels, softmax(z)).label);
        gold.push_back(model.labels[targets[i]]);
    }
    return evaluation::macro_metrics(gold, pred, model.labels).macro_f1;
}

}  // namespace

void CsrMatrix::add_row(const SparseVector& row) {
    for (const auto& [idx, v] : row.entries) {
        if (idx >= cols) throw InvalidArgument("feature index " + std::to_string(idx) + " outside " + std::to_string(cols));
        col_idx.push_back(idx);
        values.push_back(v);
    }
    row_ptr.push_back(col_idx.size());
}

CsrMatrix CsrMatrix::from_rows(std::span<const SparseVector> rows, std::size_t cols) {
    CsrMatrix m;
    m.cols = cols;
    for (const auto& r : rows) m.add_row(r);
    return m;
}

LogisticModel LogisticModel::zeros(LabelSet labels, std::size_t features) {
    LogisticModel m;
    m.features = features;
    m.weights.assign(labels.size() * features, 0.0);
    m.bias.assign(labels.size(), 0.0);
    m.labels = std::move(labels);
    return m;
}

std::vector<double> LogisticModel::logits(const CsrMatrix& x, std::size_t row) const {
    std::vector<double> z(bias);
    for (std::size_t c = 0; c < labels.size(); ++c) {
        const double* w = weights.data() + c * features;
        for (std::size_t k = x.row_ptr[row]; k < x.row_ptr[row + 1]; ++k) z[c] += w[x.col_idx[k]] * x.values[k];
    }
    return z;
}

std::vector<double> LogisticModel::logits(const SparseVector& x) const {
    std::vector<double> z(bias);
    for (std::size_t c = 0; c < labels.size(); ++c) {
        const double* w = weights.data() + c * features;
        for (const auto& [idx, v] : x.entries) {
            if (idx < features) z[c] += w[idx] * v;
        }
    }
    return z;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double s = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) s += (p[i] = std::exp(logits[i] - m));
    for (double& v : p) v /= s;
    return p;
}

double negative_log_likelihood(const LogisticModel& model, const CsrMatrix& x, std::span<const std::size_t> targets) {
    check_shapes(model, x, targets);
    NeumaierSum total;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto z = model.logits(x, i);
        total.add(log_sum_exp(z) - z[targets[i]]);
    }
    return total.value();
}

double objective(const LogisticModel& model, const CsrMatrix& x, std::span<const std::size_t> targets, double l2) {
    const double n = static_cast<double>(std::max<std::size_t>(1, x.rows()));
    double w2 = 0.0;
    for (double w : model.weights) w2 += w * w;
    return negative_log_likelihood(model, x, targets) / n + 0.5 * l2 * w2;
}

Gradient objective_gradient(const LogisticModel& model, const CsrMatrix& x, std::span<const std::size_t> targets,
                            double l2) {
    check_shapes(model, x, targets);
    const std::size_t L = model.labels.size();
    Gradient g;
    g.weights.assign(model.weights.size(), 0.0);
    g.bias.assign(L, 0.0);
    const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(1, x.rows()));
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto p = softmax(model.logits(x, i));
        p[targets[i]] -= 1.0;
        for (std::size_t c = 0; c < L; ++c) {
            const double r = p[c] * inv_n;
            g.bias[c] += r;
            double* gw = g.weights.data() + c * model.features;
            for (std::size_t k = x.row_ptr[i]; k < x.row_ptr[i + 1]; ++k) gw[x.col_idx[k]] += r * x.values[k];
        }
    }
    for (std::size_t j = 0; j < g.weights.size(); ++j) g.weights[j] += l2 * model.weights[j];
    return g;
}

TrainResult train_logistic(const CsrMatrix& x, std::span<const std::size_t> targets, const CsrMatrix& val_x,
                           std::span<const std::size_t> val_targets, LabelSet labels, const TrainConfig& config) {
    if (x.rows() == 0) throw InvalidArgument("empty training split");
    if (!(config.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
    if (config.l2 < 0.0) throw InvalidArgument("l2 penalty must be non-negative");

    TrainResult result;
    result.model = LogisticModel::zeros(std::move(labels), x.cols);
    if (config.init_scale > 0.0) {
        SplitMix64 rng(config.seed);
        for (double& w : result.model.weights) w = config.init_scale * (2.0 * rng.uniform() - 1.0);
    }
    result.initial_nll = negative_log_likelihood(result.model, x, targets);
    const bool has_val = val_x.rows() > 0;

    LogisticModel current = result.model;
    double best_f1 = -1.0;
    double best_val_nll = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const Gradient g = objective_gradient(current, x, targets, config.l2);
        for (std::size_t j = 0; j < current.weights.size(); ++j) current.weights[j] -= config.learning_rate * g.weights[j];
        for (std::size_t c = 0; c < current.bias.size(); ++c) current.bias[c] -= config.learning_rate * g.bias[c];

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_nll = negative_log_likelihood(current, x, targets);
        stats.train_objective = objective(current, x, targets, config.l2);
        stats.val_macro_f1 = has_val ? macro_f1_of(current, val_x, val_targets) : 0.0;
        stats.val_nll = has_val ? negative_log_likelihood(current, val_x, val_targets) : 0.0;
        result.history.push_back(stats);

        if (!has_val) {
            result.model = current;
            result.best_epoch = epoch;
            continue;
        }
        // Macro-F1 decides; an equal F1 with lower validation loss also counts,
        // since F1 moves in steps while the loss is still improving.
        const bool better = stats.val_macro_f1 > best_f1 ||
                            (stats.val_macro_f1 == best_f1 && stats.val_nll < best_val_nll);
        if (better) {
            best_f1 = stats.val_macro_f1;
            best_val_nll = stats.val_nll;
            result.model = current;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            log::info("early stop at epoch " + std::to_string(epoch) + ", best epoch " +
                      std::to_string(result.best_epoch));
            break;
        }
    }
    return result;
}

Prediction make_prediction(const LabelSet& labels, std::span<const double> probabilities) {
    if (labels.size() != probabilities.size() || labels.empty()) throw InvalidArgument("label/probability size mismatch");
    Prediction out;
    for (std::size_t i = 0; i < labels.size(); ++i) out.probabilities[labels[i]] = probabilities[i];
    out.label = argmax_label(out.probabilities);
    return out;
}

Prediction ClassifierModel::predict(const VerdictRecord& record) const {
    return make_prediction(model.labels, softmax(model.logits(vocabulary.featurize(record))));
}

std::string ClassifierModel::serialize() const {
    io::BinaryWriter w;
    w.bytes(kMagic);
    w.str(trained_on);
    w.u64(seed);
    w.u32(static_cast<std::uint32_t>(model.labels.size()));
    for (Label l : model.labels) w.u32(static_cast<std::uint32_t>(l));
    w.u64(vocabulary.ngram_count());
    for (std::size_t i = 0; i < vocabulary.ngram_count(); ++i) {
        w.str(vocabulary.terms()[i]);
        w.f64(vocabulary.idf()[i]);
    }
    w.u64(model.features);
    for (double v : model.weights) w.f64(v);
    for (double v : model.bias) w.f64(v);
    return w.buffer();
}

void ClassifierModel::save(const std::filesystem::path& path) const { io::write_file_atomic(path, serialize()); }

ClassifierModel ClassifierModel::load(const std::filesystem::path& path) {
    return deserialize(io::read_file(path), path.string());
}

ClassifierModel ClassifierModel::deserialize(std::string bytes, const std::string& source) {
    io::BinaryReader r(std::move(bytes), source);
    if (r.bytes(kMagic.size()) != kMagic) throw FormatError(source + ": not a classifier model (bad magic)");
    ClassifierModel m;
    m.trained_on = r.str();
    m.seed = r.u64();
    const std::uint32_t num_labels = r.u32();
    if (num_labels < 2 || num_labels > 3) throw FormatError(source + ": label set must have 2 or 3 entries");
    LabelSet labels;
    for (std::uint32_t i = 0; i < num_labels; ++i) {
        const std::uint32_t l = r.u32();
        if (l > 2) throw FormatError(source + ": unknown label code " + std::to_string(l));
        if (contains(labels, static_cast<Label>(l))) throw FormatError(source + ": repeated label");
        labels.push_back(static_cast<Label>(l));
    }
    const std::uint64_t vocab = r.u64();
    if (vocab > r.remaining() / 12) throw FormatError(source + ": vocabulary size exceeds file");
    std::vector<std::pair<std::string, double>> entries;
    entries.reserve(vocab);
    for (std::uint64_t i = 0; i < vocab; ++i) {
        std::string term = r.str();
        const double idf = r.f64();
        entries.emplace_back(std::move(term), idf);
    }
    try {
        m.vocabulary = Vocabulary::from_entries(std::move(entries));
    } catch (const InvalidArgument& e) {
        throw FormatError(source + ": " + e.what());
    }
    const std::uint64_t features = r.u64();
    if (features != m.vocabulary.dimension()) throw FormatError(source + ": feature count does not match vocabulary");
    if (r.remaining() != (num_labels * features + num_labels) * 8) throw FormatError(source + ": weight block size mismatch");
    m.model = LogisticModel::zeros(labels, features);
    for (double& v : m.model.weights) {
        v = r.f64();
        if (!std::isfinite(v)) throw FormatError(source + ": non-finite weight");
    }
    for (double& v : m.model.bias) {
        v = r.f64();
        if (!std::isfinite(v)) throw FormatError(source + ": non-finite bias");
    }
    return m;
}

ClassifierTraining train_classifier(std::span<const VerdictRecord> train, std::span<const VerdictRecord> val,
                                    const TrainConfig& config, const std::string& trained_on, LabelSet labels) {
    if (train.empty()) throw InvalidArgument("empty training split");
    for (const auto& r : train) {
        if (!r.gold_label) throw InvalidArgument("training record " + r.claim_id + " has no gold label");
    }
    if (labels.empty()) {
        for (Label l : kAllLabels) {
            for (const auto& r : train) {
                if (*r.gold_label == l) {
                    labels.push_back(l);
                    break;
                }
            }
        }
    }
    std::size_t present = 0;
    for (Label l : labels) {
        present += std::any_of(train.begin(), train.end(), [&](const VerdictRecord& r) { return *r.gold_label == l; });
    }
    if (present < 2) throw InvalidArgument("training split holds a single class");

    auto targets_of = [&](std::span<const VerdictRecord> rows, const char* what) {
        std::vector<std::size_t> t;
        for (const auto& r : rows) {
            if (!r.gold_label) throw InvalidArgument(std::string(what) + " record " + r.claim_id + " has no gold label");
            auto idx = index_in(labels, *r.gold_label);
            if (!idx) {
                throw InvalidArgument(std::string(what) + " record " + r.claim_id + " has label " +
                                      std::string(to_string(*r.gold_label)) + " outside " + join_labels(labels));
            }
            t.push_back(*idx);
        }
        return t;
    };
    const auto train_targets = targets_of(train, "training");
    const auto val_targets = targets_of(val, "validation");

    ClassifierTraining out;
    out.model.vocabulary = Vocabulary::build(train);
    out.model.trained_on = trained_on;
    out.model.seed = config.seed;
    const std::size_t dim = out.model.vocabulary.dimension();
    CsrMatrix x;
    x.cols = dim;
    for (const auto& r : train) x.add_row(out.model.vocabulary.featurize(r));
    CsrMatrix vx;
    vx.cols = dim;
    for (const auto& r : val) vx.add_row(out.model.vocabulary.featurize(r));

    out.result = train_logistic(x, train_targets, vx, val_targets, labels, config);
    out.model.model = out.result.model;
    return out;
}

void apply_predictions(const ClassifierModel& model, std::vector<VerdictRecord>& records) {
    for (auto& r : records) {
        Prediction p = model.predict(r);
        r.predicted_label = p.label;
        r.probabilities = std::move(p.probabilities);
    }
}

}  // namespace cer::veracity
