#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cer/featurizer.hpp"
#include "cer/interchange.hpp"
#include "cer/labels.hpp"

namespace cer::veracity {

/// Compressed sparse rows.
struct CsrMatrix {
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col_idx;
    std::vector<double> values;

    [[nodiscard]] std::size_t rows() const { return row_ptr.size() - 1; }
    void add_row(const SparseVector& row);
    static CsrMatrix from_rows(std::span<const SparseVector> rows, std::size_t cols);
};

/// Multinomial logistic regression: P(y | x) = softmax(W x + b)_y.
struct LogisticModel {
    LabelSet labels;
    std::size_t features = 0;
    std::vector<double> weights;  // labels.size() x features, row-major
    std::vector<double> bias;     // labels.size()

    static LogisticModel zeros(LabelSet labels, std::size_t features);

    [[nodiscard]] std::vector<double> logits(const CsrMatrix& x, std::size_t row) const;
    [[nodiscard]] std::vector<double> logits(const SparseVector& x) const;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Sum over rows of -ln P(y_i | x_i), accumulated with compensated
/// summation. `targets` are indices into model.labels.
double negative_log_likelihood(const LogisticModel& model, const CsrMatrix& x, std::span<const std::size_t> targets);

/// Training objective: NLL / n + (l2 / 2) * ||W||^2 (bias unpenalized).
double objective(const LogisticModel& model, const CsrMatrix& x, std::span<const std::size_t> targets, double l2);

struct Gradient {
    std::vector<double> weights;
    std::vector<double> bias;
};

/// Analytic gradient of objective().
Gradient objective_gradient(const LogisticModel& model, const CsrMatrix& x, std::span<const std::size_t> targets,
                            double l2);

struct TrainConfig {
    double learning_rate = 1.0;  // safe for unit-norm features: the loss gradient is 1.5-Lipschitz at most
    double l2 = 1e-4;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;  // epochs without a new best validation macro-F1
    std::uint64_t seed = 42;
    double init_scale = 0.0;  // weights start uniform in [-s, s]; 0 means all zeros
};

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double train_nll = 0.0;
    double train_objective = 0.0;
    double val_macro_f1 = 0.0;
    double val_nll = 0.0;
};

struct TrainResult {
    LogisticModel model;  // parameters of best_epoch
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;  // 0 when no epoch ran
    double initial_nll = 0.0;
};

/// Full-batch gradient descent on objective(). With a validation set, the
/// epoch with the best validation macro-F1 is kept, ties going to the lower
/// validation NLL and then to the earlier epoch; training stops after
/// `patience` epochs without improvement. Without one, the last epoch is kept.
TrainResult train_logistic(const CsrMatrix& x, std::span<const std::size_t> targets, const CsrMatrix& val_x,
                           std::span<const std::size_t> val_targets, LabelSet labels, const TrainConfig& config);

struct Prediction {
    Label label = Label::NEI;
    std::map<Label, double> probabilities;
};

/// Label with the highest probability; ties go to the lexicographically
/// first label name.
Prediction make_prediction(const LabelSet& labels, std::span<const double> probabilities);

/// Vocabulary plus logistic model. File layout (little-endian):
///   "CERMODL1" | str trained_on | u64 seed | u32 num_labels | num_labels x u32 label
///   | u64 vocab_size | vocab_size x (str term | f64 idf)
///   | u64 features | weights f64[num_labels * features] | bias f64[num_labels]
struct ClassifierModel {
    Vocabulary vocabulary;
    LogisticModel model;
    std::string trained_on;
    std::uint64_t seed = 0;

    void save(const std::filesystem::path& path) const;
    [[nodiscard]] std::string serialize() const;
    static ClassifierModel load(const std::filesystem::path& path);
    static ClassifierModel deserialize(std::string bytes, const std::string& source = "buffer");

    [[nodiscard]] Prediction predict(const VerdictRecord& record) const;
};

struct ClassifierTraining {
    ClassifierModel model;
    TrainResult result;
};

/// Builds the vocabulary on `train`, fits the model and selects the epoch on
/// `val`. The label set is `labels` when given, else the gold labels present
/// in `train` in canonical order. Throws InvalidArgument for an empty or
/// single-class training split, a record without gold label, or a gold label
/// outside the label set.
ClassifierTraining train_classifier(std::span<const VerdictRecord> train, std::span<const VerdictRecord> val,
                                    const TrainConfig& config, const std::string& trained_on = {},
                                    LabelSet labels = {});

/// Applies predict() and fills predicted_label and probabilities.
void apply_predictions(const ClassifierModel& model, std::vector<VerdictRecord>& records);

}  // namespace cer::veracity
