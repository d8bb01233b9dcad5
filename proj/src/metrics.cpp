#include "cer/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "cer/error.hpp"
#include "json.hpp"

namespace cer::evaluation {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport macro_metrics(std::span<const Label> gold, std::span<const Label> predicted, const LabelSet& labels,
                         bool allow_unlisted_predictions) {
    if (gold.size() != predicted.size()) {
        throw InvalidArgument("gold and predicted lengths differ (" + std::to_string(gold.size()) + " vs " +
                              std::to_string(predicted.size()) + ")");
    }
    if (labels.empty()) throw InvalidArgument("empty label set");
    const std::size_t L = labels.size();
    EvalReport report;
    report.labels = labels;
    report.total = gold.size();
    report.confusion.assign(L, std::vector<std::size_t>(L, 0));
    report.unlisted.assign(L, 0);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        auto g = index_in(labels, gold[i]);
        auto p = index_in(labels, predicted[i]);
        if (g && !p && allow_unlisted_predictions) {
            ++report.unlisted[*g];
            continue;
        }
        if (!g || !p) {
            throw InvalidArgument("label at position " + std::to_string(i) + " is outside the label set " +
                                  join_labels(labels));
        }
        ++report.confusion[*g][*p];
    }
    for (std::size_t c = 0; c < L; ++c) {
        std::size_t tp = report.confusion[c][c];
        std::size_t gold_c = report.unlisted[c];
        std::size_t pred_c = 0;
        for (std::size_t o = 0; o < L; ++o) {
            gold_c += report.confusion[c][o];
            pred_c += report.confusion[o][c];
        }
        ClassMetrics m;
        m.support = gold_c;
        m.precision = ratio(tp, pred_c);
        m.recall = ratio(tp, gold_c);
        m.f1 = (m.precision + m.recall) == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        report.per_label.push_back(m);
        report.macro_precision += m.precision;
        report.macro_recall += m.recall;
        report.macro_f1 += m.f1;
    }
    report.macro_precision /= static_cast<double>(L);
    report.macro_recall /= static_cast<double>(L);
    report.macro_f1 /= static_cast<double>(L);
    return report;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
    return buf;
}

std::string report_json(const EvalReport& r, int indent) {
    nlohmann::ordered_json j;
    j["labels"] = nlohmann::ordered_json::array();
    for (Label l : r.labels) j["labels"].push_back(to_string(l));
    j["total"] = r.total;
    j["macro_precision"] = r.macro_precision;
    j["macro_recall"] = r.macro_recall;
    j["macro_f1"] = r.macro_f1;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        const auto& m = r.per_label[i];
        per[std::string(to_string(r.labels[i]))] = {
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
    }
    j["per_label"] = per;
    j["confusion"] = r.confusion;
    j["unlisted_predictions"] = r.unlisted;
    return j.dump(indent);
}

std::string report_table(const EvalReport& r, const std::string& title) {
    std::ostringstream out;
    char line[160];
    if (!title.empty()) out << title << '\n';
    std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %8s\n", "label", "P (%)", "R (%)", "F1 (%)", "support");
    out << line;
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        const auto& m = r.per_label[i];
        std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %8zu\n", std::string(to_string(r.labels[i])).c_str(),
                      percent(m.precision).c_str(), percent(m.recall).c_str(), percent(m.f1).c_str(), m.support);
        out << line;
    }
    std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %8zu\n", "macro", percent(r.macro_precision).c_str(),
                  percent(r.macro_recall).c_str(), percent(r.macro_f1).c_str(), r.total);
    out << line;
    return out.str();
}

}  // namespace cer::evaluation
