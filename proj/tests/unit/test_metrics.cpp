#include <cmath>

#include "cer/error.hpp"
#include "cer/hashing.hpp"
#include "cer/metrics.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cer;
using namespace cer::evaluation;

namespace {

constexpr Label S = Label::Supported;
constexpr Label R = Label::Refuted;
constexpr Label N = Label::NEI;

// Per-class counting straight from the definitions.
struct Brute {
    double p = 0, r = 0, f = 0;
};

Brute brute_macro(const std::vector<Label>& gold, const std::vector<Label>& pred, const LabelSet& labels) {
    Brute out;
    for (Label c : labels) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (gold[i] == c && pred[i] == c) tp++;
            if (gold[i] != c && pred[i] == c) fp++;
            if (gold[i] == c && pred[i] != c) fn++;
        }
        const double p = tp + fp > 0 ? tp / (tp + fp) : 0;
        const double r = tp + fn > 0 ? tp / (tp + fn) : 0;
        const double f = p + r > 0 ? 2 * p * r / (p + r) : 0;
        out.p += p / static_cast<double>(labels.size());
        out.r += r / static_cast<double>(labels.size());
        out.f += f / static_cast<double>(labels.size());
    }
    return out;
}

}  // namespace

TEST_SUITE("metrics") {
    TEST_CASE("worked example") {
        const std::vector<Label> gold = {S, S, R, N};
        const std::vector<Label> pred = {S, R, R, N};
        const auto rep = macro_metrics(gold, pred, three_class_labels());
        CHECK(rep.macro_precision == doctest::Approx(5.0 / 6).epsilon(1e-12));
        CHECK(rep.macro_recall == doctest::Approx(5.0 / 6).epsilon(1e-12));
        // Unweighted mean of per-class F1 (2/3, 2/3, 1).
        CHECK(rep.macro_f1 == doctest::Approx(7.0 / 9).epsilon(1e-12));
        CHECK(rep.per_label[0] == ClassMetrics{1.0, 0.5, 2.0 / 3, 2});
        CHECK(rep.confusion[0][1] == 1);
        CHECK(rep.total == 4);
    }

    TEST_CASE("never-predicted class contributes zero") {
        const auto rep = macro_metrics(std::vector<Label>{S, R, N}, std::vector<Label>{S, S, S}, three_class_labels());
        CHECK(rep.per_label[1].f1 == 0.0);
        CHECK(rep.per_label[2].precision == 0.0);
        CHECK(rep.macro_precision == doctest::Approx(1.0 / 9));
    }

    TEST_CASE("closed-form constant baselines") {
        // all_supported on counts s, r, n: P_S = s/T, R_S = 1, others 0.
        const std::size_t s = 202, r = 125, n = 433;
        std::vector<Label> gold;
        gold.insert(gold.end(), s, S);
        gold.insert(gold.end(), r, R);
        gold.insert(gold.end(), n, N);
        const std::vector<Label> pred(gold.size(), S);
        const double prec = static_cast<double>(s) / static_cast<double>(s + r + n);
        const auto rep = macro_metrics(gold, pred, three_class_labels());
        CHECK(rep.macro_precision == doctest::Approx(prec / 3).epsilon(1e-12));
        CHECK(rep.macro_recall == doctest::Approx(1.0 / 3).epsilon(1e-12));
        CHECK(rep.macro_f1 == doctest::Approx(2 * prec / (prec + 1) / 3).epsilon(1e-12));
    }

    TEST_CASE("matches the brute-force oracle") {
        SplitMix64 rng(2024);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t len = 1 + rng.below(500);
            std::vector<Label> gold(len), pred(len);
            for (std::size_t i = 0; i < len; ++i) {
                gold[i] = kAllLabels[rng.below(3)];
                pred[i] = kAllLabels[rng.below(3)];
            }
            const auto rep = macro_metrics(gold, pred, three_class_labels());
            const auto want = brute_macro(gold, pred, three_class_labels());
            CHECK(std::abs(rep.macro_precision - want.p) <= 1e-9);
            CHECK(std::abs(rep.macro_recall - want.r) <= 1e-9);
            CHECK(std::abs(rep.macro_f1 - want.f) <= 1e-9);
        }
    }

    TEST_CASE("input errors") {
        CHECK_THROWS_AS(macro_metrics(std::vector<Label>{S}, std::vector<Label>{}, three_class_labels()),
                        InvalidArgument);
        CHECK_THROWS_AS(macro_metrics(std::vector<Label>{N}, std::vector<Label>{S}, two_class_labels()),
                        InvalidArgument);
        CHECK_THROWS_AS(macro_metrics(std::vector<Label>{S}, std::vector<Label>{N}, two_class_labels()),
                        InvalidArgument);
    }

    TEST_CASE("unlisted predictions count as misses only") {
        const auto rep =
            macro_metrics(std::vector<Label>{S, R, S}, std::vector<Label>{N, R, S}, two_class_labels(), true);
        CHECK(rep.per_label[0].recall == 0.5);
        CHECK(rep.per_label[0].precision == 1.0);
        CHECK(rep.per_label[1].precision == 1.0);
        CHECK(rep.unlisted[0] == 1);
    }

    TEST_CASE("report formats") {
        CHECK(percent(0.14142) == "14.14");
        CHECK(percent(1.0) == "100.00");
        const auto rep = macro_metrics(std::vector<Label>{S, R}, std::vector<Label>{S, S}, two_class_labels());
        const auto j = nlohmann::json::parse(report_json(rep));
        CHECK(j["macro_f1"].get<double>() == doctest::Approx(rep.macro_f1));
        CHECK(j.contains("confusion"));
        const auto table = report_table(rep, "toy");
        CHECK(table.find("toy") != std::string::npos);
        CHECK(table.find(percent(rep.macro_f1)) != std::string::npos);
    }
}
