#include <cmath>
#include <fstream>
#include <set>

#include "cer/dataset.hpp"
#include "cer/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cer;
using namespace cer::evaluation;

namespace {

DatasetSpec healthfc_counts() {
    const auto* info = find_dataset("HealthFC");
    return dataset_from_counts("HealthFC", info->labels, info->expected_counts);
}

std::size_t count_of(const std::vector<ClaimRecord>& rs, Label l) {
    std::size_t n = 0;
    for (const auto& r : rs) n += r.label == l;
    return n;
}

}  // namespace

TEST_SUITE("dataset") {
    TEST_CASE("label normalization") {
        CHECK(normalize_label("true") == Label::Supported);
        CHECK(normalize_label(" SUPPORT ") == Label::Supported);
        CHECK(normalize_label("CONTRADICT") == Label::Refuted);
        CHECK(normalize_label("confute") == Label::Refuted);
        CHECK(normalize_label("Not  Enough Information") == Label::NEI);
        CHECK_FALSE(normalize_label("maybe").has_value());
        CHECK(label_from_name("NEI") == Label::NEI);
        CHECK_FALSE(label_from_name("nei").has_value());
    }

    TEST_CASE("registry") {
        const auto* h = find_dataset("HealthFC");
        REQUIRE(h);
        CHECK(h->expected_counts.at(Label::Supported) == 202);
        CHECK(h->expected_counts.at(Label::Refuted) == 125);
        CHECK(h->expected_counts.at(Label::NEI) == 433);
        const auto* s = find_dataset("SciFact");
        REQUIRE(s);
        CHECK(s->expected_counts.at(Label::NEI) == 337);
        CHECK(find_dataset("BioASQ-7b")->labels == two_class_labels());
        CHECK(find_dataset("HealthFC-2")->labels == two_class_labels());
        CHECK(find_dataset("nope") == nullptr);
    }

    TEST_CASE("drop_nei on published counts") {
        const auto h2 = drop_nei(healthfc_counts());
        CHECK(h2.records.size() == 327);
        CHECK(h2.name == "HealthFC-2");
        CHECK(h2.labels == two_class_labels());
        const auto* s = find_dataset("SciFact");
        CHECK(drop_nei(dataset_from_counts("SciFact", s->labels, s->expected_counts)).records.size() == 1072);
        const auto* b = find_dataset("BioASQ-7b");
        CHECK_THROWS_AS(drop_nei(dataset_from_counts("BioASQ-7b", b->labels, b->expected_counts)), InvalidArgument);
    }

    TEST_CASE("HealthFC split sizes and stratification") {
        const auto ds = healthfc_counts();
        const auto sp = split_dataset(ds, 42);
        CHECK(sp.train.size() == 451);
        CHECK(sp.validation.size() == 151);
        CHECK(sp.test.size() == 151);
        CHECK(sp.unused.size() == 760 - 753);
        std::set<std::string> ids;
        for (const auto* part : {&sp.train, &sp.validation, &sp.test, &sp.unused}) {
            for (const auto& r : *part) CHECK(ids.insert(r.id).second);
        }
        CHECK(ids.size() == 760);
        for (const auto* part : {&sp.train, &sp.validation, &sp.test}) {
            for (Label l : ds.labels) {
                const double want = static_cast<double>(part->size()) *
                                    static_cast<double>(count_of(ds.records, l)) / static_cast<double>(ds.records.size());
                CHECK(std::abs(static_cast<double>(count_of(*part, l)) - want) <= 2.0);
            }
        }
    }

    TEST_CASE("splits are deterministic per seed") {
        const auto ds = healthfc_counts();
        const auto a = split_dataset(ds, 7);
        const auto b = split_dataset(ds, 7);
        CHECK(a.test == b.test);
        CHECK(a.train == b.train);
        CHECK(split_dataset(ds, 8).test != a.test);
    }

    TEST_CASE("fit policy and proportional fallback") {
        const auto* b = find_dataset("BioASQ-7b");
        const auto sp = split_dataset(dataset_from_counts("BioASQ-7b", b->labels, b->expected_counts), 1);
        CHECK(sp.validation.size() == 150);
        CHECK(sp.test.size() == 150);
        CHECK(sp.train.size() == 745 - 300);
        CHECK(sp.unused.empty());

        const auto toy = dataset_from_counts("toy", three_class_labels(),
                                             {{Label::Supported, 4}, {Label::Refuted, 4}, {Label::NEI, 4}});
        const auto t = split_dataset(toy, 42);
        CHECK(t.train.size() == 8);
        CHECK(t.validation.size() == 2);
        CHECK(t.test.size() == 2);
        CHECK(proportional_sizes(10) == SplitSizes{6, 2, 2});
        CHECK_THROWS_AS(split_dataset(toy, SplitSizes{10, 2, 2}, 1), InvalidArgument);
    }

    TEST_CASE("records with their own split keep it") {
        auto toy = dataset_from_counts("toy", two_class_labels(), {{Label::Supported, 3}, {Label::Refuted, 3}});
        const Split order[] = {Split::train, Split::train, Split::test, Split::validation, Split::train, Split::test};
        for (std::size_t i = 0; i < 6; ++i) toy.records[i].split = order[i];
        const auto sp = split_dataset(toy, 42);
        CHECK(sp.train.size() == 3);
        CHECK(sp.validation.size() == 1);
        CHECK(sp.test.size() == 2);
        CHECK(sp.test[0].id == toy.records[2].id);
    }

    TEST_CASE("loading JSONL and TSV") {
        const auto ds = load_dataset("fixture", cer::testing::fixture("claims12.jsonl"));
        CHECK(ds.records.size() == 12);
        CHECK(ds.labels == three_class_labels());
        CHECK(ds.counts().at(Label::NEI) == 4);
        CHECK(ds.records[0].id == "c01");

        cer::testing::TempDir dir;
        {
            std::ofstream(dir / "h.tsv") << "uid\ttext\tverdict\tfold\n"
                                          << "a\tClaim one\ttrue\ttrain\n"
                                          << "b\tClaim two\tfalse\tdev\n";
        }
        LoadOptions o;
        o.columns.id = "uid";
        o.columns.claim = "text";
        o.columns.label = "verdict";
        o.columns.split = "fold";
        const auto t = load_dataset("HealthFC", dir / "h.tsv", o);
        REQUIRE(t.records.size() == 2);
        CHECK(t.records[1].label == Label::Refuted);
        CHECK(t.records[1].split == Split::validation);
        o.strict_counts = true;
        CHECK_THROWS_AS(load_dataset("HealthFC", dir / "h.tsv", o), Error);

        { std::ofstream(dir / "bad.jsonl") << R"({"id": "x", "claim": "c", "label": "perhaps"})" << "\n"; }
        try {
            load_dataset("toy", dir / "bad.jsonl");
            FAIL("expected a format error");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find(":1") != std::string::npos);
            CHECK(std::string(e.what()).find("perhaps") != std::string::npos);
        }
        { std::ofstream(dir / "nei.jsonl") << R"({"id": "x", "claim": "c", "label": "NEI"})" << "\n"; }
        CHECK_THROWS_AS(load_dataset("BioASQ-7b", dir / "nei.jsonl"), FormatError);
    }

    TEST_CASE("shipped column maps load") {
        for (const char* name : {"HealthFC", "BioASQ-7b", "SciFact"}) {
            const auto m = ColumnMap::load(std::filesystem::path(CER_DATA_DIR) / "columns" / (std::string(name) + ".json"));
            CHECK_FALSE(m.claim.empty());
        }
    }
}
