#include <fstream>
#include <sstream>

#include "cer/corpus.hpp"
#include "cer/error.hpp"
#include "cer/porter_stemmer.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cer;
using namespace cer::corpus;
using cer::testing::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string join(const TokenStream& t) {
    std::string out;
    for (const auto& s : t) out += (out.empty() ? "" : " ") + s;
    return out;
}

}  // namespace

TEST_SUITE("corpus") {
    TEST_CASE("well-formed, empty and malformed rows") {
        TempDir dir;
        write(dir / "c.jsonl",
              "{\"id\":\"p1\",\"title\":\"T\",\"abstract\":\"A sentence.\"}\n"
              "{\"id\":\"p2\",\"title\":\"T\",\"abstract\":\"\"}\n"
              "{\"id\":\"p3\",\"abstract\":\"Another one.\"}\n"
              "not json\n"
              "{\"id\":\"p1\",\"abstract\":\"Duplicate.\"}\n");
        const auto r = ingest_corpus(dir / "c.jsonl", CorpusFormat::jsonl);
        REQUIRE(r.documents.size() == 2);
        CHECK(r.documents[0] == DocumentRecord{"p1", "T", "A sentence."});
        CHECK(r.documents[1].doc_id == "p3");
        CHECK(r.skipped_empty == 1);
        CHECK(r.skipped_malformed == 1);
        CHECK(r.skipped_duplicate == 1);
        CHECK(r.warnings.size() == 3);
        CHECK(r.warnings[1].find(":4") != std::string::npos);
    }

    TEST_CASE("three rows, one malformed") {
        TempDir dir;
        write(dir / "c.tsv", "id\ttitle\tabstract\na\tT\tOne.\nb\tmissing a field\nc\tT\tTwo.\n");
        const auto r = ingest_corpus(dir / "c.tsv", format_from_path(dir / "c.tsv"));
        CHECK(r.documents.size() == 2);
        CHECK(r.warnings.size() == 1);
    }

    TEST_CASE("unreadable file") {
        CHECK_THROWS_AS(ingest_corpus("/nonexistent/corpus.jsonl", CorpusFormat::jsonl), IoError);
    }

    TEST_CASE("sentence segmentation") {
        CHECK(segment_sentences("A works. B fails.") == std::vector<std::string>{"A works.", "B fails."});
        CHECK(segment_sentences("Dose approx. 5 mg daily. Next point.") ==
              std::vector<std::string>{"Dose approx. 5 mg daily.", "Next point."});
        CHECK(segment_sentences("").empty());
        CHECK(segment_sentences("The patients (n = 20) were treated, e.g. With care.").size() == 1);
        CHECK(segment_sentences("Is it safe? Yes! It is.") == std::vector<std::string>{"Is it safe?", "Yes!", "It is."});
    }

    TEST_CASE("segmentation rejoins to the normalized text") {
        const std::string text = "First line.\n\nSecond  line with  gaps.   Third vs. fourth? Fifth.";
        const auto parts = segment_sentences(text);
        std::string joined;
        for (const auto& p : parts) joined += (joined.empty() ? "" : " ") + p;
        CHECK(joined == normalize_whitespace(text));
    }

    TEST_CASE("sentence units") {
        const std::vector<DocumentRecord> docs = {{"d1", "", "One. Two. Three."}, {"d2", "", ""}, {"d3", "", "Only."}};
        const auto units = segment_documents(docs);
        REQUIRE(units.size() == 4);
        CHECK(units[0].sentence_id == "d1#0");
        CHECK(units[2].sentence_id == "d1#2");
        CHECK(units[3].sentence_id == "d3#0");
        CHECK(units[3].char_length == 5);
    }

    TEST_CASE("preprocess examples") {
        CHECK(preprocess("Running increases risks.") == TokenStream{"run", "increas", "risk"});
        CHECK(preprocess("The of and").empty());
        CHECK(preprocess("").empty());
    }

    TEST_CASE("non-ASCII and digits pass through unstemmed") {
        CHECK(preprocess("Caffè 2023 covid19") == TokenStream{"caffè", "2023", "covid19"});
        CHECK(count_code_points("caffè") == 5);
        CHECK(normalize_and_lowercase("ＡＢＣ") == "abc");
    }

    TEST_CASE("unstemmed analysis is idempotent") {
        const TextAnalyzer a;
        for (const char* s : {"Vitamin D supplementation reduced infections.", "Aspirin, bleeding & mortality",
                              "The effect was strongest—in low baseline groups!"}) {
            const auto once = a.terms(s);
            CHECK(a.terms(join(once)) == once);
        }
    }

    TEST_CASE("stemming is not idempotent") {
        // Porter's rules are not a closure: "increas" loses its final s on a
        // second pass. Pipelines stem exactly once.
        const auto once = preprocess("increases");
        CHECK(once == TokenStream{"increas"});
        CHECK(preprocess(join(once)) == TokenStream{"increa"});
    }

    TEST_CASE("Porter stemmer matches the reference vectors") {
        std::ifstream in(cer::testing::fixture("porter_oracle.tsv"));
        REQUIRE(in);
        std::string line;
        std::size_t n = 0;
        std::size_t mismatches = 0;
        while (std::getline(in, line)) {
            const auto tab = line.find('\t');
            const std::string word = line.substr(0, tab);
            const std::string want = line.substr(tab + 1);
            const std::string got = text::porter_stem(word);
            if (got != want) {
                ++mismatches;
                INFO(word << ": got " << got << ", want " << want);
                CHECK(got == want);
            }
            ++n;
        }
        CHECK(n > 2000);
        CHECK(mismatches == 0);
    }

    TEST_CASE("word lists") {
        const auto w = WordList::parse("# comment\nThe\n\nof  # trailing\nthe\n");
        CHECK(w.size() == 2);
        CHECK(w.contains("the"));
        CHECK(w.contains("of"));
        CHECK(default_stopwords().contains("and"));
        CHECK(default_abbreviations().contains("approx."));
    }
}
