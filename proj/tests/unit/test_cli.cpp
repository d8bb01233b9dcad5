#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cer/binary_io.hpp"
#include "cer/interchange.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Run cer_run(const cer::testing::TempDir& dir, const std::vector<std::string>& args) {
    std::string cmd = quote(CER_BINARY);
    for (const auto& a : args) cmd += " " + quote(a);
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = cer::io::read_file(out);
    r.err = cer::io::read_file(err);
    return r;
}

std::string fx(const char* name) { return cer::testing::fixture(name).string(); }

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("help and usage errors") {
        cer::testing::TempDir dir;
        CHECK(cer_run(dir, {"--help"}).code == 0);
        auto r = cer_run(dir, {"index", "build", "--out", (dir / "x.idx").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("--corpus") != std::string::npos);
        r = cer_run(dir, {"retrieve", "--corpus", fx("corpus50.jsonl"), "--mode", "hybrid", "--claim", "x"});
        CHECK(r.code == 2);
        CHECK(r.err.find("mode") != std::string::npos);
        r = cer_run(dir, {"config", "--set", "bogus=1"});
        CHECK(r.code == 2);
        CHECK(r.err.find("bogus") != std::string::npos);
        r = cer_run(dir, {"retrieve", "--claim", "x"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--index") != std::string::npos);
    }

    TEST_CASE("domain errors exit 1") {
        cer::testing::TempDir dir;
        { std::ofstream(dir / "bad.jsonl") << "{\"claim_id\": 3}\n"; }
        const auto r = cer_run(dir, {"eval", "--pred", (dir / "bad.jsonl").string(), "--gold", (dir / "bad.jsonl").string()});
        CHECK(r.code == 1);
        CHECK(r.err.find("bad.jsonl:1") != std::string::npos);
        CHECK(cer_run(dir, {"index", "build", "--corpus", (dir / "none.jsonl").string(), "--out",
                            (dir / "i.idx").string()})
                  .code == 1);
    }

    TEST_CASE("config shows sources") {
        cer::testing::TempDir dir;
        const auto r = cer_run(dir, {"config", "--set", "k=5", "--seed", "9"});
        CHECK(r.code == 0);
        CHECK(r.out.find("k = 5 (command line)") != std::string::npos);
        CHECK(r.out.find("seed = 9 (command line)") != std::string::npos);
        CHECK(r.out.find("m = 3 (default)") != std::string::npos);
    }

    TEST_CASE("baseline and stats") {
        cer::testing::TempDir dir;
        auto r = cer_run(dir, {"baseline", "--dataset", "HealthFC"});
        CHECK(r.code == 0);
        CHECK(r.out.find("24.20") != std::string::npos);
        r = cer_run(dir, {"stats", "--corpus", fx("corpus50.jsonl"), "--out", (dir / "h.csv").string(), "--bins", "4"});
        CHECK(r.code == 0);
        const auto csv = cer::io::read_file(dir / "h.csv");
        CHECK(csv.rfind("bin_start,bin_end,count\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    }

    TEST_CASE("twelve-claim pipeline") {
        cer::testing::TempDir dir;
        const auto idx = (dir / "corpus.idx").string();
        const auto pairs = (dir / "pairs.jsonl").string();
        const auto reasoned = (dir / "reasoned.jsonl").string();
        const auto model = (dir / "model.bin").string();
        const auto pred = (dir / "pred.jsonl").string();
        REQUIRE(cer_run(dir, {"index", "build", "--corpus", fx("corpus50.jsonl"), "--out", idx}).code == 0);
        auto r = cer_run(dir, {"retrieve", "--index", idx, "--claim", "coffee and liver cirrhosis", "-k", "3"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("1003#0") != std::string::npos);
        REQUIRE(cer_run(dir, {"retrieve", "--index", idx, "--claims", fx("claims12.jsonl"), "--dataset", "fixture",
                              "--out", pairs})
                    .code == 0);
        REQUIRE(cer_run(dir, {"reason", "--pairs", pairs, "--llm-fixture", fx("llm_mock.json"), "--out", reasoned})
                    .code == 0);
        const auto records = cer::veracity::read_interchange(reasoned);
        CHECK(records.size() == 12);
        REQUIRE(cer_run(dir, {"train", "--train", reasoned, "--val", reasoned, "--out-model", model}).code == 0);
        REQUIRE(cer_run(dir, {"classify", "--in", reasoned, "--mode", "trained", "--model", model, "--out", pred})
                    .code == 0);
        r = cer_run(dir, {"eval", "--pred", pred, "--gold", fx("claims12.jsonl"), "--dataset", "fixture", "--split",
                          "test", "--json"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["total"] == 2);
        CHECK(j["labels"].size() == 3);

        r = cer_run(dir, {"classify", "--in", reasoned, "--mode", "zero-shot", "--out", pred});
        CHECK(r.code == 0);
        for (const auto& rec : cer::veracity::read_interchange(pred)) CHECK(rec.predicted_label == rec.llm_label);
    }
}
