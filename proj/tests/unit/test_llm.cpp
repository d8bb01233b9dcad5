#include <atomic>
#include <fstream>

#include "cer/binary_io.hpp"
#include "cer/error.hpp"
#include "cer/hashing.hpp"
#include "cer/http_client.hpp"
#include "cer/llm.hpp"
#include "doctest.h"
#include "json.hpp"
#include "stub_server.hpp"
#include "support.hpp"

using namespace cer;
using namespace cer::reasoning;
using nlohmann::json;

namespace {

net::HttpOptions recording(std::vector<long long>& delays) {
    net::HttpOptions o;
    o.sleeper = [&delays](std::chrono::milliseconds d) { delays.push_back(d.count()); };
    return o;
}

}  // namespace

TEST_SUITE("llm") {
    TEST_CASE("mock provider: hash, rules, default") {
        const auto prompt = build_prompt("Claim A", {"evidence one"});
        const std::string rendered = prompt.render();
        MockLlmProvider mock;
        mock.set_response(sha256_hex(rendered), "Label: Yes. canned");
        CHECK(mock.complete(rendered) == "Label: Yes. canned");
        CHECK_THROWS_AS((void)mock.complete("other"), ProviderError);
        mock.add_rule({{"other"}, {"never"}, "Label: No. rule"});
        CHECK(mock.complete("the other prompt") == "Label: No. rule");
        CHECK_THROWS_AS((void)mock.complete("other never"), ProviderError);
        mock.set_default("Label: NEI. default");
        CHECK(mock.complete("anything") == "Label: NEI. default");
        CHECK(mock.calls() == 5);
    }

    TEST_CASE("mock provider: no match is a 404") {
        MockLlmProvider mock;
        try {
            (void)mock.complete("x");
            FAIL("expected a provider error");
        } catch (const ProviderError& e) {
            CHECK(e.status() == 404);
            CHECK_FALSE(e.retryable());
        }
    }

    TEST_CASE("mock fixture files") {
        const auto flat = MockLlmProvider::parse(R"({")" + sha256_hex("p") + R"(": "Label: No. x"})");
        CHECK(flat->complete("p") == "Label: No. x");
        const auto rules = MockLlmProvider::parse(
            R"({"rules": [{"contains": ["a", "b"], "response": "both"}, {"contains": "a", "response": "one"}]})");
        CHECK(rules->complete("b a") == "both");
        CHECK(rules->complete("a") == "one");
        CHECK_THROWS_AS(MockLlmProvider::parse("[1, 2]"), FormatError);
        CHECK_THROWS_AS(MockLlmProvider::parse(R"({"rules": 3})"), FormatError);
        const auto shipped = MockLlmProvider::load(cer::testing::fixture("llm_mock.json"));
        CHECK(shipped->complete("zzz").rfind("Label: Not enough information", 0) == 0);
    }

    TEST_CASE("cache: second identical call makes no provider call") {
        cer::testing::TempDir dir;
        const ResponseCache cache(dir / "cache");
        MockLlmProvider mock;
        mock.set_default("Label: Yes. cached");
        const auto prompt = build_prompt("Claim", {"e"});
        CHECK(invoke_llm(prompt, mock, &cache) == "Label: Yes. cached");
        CHECK(mock.calls() == 1);
        CHECK(invoke_llm(prompt, mock, &cache) == "Label: Yes. cached");
        CHECK(mock.calls() == 1);

        const std::string key = ResponseCache::key("mock", prompt.render());
        CHECK(key == sha256_hex(std::string("mock") + '\0' + prompt.render()));
        const auto path = cache.entry_path(key);
        CHECK(path.parent_path().filename() == key.substr(0, 2));
        const json entry = json::parse(io::read_file(path));
        CHECK(entry["key"] == key);
        CHECK(entry["provider"] == "mock");
        CHECK(entry["text"] == "Label: Yes. cached");

        { std::ofstream(path) << "{ truncated"; }
        CHECK_FALSE(cache.get(key).has_value());
        CHECK(invoke_llm(prompt, mock, &cache) == "Label: Yes. cached");
        CHECK(mock.calls() == 2);
        CHECK(cache.get(key) == std::optional<std::string>("Label: Yes. cached"));

        MockLlmProvider other;
        other.set_default("different");
        CHECK(ResponseCache::key("mock", "p") != ResponseCache::key("http:x:t0:m512", "p"));
    }

    TEST_CASE("retry policy delays") {
        net::RetryPolicy p;
        CHECK(p.delay_after(1).count() == 1000);
        CHECK(p.delay_after(2).count() == 2000);
        CHECK(p.delay_after(3).count() == 4000);
        CHECK(net::is_retryable_status(429));
        CHECK(net::is_retryable_status(503));
        CHECK(net::is_retryable_status(0));
        CHECK_FALSE(net::is_retryable_status(400));
        CHECK_FALSE(net::is_retryable_status(404));
    }

    TEST_CASE("HTTP provider: 429 twice then 200") {
        cer::testing::StubServer server;
        std::atomic<int> calls{0};
        std::string auth;
        json last_request;
        server.post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
            if (++calls <= 2) {
                res.status = 429;
                res.set_content("{\"error\":\"slow down\"}", "application/json");
                return;
            }
            auth = req.get_header_value("Authorization");
            last_request = json::parse(req.body);
            res.set_content(R"({"text": "Label: Yes. The evidence supports it."})", "application/json");
        });
        server.start();

        std::vector<long long> delays;
        const auto outcome = net::post_json(server.url("/v1/complete"), "{}", {}, recording(delays));
        CHECK(outcome.attempts == 3);
        CHECK(outcome.status == 200);
        CHECK(delays == std::vector<long long>{1000, 2000});

        calls = 0;
        delays.clear();
        HttpLlmProvider::Options o;
        o.endpoint = server.url("/v1/complete");
        o.api_key = "secret";
        o.http = recording(delays);
        const HttpLlmProvider llm(o);
        CHECK(llm.complete("PROMPT") == "Label: Yes. The evidence supports it.");
        CHECK(calls == 3);
        CHECK(auth == "Bearer secret");
        CHECK(last_request["prompt"] == "PROMPT");
        CHECK(last_request["temperature"] == 0.0);
        CHECK(last_request["max_tokens"] == 512);
        CHECK(llm.tag().find(o.endpoint) != std::string::npos);
    }

    TEST_CASE("HTTP provider: persistent failures") {
        cer::testing::StubServer server;
        server.post("/busy", [](const httplib::Request&, httplib::Response& res) {
            res.status = 503;
            res.set_content("overloaded", "text/plain");
        });
        server.post("/bad", [](const httplib::Request&, httplib::Response& res) {
            res.status = 400;
            res.set_content("{\"error\":\"prompt too long\"}", "application/json");
        });
        server.post("/garbage", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("not json", "text/plain");
        });
        server.start();

        std::vector<long long> delays;
        try {
            (void)net::post_json(server.url("/busy"), "{}", {}, recording(delays));
            FAIL("expected a provider error");
        } catch (const ProviderError& e) {
            CHECK(e.status() == 503);
            CHECK(e.retryable());
            CHECK(e.body_excerpt() == "overloaded");
        }
        CHECK(delays == std::vector<long long>{1000, 2000, 4000});

        delays.clear();
        const int before = server.hits();
        try {
            (void)net::post_json(server.url("/bad"), "{}", {}, recording(delays));
            FAIL("expected a provider error");
        } catch (const ProviderError& e) {
            CHECK(e.status() == 400);
            CHECK_FALSE(e.retryable());
            CHECK(e.body_excerpt().find("prompt too long") != std::string::npos);
        }
        CHECK(server.hits() - before == 1);
        CHECK(delays.empty());

        HttpLlmProvider::Options o;
        o.endpoint = server.url("/garbage");
        o.http = recording(delays);
        CHECK_THROWS_AS((void)HttpLlmProvider(o).complete("p"), ProviderError);
        CHECK(net::excerpt(std::string(500, 'a')).size() <= 203);
    }

    TEST_CASE("connection refused is retried then reported") {
        std::vector<long long> delays;
        auto o = recording(delays);
        o.retry.max_retries = 1;
        o.timeout = std::chrono::seconds(2);
        try {
            (void)net::post_json("http://127.0.0.1:1/none", "{}", {}, o);
            FAIL("expected a provider error");
        } catch (const ProviderError& e) {
            CHECK(e.status() == 0);
        }
        CHECK(delays.size() == 1);
    }

    TEST_CASE("reasoning output parsing") {
        auto r = parse_reasoning("Label: Yes\nFolate deficiency has been shown to increase blood levels of homocysteine.");
        CHECK(r.llm_label == Label::Supported);
        CHECK(r.parse_ok);
        CHECK(r.justification == "Folate deficiency has been shown to increase blood levels of homocysteine.");

        r = parse_reasoning("label: nei\nThe context provided does not contain specific information.");
        CHECK(r.llm_label == Label::NEI);
        CHECK(r.parse_ok);
        CHECK(r.justification == "The context provided does not contain specific information.");

        r = parse_reasoning("I cannot comply.");
        CHECK(r.llm_label == Label::NEI);
        CHECK_FALSE(r.parse_ok);
        CHECK(r.justification == "I cannot comply.");
        CHECK(r.raw == "I cannot comply.");

        CHECK(parse_reasoning("**Label:** No. Trials found no effect.").llm_label == Label::Refuted);
        CHECK(parse_reasoning("**Label:** No. Trials found no effect.").justification == "Trials found no effect.");
        CHECK(parse_reasoning("  ## LABEL : Not enough information - unclear").llm_label == Label::NEI);
        CHECK(parse_reasoning("  ## LABEL : Not enough information - unclear").justification == "unclear");
        CHECK_FALSE(parse_reasoning("Label: Yesterday it rained").parse_ok);
        CHECK_FALSE(parse_reasoning("Labels: Yes").parse_ok);
        CHECK_FALSE(parse_reasoning("").parse_ok);
        CHECK(parse_reasoning("Label: No").justification.empty());
    }
}
