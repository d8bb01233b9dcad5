#include "cer/zero_shot.hpp"

#include <cmath>
#include <cstdlib>

#include "cer/error.hpp"
#include "json.hpp"

namespace cer::veracity {

using nlohmann::json;

ZeroShotResult zero_shot_classify(const VerdictRecord& record, const ZeroShotOptions& options) {
    ZeroShotResult out;
    if (options.mode == ZeroShotMode::llm_passthrough) {
        out.label = record.has(RecordFlag::parse_failed) ? Label::NEI : record.llm_label;
        return out;
    }

    std::string endpoint = options.endpoint;
    if (endpoint.empty()) {
        if (const char* env = std::getenv("CER_ZEROSHOT_ENDPOINT")) endpoint = env;
    }
    if (endpoint.empty()) throw ConfigError("no zero-shot endpoint configured (set CER_ZEROSHOT_ENDPOINT)");
    if (options.candidate_labels.empty()) throw ConfigError("zero-shot classification needs candidate labels");

    json request = {{"claim", record.claim},
                    {"evidence", record.evidence},
                    {"justification", record.justification},
                    {"candidate_labels", json::array()}};
    for (Label l : options.candidate_labels) request["candidate_labels"].push_back(to_string(l));
    const auto outcome = net::post_json(endpoint, request.dump(), {}, options.http);

    auto bad = [&](const std::string& why) {
        return ProviderError(endpoint + ": " + why, outcome.status, false, net::excerpt(outcome.body));
    };
    json body;
    try {
        body = json::parse(outcome.body);
    } catch (const json::parse_error&) {
        throw bad("response is not JSON");
    }
    if (!body.is_object() || !body.contains("labels") || !body.contains("scores") || !body["labels"].is_array() ||
        !body["scores"].is_array() || body["labels"].size() != body["scores"].size() || body["labels"].empty()) {
        throw bad("response needs equally long non-empty \"labels\" and \"scores\" lists");
    }
    std::map<Label, double> scores;
    for (std::size_t i = 0; i < body["labels"].size(); ++i) {
        const auto& name = body["labels"][i];
        const auto& score = body["scores"][i];
        if (!name.is_string() || !score.is_number()) throw bad("labels must be strings and scores numbers");
        auto l = label_from_name(name.get<std::string>());
        if (!l) l = normalize_label(name.get<std::string>());
        if (!l || !contains(options.candidate_labels, *l)) throw bad("unexpected label '" + name.get<std::string>() + "'");
        const double s = score.get<double>();
        if (!std::isfinite(s) || s < 0.0) throw bad("scores must be finite and non-negative");
        scores[*l] = s;
    }
    out.label = argmax_label(scores);
    double total = 0.0;
    for (const auto& [l, s] : scores) total += s;
    if (total > 0.0) {
        std::map<Label, double> probs;
        for (Label l : options.candidate_labels) probs[l] = scores.count(l) ? scores.at(l) / total : 0.0;
        if (argmax_label(probs) == out.label) out.probabilities = std::move(probs);
    }
    return out;
}

}  // namespace cer::veracity
