#pragma once

// Chat-completion endpoint evaluation. Wire protocol is the de-facto
// OpenAI-compatible shape: POST {base}/v1/chat/completions with a messages
// array; the prediction is choices[0].message.content. The prompt is sent as
// one user message, instruction + "\n" + input.
//
// The API key comes from the FDLLM_API_KEY environment variable only and is
// never written to logs, reports or caches.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "fdkit/error.hpp"
#include "fdkit/evalkit.hpp"
#include "fdkit/promptgen.hpp"
#include "fdkit/util.hpp"

namespace fdkit {

constexpr const char* kApiKeyEnvVar = "FDLLM_API_KEY";

struct RetryPolicy {
    int max_attempts = 3;
    double initial_backoff_s = 0.25;
    double multiplier = 2.0;
};

struct InferenceConfig {
    std::string endpoint_url;   // e.g. "http://127.0.0.1:8000"
    std::string model_name;
    double temperature = 0.0;
    int max_tokens = 32;
    int max_concurrency = 4;
    double timeout_s = 30.0;
    RetryPolicy retry;
    std::string cache_dir;      // empty disables the response cache

    void validate() const {
        if (endpoint_url.empty()) fail("InvalidParameter", "endpoint_url is required");
        if (temperature < 0.0) fail("InvalidParameter", "temperature must be >= 0");
        if (max_tokens < 1) fail("InvalidParameter", "max_tokens must be positive");
        if (max_concurrency < 1) fail("InvalidParameter", "max_concurrency must be >= 1");
        if (retry.max_attempts < 1) fail("InvalidParameter", "retry.max_attempts must be >= 1");
    }
};

namespace detail {

struct EndpointParts {
    std::string base;        // scheme://host:port
    std::string path_prefix; // optional prefix before /v1/chat/completions
};

inline EndpointParts split_endpoint(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        fail("InvalidParameter", "endpoint_url must include a scheme, e.g. http://host:port");
    const std::size_t slash = url.find('/', scheme + 3);
    EndpointParts parts;
    if (slash == std::string::npos) {
        parts.base = url;
    } else {
        parts.base = url.substr(0, slash);
        parts.path_prefix = url.substr(slash);
        while (!parts.path_prefix.empty() && parts.path_prefix.back() == '/')
            parts.path_prefix.pop_back();
    }
    return parts;
}

inline bool retryable_status(int status) { return status == 429 || status >= 500; }

inline std::string cache_key(const InferenceConfig& cfg, const PromptRecord& record) {
    const std::uint64_t prompt_hash = fnv1a64(record.instruction + "\n" + record.input);
    std::string id = record.meta.record_id;
    for (char& c : id)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    std::string model = cfg.model_name;
    for (char& c : model)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return model + "_" + id + "_" + hex64(prompt_hash);
}

inline std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

inline std::optional<std::string> cache_get(const InferenceConfig& cfg, const PromptRecord& rec) {
    if (cfg.cache_dir.empty()) return std::nullopt;
    std::lock_guard<std::mutex> lock(cache_mutex());
    const std::string path = (std::filesystem::path(cfg.cache_dir) / (cache_key(cfg, rec) + ".txt")).string();
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline void cache_put(const InferenceConfig& cfg, const PromptRecord& rec, const std::string& text) {
    if (cfg.cache_dir.empty()) return;
    std::lock_guard<std::mutex> lock(cache_mutex());
    std::filesystem::create_directories(cfg.cache_dir);
    const std::string path = (std::filesystem::path(cfg.cache_dir) / (cache_key(cfg, rec) + ".txt")).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

}  // namespace detail

// One request, with retry/backoff on transport failures and retryable
// statuses (429, 5xx). Returns the assistant text verbatim.
inline std::string infer_one(const InferenceConfig& cfg, const PromptRecord& record) {
    cfg.validate();
    if (auto cached = detail::cache_get(cfg, record)) return *cached;

    const detail::EndpointParts parts = detail::split_endpoint(cfg.endpoint_url);

    nlohmann::json body;
    body["model"] = cfg.model_name;
    body["messages"] = nlohmann::json::array(
        {{{"role", "user"}, {"content", record.instruction + "\n" + record.input}}});
    body["temperature"] = cfg.temperature;
    body["max_tokens"] = cfg.max_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv(kApiKeyEnvVar); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    int last_status = 0;
    double backoff = cfg.retry.initial_backoff_s;
    for (int attempt = 1; attempt <= cfg.retry.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= cfg.retry.multiplier;
        }
        httplib::Client client(parts.base);
        client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_s));
        client.set_write_timeout(std::chrono::duration<double>(cfg.timeout_s));

        httplib::Result res = client.Post(parts.path_prefix + "/v1/chat/completions", headers,
                                          payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            last_status = 0;
            continue;
        }
        if (res->status != 200) {
            last_status = res->status;
            last_error = "http status " + std::to_string(res->status);
            if (!detail::retryable_status(res->status))
                fail("HttpStatus", last_error + " from " + parts.base);
            continue;
        }
        try {
            nlohmann::json j = nlohmann::json::parse(res->body);
            std::string text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            detail::cache_put(cfg, record, text);
            return text;
        } catch (const nlohmann::json::exception& e) {
            fail("MalformedResponse", std::string("cannot parse completion response: ") + e.what());
        }
    }
    if (last_status != 0)
        fail("HttpStatus", last_error + " after " + std::to_string(cfg.retry.max_attempts) + " attempts");
    fail("Transport", last_error + " after " + std::to_string(cfg.retry.max_attempts) + " attempts");
}

struct BatchItem {
    std::string record_id;
    bool ok = false;
    std::string text;           // set when ok
    std::string error_kind;     // set when !ok
    std::string error_message;
};

// Bounded-parallel batch: at most max_concurrency requests in flight; the
// result order matches the input order regardless of completion order, and
// per-record failures never abort the batch.
inline std::vector<BatchItem> infer_batch(const InferenceConfig& cfg,
                                          const std::vector<PromptRecord>& records) {
    cfg.validate();
    if (records.empty()) fail("EmptyInput", "infer_batch of no records");

    std::vector<BatchItem> results(records.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= records.size()) return;
            BatchItem& item = results[i];
            item.record_id = records[i].meta.record_id;
            try {
                item.text = infer_one(cfg, records[i]);
                item.ok = true;
            } catch (const Error& e) {
                item.error_kind = e.kind();
                item.error_message = e.what();
            } catch (const std::exception& e) {
                item.error_kind = "Transport";
                item.error_message = e.what();
            }
        }
    };

    const std::size_t n_threads =
        std::min(static_cast<std::size_t>(cfg.max_concurrency), records.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return results;
}

struct EndpointEvaluation {
    ScoredEval scored;
    std::vector<BatchItem> responses;
};

// infer_batch -> map_prediction -> score. Failed requests score as Unmapped.
// When out_dir is given, raw responses and the report are persisted there.
inline EndpointEvaluation evaluate_endpoint(const InferenceConfig& cfg,
                                            const std::vector<PromptRecord>& eval_set,
                                            LabelScheme scheme,
                                            const std::string& out_dir = "",
                                            const SynonymTable& synonyms = default_synonyms()) {
    if (eval_set.empty()) fail("EmptyInput", "evaluate_endpoint of an empty eval set");

    EndpointEvaluation out;
    out.responses = infer_batch(cfg, eval_set);

    std::vector<std::pair<Label, std::optional<Label>>> pairs;
    pairs.reserve(eval_set.size());
    for (std::size_t i = 0; i < eval_set.size(); ++i) {
        std::optional<Label> mapped;
        if (out.responses[i].ok) mapped = map_prediction(out.responses[i].text, scheme, synonyms);
        pairs.emplace_back(eval_set[i].meta.label, mapped);
    }
    out.scored = score(pairs);

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream raw((std::filesystem::path(out_dir) / "responses.jsonl").string(),
                          std::ios::binary | std::ios::trunc);
        for (const BatchItem& item : out.responses) {
            nlohmann::json j;
            j["record_id"] = item.record_id;
            if (item.ok) j["text"] = item.text;
            else {
                j["error_kind"] = item.error_kind;
                j["error_message"] = item.error_message;
            }
            raw << j.dump() << "\n";
        }
        std::ofstream rep((std::filesystem::path(out_dir) / "report.json").string(),
                          std::ios::binary | std::ios::trunc);
        rep << report_to_json(out.scored).dump(2) << "\n";
        std::ofstream cm((std::filesystem::path(out_dir) / "confusion.csv").string(),
                         std::ios::binary | std::ios::trunc);
        cm << confusion_to_csv(out.scored.confusion);
    }
    return out;
}

}  // namespace fdkit
