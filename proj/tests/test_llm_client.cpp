#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "fdkit/llm_client.hpp"

using namespace fdkit;

namespace {

std::string completion_body(const std::string& content) {
    nlohmann::json j;
    j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
    return j.dump();
}

std::string user_content(const httplib::Request& req) {
    auto j = nlohmann::json::parse(req.body);
    return j.at("messages").at(0).at("content").get<std::string>();
}

struct MockEndpoint {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    template <typename Handler>
    void start(Handler handler) {
        server.Post("/v1/chat/completions", handler);
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }

    ~MockEndpoint() {
        server.stop();
        if (thread.joinable()) thread.join();
    }
};

PromptRecord make_record(int i, int label_index = 0) {
    PromptRecord r;
    r.instruction = "predict the operating status";
    r.input = "payload-" + std::to_string(i);
    r.meta.label = Label{LabelScheme::Four, label_index};
    r.output = label_text(r.meta.label);
    r.meta.record_id = "T#" + std::to_string(i);
    r.meta.subset_id = "T";
    r.meta.source_id = "mock";
    return r;
}

InferenceConfig fast_config(const std::string& url) {
    InferenceConfig cfg;
    cfg.endpoint_url = url;
    cfg.model_name = "mock-model";
    cfg.timeout_s = 5.0;
    cfg.retry.max_attempts = 3;
    cfg.retry.initial_backoff_s = 0.02;
    return cfg;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("fdkit_llm_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("single request returns the assistant text verbatim") {
    MockEndpoint mock;
    mock.start([](const httplib::Request&, httplib::Response& res) {
        res.set_content(completion_body("Normal"), "application/json");
    });
    auto cfg = fast_config(mock.url());
    CHECK(infer_one(cfg, make_record(0)) == "Normal");
}

TEST_CASE("the prompt is one user message: instruction, newline, input") {
    MockEndpoint mock;
    std::string seen_content, seen_model;
    std::mutex m;
    mock.start([&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(m);
        auto j = nlohmann::json::parse(req.body);
        seen_model = j.at("model").get<std::string>();
        REQUIRE(j.at("messages").size() == 1);
        CHECK(j.at("messages").at(0).at("role") == "user");
        seen_content = j.at("messages").at(0).at("content").get<std::string>();
        CHECK(j.at("temperature") == 0.0);
        res.set_content(completion_body("Normal"), "application/json");
    });
    auto cfg = fast_config(mock.url());
    auto rec = make_record(3);
    infer_one(cfg, rec);
    CHECK(seen_content == rec.instruction + "\n" + rec.input);
    CHECK(seen_model == "mock-model");
}

TEST_CASE("429 then 200 succeeds after one backoff retry") {
    MockEndpoint mock;
    std::atomic<int> calls{0};
    mock.start([&](const httplib::Request&, httplib::Response& res) {
        if (calls.fetch_add(1) == 0) {
            res.status = 429;
            res.set_content("slow down", "text/plain");
        } else {
            res.set_content(completion_body("Normal"), "application/json");
        }
    });
    auto cfg = fast_config(mock.url());
    CHECK(infer_one(cfg, make_record(0)) == "Normal");
    CHECK(calls.load() == 2);
}

TEST_CASE("a non-retryable status fails immediately") {
    MockEndpoint mock;
    std::atomic<int> calls{0};
    mock.start([&](const httplib::Request&, httplib::Response& res) {
        calls.fetch_add(1);
        res.status = 404;
    });
    auto cfg = fast_config(mock.url());
    CHECK_THROWS_WITH_AS(infer_one(cfg, make_record(0)), doctest::Contains("HttpStatus"), Error);
    CHECK(calls.load() == 1);
}

TEST_CASE("unreachable host is a transport error after all attempts") {
    auto cfg = fast_config("http://127.0.0.1:9");  // discard port, nothing listens
    cfg.timeout_s = 0.5;
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_WITH_AS(infer_one(cfg, make_record(0)), doctest::Contains("Transport"), Error);
    // two backoffs (0.02 + 0.04) must have elapsed
    CHECK(std::chrono::steady_clock::now() - start >= std::chrono::milliseconds(60));
}

TEST_CASE("malformed response body") {
    MockEndpoint mock;
    mock.start([](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"unexpected\":true}", "application/json");
    });
    auto cfg = fast_config(mock.url());
    CHECK_THROWS_WITH_AS(infer_one(cfg, make_record(0)), doctest::Contains("MalformedResponse"),
                         Error);
}

TEST_CASE("batch keeps input order under jittered latency") {
    MockEndpoint mock;
    std::mt19937_64 latency_rng(404);
    std::mutex m;
    mock.start([&](const httplib::Request& req, httplib::Response& res) {
        int ms;
        {
            std::lock_guard<std::mutex> lock(m);
            ms = 1 + static_cast<int>(uniform_below(latency_rng, 12));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        res.set_content(completion_body("echo:" + user_content(req)), "application/json");
    });

    std::vector<PromptRecord> records;
    for (int i = 0; i < 60; ++i) records.push_back(make_record(i));
    auto cfg = fast_config(mock.url());
    cfg.max_concurrency = 8;
    auto results = infer_batch(cfg, records);
    REQUIRE(results.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        REQUIRE(results[i].ok);
        CHECK(results[i].record_id == records[i].meta.record_id);
        CHECK(results[i].text ==
              "echo:" + records[i].instruction + "\n" + records[i].input);
    }
}

TEST_CASE("one failing record does not abort the batch") {
    MockEndpoint mock;
    mock.start([&](const httplib::Request& req, httplib::Response& res) {
        if (user_content(req).find("payload-4") != std::string::npos) {
            res.status = 400;
            return;
        }
        res.set_content(completion_body("Normal"), "application/json");
    });
    std::vector<PromptRecord> records;
    for (int i = 0; i < 10; ++i) records.push_back(make_record(i));
    auto cfg = fast_config(mock.url());
    cfg.max_concurrency = 4;
    auto results = infer_batch(cfg, records);
    int ok = 0, failed = 0;
    for (const auto& r : results) (r.ok ? ok : failed)++;
    CHECK(ok == 9);
    CHECK(failed == 1);
    CHECK(!results[4].ok);
    CHECK(results[4].error_kind == "HttpStatus");
}

TEST_CASE("concurrency 1 is strictly sequential") {
    MockEndpoint mock;
    std::mutex m;
    std::vector<std::pair<std::chrono::steady_clock::time_point,
                          std::chrono::steady_clock::time_point>> windows;
    mock.start([&](const httplib::Request&, httplib::Response& res) {
        const auto start = std::chrono::steady_clock::now();
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        const auto end = std::chrono::steady_clock::now();
        {
            std::lock_guard<std::mutex> lock(m);
            windows.emplace_back(start, end);
        }
        res.set_content(completion_body("Normal"), "application/json");
    });
    std::vector<PromptRecord> records;
    for (int i = 0; i < 6; ++i) records.push_back(make_record(i));
    auto cfg = fast_config(mock.url());
    cfg.max_concurrency = 1;
    infer_batch(cfg, records);
    REQUIRE(windows.size() == 6);
    for (std::size_t i = 1; i < windows.size(); ++i)
        CHECK(windows[i].first >= windows[i - 1].second);  // no overlap
}

TEST_CASE("ground-truth mock scores accuracy 1.0") {
    std::vector<PromptRecord> records;
    for (int i = 0; i < 20; ++i) records.push_back(make_record(i, i % 4));
    MockEndpoint mock;
    mock.start([&](const httplib::Request& req, httplib::Response& res) {
        const std::string content = user_content(req);
        for (const auto& r : records) {
            const std::string& input = r.input;
            if (content.size() > input.size() &&
                content.compare(content.size() - input.size(), input.size(), input) == 0) {
                res.set_content(completion_body(r.output), "application/json");
                return;
            }
        }
        res.status = 500;
    });
    auto cfg = fast_config(mock.url());
    cfg.max_concurrency = 4;
    auto eval = evaluate_endpoint(cfg, records, LabelScheme::Four);
    CHECK(eval.scored.report.accuracy == 1.0);
    CHECK(eval.scored.report.macro_f1 == 1.0);
}

TEST_CASE("constant-answer mock on balanced classes scores 1/k") {
    std::vector<PromptRecord> records;
    for (int i = 0; i < 40; ++i) records.push_back(make_record(i, i % 4));
    MockEndpoint mock;
    mock.start([](const httplib::Request&, httplib::Response& res) {
        res.set_content(completion_body("Normal"), "application/json");
    });
    auto cfg = fast_config(mock.url());
    auto eval = evaluate_endpoint(cfg, records, LabelScheme::Four);
    CHECK(eval.scored.report.accuracy == 0.25);
}

TEST_CASE("deterministic 10% corruption scores exactly 0.9") {
    std::vector<PromptRecord> records;
    for (int i = 0; i < 40; ++i) records.push_back(make_record(i, i % 4));
    MockEndpoint mock;
    mock.start([&](const httplib::Request& req, httplib::Response& res) {
        const std::string content = user_content(req);
        for (std::size_t i = 0; i < records.size(); ++i) {
            const std::string& input = records[i].input;  // content ends with "\n" + input
            if (content.size() > input.size() &&
                content.compare(content.size() - input.size(), input.size(), input) == 0) {
                if (i % 10 == 3) res.set_content(completion_body("gibberish"), "application/json");
                else res.set_content(completion_body(records[i].output), "application/json");
                return;
            }
        }
        res.status = 500;
    });
    auto cfg = fast_config(mock.url());
    cfg.max_concurrency = 3;
    auto eval = evaluate_endpoint(cfg, records, LabelScheme::Four);
    CHECK(eval.scored.report.accuracy == 0.9);
    CHECK(eval.scored.report.unmapped_count == 4);
}

TEST_CASE("responses are cached by (model, record, prompt hash)") {
    TempDir dir;
    std::atomic<int> calls{0};
    std::vector<PromptRecord> records;
    for (int i = 0; i < 5; ++i) records.push_back(make_record(i));
    auto cfg = fast_config("");
    {
        MockEndpoint mock;
        mock.start([&](const httplib::Request&, httplib::Response& res) {
            calls.fetch_add(1);
            res.set_content(completion_body("Normal"), "application/json");
        });
        cfg = fast_config(mock.url());
        cfg.cache_dir = dir.file("cache");
        auto first = infer_batch(cfg, records);
        CHECK(calls.load() == 5);
        for (const auto& r : first) CHECK(r.ok);
    }
    // server is gone; cached answers must still satisfy the batch
    auto second = infer_batch(cfg, records);
    CHECK(calls.load() == 5);
    for (const auto& r : second) {
        CHECK(r.ok);
        CHECK(r.text == "Normal");
    }
}

TEST_CASE("the api key is sent as a bearer header and never persisted") {
    const std::string secret = "sk-fdkit-test-secret";
    setenv(kApiKeyEnvVar, secret.c_str(), 1);
    std::string seen_auth;
    std::mutex m;
    MockEndpoint mock;
    mock.start([&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(m);
        seen_auth = req.get_header_value("Authorization");
        res.set_content(completion_body("Normal"), "application/json");
    });
    std::vector<PromptRecord> records = {make_record(0)};
    auto cfg = fast_config(mock.url());
    TempDir dir;
    evaluate_endpoint(cfg, records, LabelScheme::Four, dir.file("out"));
    unsetenv(kApiKeyEnvVar);

    CHECK(seen_auth == "Bearer " + secret);
    for (const char* name : {"responses.jsonl", "report.json", "confusion.csv"}) {
        std::ifstream in(dir.file("out") + "/" + std::string(name), std::ios::binary);
        REQUIRE(in.good());
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(body.find(secret) == std::string::npos);
    }
}
