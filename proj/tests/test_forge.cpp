#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "geosolve/forge.hpp"

using namespace geosolve;
namespace fs = std::filesystem;

namespace {

const MathContext& GV = MathContext::geomverse();

std::string fixture(const char* name) {
    return std::string(GEOSOLVE_DATA_DIR) + "/fixtures/" + name;
}

std::string shots_path() { return std::string(GEOSOLVE_DATA_DIR) + "/shots/default_shots.json"; }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string sample_source(int i) {
    return read_file(std::string(GEOSOLVE_DATA_DIR) + "/samples/sample" + std::to_string(i) +
                     ".sol");
}

// Scripted teacher: answers each sample problem with its known-good program
// (wrapped the way a chatty model would), plus assorted rejects.
class MockTeacher : public ChatCompletionClient {
  public:
    std::vector<std::string> complete(const ChatRequest& request) override {
        ++calls;
        last_request = request;
        const std::string& prompt = request.messages.back().content;
        // Only the target question decides; the exemplar shots higher up in
        // the prompt mention the same problems.
        const std::string target = prompt.substr(prompt.rfind("Now solve this problem."));
        std::string good;
        if (target.find("red semi-circle is 56.52") != std::string::npos) good = sample_source(1);
        else if (target.find("ADEC square is 81") != std::string::npos) good = sample_source(2);
        else if (target.find("AEFB rectangle is 21") != std::string::npos) good = sample_source(3);
        else if (target.find("ABEFG shape is 66") != std::string::npos) good = sample_source(4);
        else return {"no idea"};

        std::vector<std::string> out;
        out.push_back("Here is the solution:\n```python\n" + good + "```\nHope that helps.");
        out.push_back(good);                                     // exact duplicate after extraction
        out.push_back("def solution():\n    return 1 / 0\n");    // rejected: ZeroDivision
        out.push_back("def broken(:");                           // rejected: SyntaxError
        out.push_back("def solution():\n    return 1\n");        // rejected: wrong output
        out.resize(static_cast<std::size_t>(request.n), "def broken(:");
        return out;
    }

    int calls = 0;
    ChatRequest last_request;
};

}  // namespace

TEST_CASE("library listing renders one line per function") {
    std::string listing = render_library_listing(FunctionRegistry::bundled());
    std::size_t lines = 0;
    for (char c : listing) lines += c == '\n';
    CHECK(lines == 47);
    CHECK(listing.find("1. radius_of_sector_given_arc_length(arc_length, angle)") == 0);
    CHECK(listing.find("47. solve_for_x(eq_1, eq_2)") != std::string::npos);
}

TEST_CASE("build_prompt layout") {
    auto shots = load_shots(shots_path());
    REQUIRE(shots.size() == 6);
    auto dataset = load_dataset(fixture("sample_problems.jsonl"));

    std::string with_tikz = build_prompt(dataset[0], shots, FunctionRegistry::bundled());
    std::size_t examples = 0;
    for (std::size_t pos = with_tikz.find("Example "); pos != std::string::npos;
         pos = with_tikz.find("Example ", pos + 1))
        ++examples;
    CHECK(examples == 6);
    // the target's tikz is included after the final question
    CHECK(with_tikz.rfind("Figure (TikZ):") > with_tikz.rfind("Now solve this problem."));
    CHECK(with_tikz.find(dataset[0].question) != std::string::npos);

    std::string no_tikz = build_prompt(dataset[2], shots, FunctionRegistry::bundled());
    CHECK(no_tikz.rfind("Figure (TikZ):") < no_tikz.rfind("Now solve this problem."));

    // deterministic
    CHECK(with_tikz == build_prompt(dataset[0], shots, FunctionRegistry::bundled()));

    CHECK_THROWS_AS(build_prompt(dataset[0], {}, FunctionRegistry::bundled()),
                    std::invalid_argument);
}

TEST_CASE("extract_program") {
    std::string fenced = "Sure!\n```python\ndef solution():\n    return 1\n```\ntrailing";
    CHECK(extract_program(fenced) == "def solution():\n    return 1\n");
    std::string bare = "def solution():\n    x = 2\n    return x\n";
    CHECK(extract_program(bare) == bare);
    std::string chatty = "def solution():\n    return 3\nThat is the answer.";
    CHECK(extract_program(chatty) == "def solution():\n    return 3\n");
    CHECK(extract_program("no code at all") == "no code at all");
}

TEST_CASE("forge keeps exactly the validated survivors") {
    auto dataset = load_dataset(fixture("sample_problems.jsonl"));
    auto shots = load_shots(shots_path());
    MockTeacher teacher;
    ForgeConfig config;
    config.samples_per_problem = 5;
    config.max_in_flight = 1;

    ForgeResult result = forge(dataset, shots, FunctionRegistry::bundled(), GV, teacher, config);
    REQUIRE(result.records.size() == 4);
    CHECK(result.stats.problems == 4);
    CHECK(result.stats.samples == 20);
    CHECK(result.stats.kept == 4);
    CHECK(result.stats.duplicates == 4);
    CHECK(result.stats.wrong_output == 4);
    CHECK(result.stats.rejected_by_class.at("ZeroDivision") == 4);
    CHECK(result.stats.rejected_by_class.at("SyntaxError") == 4);
    CHECK(result.stats.temperature == 0.7);

    const double expected[] = {25.94, 76.5, 16.97, 64.0};
    for (int i = 0; i < 4; ++i) {
        CHECK(result.records[i].id == dataset[i].id);
        CHECK(result.records[i].validated_answer == doctest::Approx(expected[i]).epsilon(1e-9));
        CHECK(result.records[i].code.find("def solution():") == 0);
    }

    // the request carried the wire-contract fields
    CHECK(teacher.last_request.n == 5);
    CHECK(teacher.last_request.model == "teacher");
    CHECK(teacher.last_request.messages.size() == 1);

    // shots-count mismatch is rejected up front
    ForgeConfig strict;
    strict.expected_shots = 3;
    CHECK_THROWS_AS(forge(dataset, shots, FunctionRegistry::bundled(), GV, teacher, strict),
                    std::invalid_argument);
}

TEST_CASE("forge output is byte-stable and reloads cleanly") {
    auto dataset = load_dataset(fixture("sample_problems.jsonl"));
    auto shots = load_shots(shots_path());
    ForgeConfig config;
    config.max_in_flight = 3;  // concurrency must not disturb output order

    fs::path dir_a = fs::temp_directory_path() / "geosolve_forge_a";
    fs::path dir_b = fs::temp_directory_path() / "geosolve_forge_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    MockTeacher teacher;
    forge_to_dir(dataset, shots, FunctionRegistry::bundled(), GV, teacher, config,
                 dir_a.string(), false);
    forge_to_dir(dataset, shots, FunctionRegistry::bundled(), GV, teacher, config,
                 dir_b.string(), false);

    CHECK(read_file((dir_a / "records.jsonl").string()) ==
          read_file((dir_b / "records.jsonl").string()));
    CHECK(read_file((dir_a / "stats.json").string()) ==
          read_file((dir_b / "stats.json").string()));

    auto loaded = load_tuning_records((dir_a / "records.jsonl").string(),
                                      FunctionRegistry::bundled(), GV);
    CHECK(loaded.size() == 4);

    // resume: nothing new is appended
    std::string before = read_file((dir_a / "records.jsonl").string());
    ForgeStats resumed = forge_to_dir(dataset, shots, FunctionRegistry::bundled(), GV, teacher,
                                      config, dir_a.string(), true);
    CHECK(resumed.skipped == 4);
    CHECK(resumed.kept == 0);
    CHECK(read_file((dir_a / "records.jsonl").string()) == before);

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("a corrupted tuning record fails re-validation on load") {
    fs::path path = fs::temp_directory_path() / "geosolve_bad_records.jsonl";
    {
        std::ofstream out(path);
        out << R"({"id":"x","question":"q","code":"def solution():\n    return 5\n","validated_answer":99.0})"
            << "\n";
    }
    CHECK_THROWS_AS(load_tuning_records(path.string(), FunctionRegistry::bundled(), GV),
                    LoadError);
    fs::remove(path);
}

TEST_CASE("broken-only client yields zero records and a syntax histogram") {
    auto dataset = load_dataset(fixture("sample_problems.jsonl"));
    auto shots = load_shots(shots_path());
    struct BrokenClient : ChatCompletionClient {
        std::vector<std::string> complete(const ChatRequest& req) override {
            return std::vector<std::string>(static_cast<std::size_t>(req.n), "def broken(:");
        }
    } client;
    ForgeConfig config;
    ForgeResult result = forge(dataset, shots, FunctionRegistry::bundled(), GV, client, config);
    CHECK(result.records.empty());
    CHECK(result.stats.kept == 0);
    CHECK(result.stats.rejected_by_class.at("SyntaxError") == 20);
}

TEST_CASE("transport failures are recorded, never abort the batch") {
    auto dataset = load_dataset(fixture("sample_problems.jsonl"));
    auto shots = load_shots(shots_path());
    struct FlakyClient : ChatCompletionClient {
        std::atomic<int> calls{0};
        std::vector<std::string> complete(const ChatRequest&) override {
            if (calls.fetch_add(1) % 2 == 0) throw ChatTransportError("connection reset");
            return {sample_source(1)};
        }
    } client;
    ForgeConfig config;
    config.samples_per_problem = 1;
    config.max_in_flight = 1;
    ForgeResult result = forge(dataset, shots, FunctionRegistry::bundled(), GV, client, config);
    CHECK(result.stats.transport_failures == 2);
    CHECK(result.stats.problems == 4);
}

TEST_CASE("http chat client speaks the wire contract and retries") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::string captured_body, captured_auth;
    server.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
        int n = hits.fetch_add(1);
        if (n == 0) {  // first attempt fails, the retry succeeds
            res.status = 500;
            return;
        }
        captured_body = req.body;
        if (req.has_header("Authorization")) captured_auth = req.get_header_value("Authorization");
        nlohmann::json doc = nlohmann::json::parse(req.body);
        nlohmann::json choices = nlohmann::json::array();
        for (int i = 0; i < doc.at("n").get<int>(); ++i)
            choices.push_back({{"text", "def solution():\n    return " + std::to_string(i) + "\n"}});
        res.set_content(nlohmann::json{{"choices", choices}}.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("GEO_LLM_API_KEY", "secret-llm-key", 1);
    HttpChatClient client("http://127.0.0.1:" + std::to_string(port) + "/v1/complete",
                          RetryPolicy{2, 10});
    ChatRequest request;
    request.model = "teacher";
    request.n = 3;
    request.temperature = 0.25;
    request.messages = {{"user", "solve it"}};
    auto texts = client.complete(request);
    REQUIRE(texts.size() == 3);
    CHECK(texts[1] == "def solution():\n    return 1\n");
    CHECK(captured_auth == "Bearer secret-llm-key");

    nlohmann::json sent = nlohmann::json::parse(captured_body);
    CHECK(sent.at("model") == "teacher");
    CHECK(sent.at("n") == 3);
    CHECK(sent.at("temperature") == 0.25);
    CHECK(sent.at("messages")[0].at("role") == "user");
    CHECK(sent.at("messages")[0].at("content") == "solve it");

    server.stop();
    server_thread.join();
    unsetenv("GEO_LLM_API_KEY");

    HttpChatClient dead("http://127.0.0.1:1/v1/complete", RetryPolicy{0, 1}, 1);
    CHECK_THROWS_AS(dead.complete(request), ChatTransportError);
}
