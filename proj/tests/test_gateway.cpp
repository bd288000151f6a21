#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "evocorps/error.hpp"
#include "evocorps/gateway.hpp"

using namespace evocorps;
using namespace evocorps::gateway;
using nlohmann::json;

namespace {

GenerationRequest req(RoleTag role, std::string user, double temp = 0.7) {
  GenerationRequest r;
  r.role = role;
  r.user_text = std::move(user);
  r.temperature = temp;
  return r;
}

// Fails any request whose text is "boom".
class FlakyBackend final : public Backend {
 public:
  GenerationResponse complete(const GenerationRequest& r) override {
    if (r.user_text == "boom") throw BackendError("amplifier", "synthetic failure");
    return {"echo:" + r.user_text, "stop"};
  }
};

std::string chat_reply(const std::string& content) {
  return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}},
                            {"finish_reason", "stop"}}}}}
      .dump();
}

// Local chat-completions stand-in. The handler gets the 1-based attempt number.
class FakeServer {
 public:
  explicit FakeServer(std::function<void(int, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions",
                 [this, handler](const httplib::Request& rq, httplib::Response& res) {
                   last_body = rq.body;
                   handler(++hits, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  BackendConfig config(int max_retries = 3, int timeout_ms = 2000) const {
    BackendConfig c;
    c.kind = BackendKind::kRemote;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.max_retries = max_retries;
    c.backoff_base_ms = 1;
    c.timeout_ms = timeout_ms;
    c.auth_env = "EVOCORPS_TEST_NO_SUCH_KEY";
    return c;
  }

  std::atomic<int> hits{0};
  std::string last_body;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate(req(RoleTag::kGraderSentiment, "x", 0.7)), Error);
  CHECK_NOTHROW(validate(req(RoleTag::kGraderSentiment, "x", 0.0)));
  CHECK_NOTHROW(validate(req(RoleTag::kAmplifier, "x", 0.7)));
  auto r = req(RoleTag::kAmplifier, "x");
  r.max_tokens = 0;
  CHECK_THROWS_AS(validate(r), Error);
  CHECK(is_grader(RoleTag::kGraderEvidence));
  CHECK_FALSE(is_grader(RoleTag::kFactcheck));
  CHECK(parse_role_tag(to_string(RoleTag::kUscEvaluate)) == RoleTag::kUscEvaluate);

  Gateway gw(std::make_shared<ScriptedBackend>());
  CHECK_THROWS_AS(gw.complete(req(RoleTag::kGraderAqs, "x", 0.7)), Error);
}

TEST_CASE("scripted backend is deterministic") {
  Gateway gw(std::make_shared<ScriptedBackend>());
  const auto a = gw.complete(req(RoleTag::kAmplifier, "support the plan"));
  const auto b = gw.complete(req(RoleTag::kAmplifier, "support the plan"));
  CHECK(a.text == b.text);
  CHECK_FALSE(a.text.empty());
  CHECK(gw.request_count() == 2);

  std::vector<GenerationRequest> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(req(RoleTag::kAmplifier, "arg " + std::to_string(i)));
  const auto out = gw.complete_batch(batch);
  REQUIRE(out.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    REQUIRE(out[i].ok());
    CHECK(out[i].response->text == gw.complete(batch[i]).text);
  }
}

TEST_CASE("batch keeps order and isolates failures") {
  Gateway gw(std::make_shared<FlakyBackend>());
  std::vector<GenerationRequest> batch;
  for (int i = 1; i <= 8; ++i) batch.push_back(req(RoleTag::kAmplifier, i == 3 ? "boom" : std::to_string(i)));
  const auto out = gw.complete_batch(batch, 3);
  REQUIRE(out.size() == 8);
  for (int i = 1; i <= 8; ++i) {
    const auto& e = out[static_cast<std::size_t>(i - 1)];
    if (i == 3) {
      CHECK_FALSE(e.ok());
      CHECK(e.error.find("synthetic") != std::string::npos);
    } else {
      REQUIRE(e.ok());
      CHECK(e.response->text == "echo:" + std::to_string(i));
    }
  }
}

TEST_CASE("memory reflection") {
  Gateway gw(std::make_shared<ScriptedBackend>());
  CHECK(gw.memory_reflection("teacher", {}).find("no notable patterns") != std::string::npos);
  const auto a = gw.memory_reflection("teacher", {"liked a post", "argued about fares"});
  CHECK(a == gw.memory_reflection("teacher", {"liked a post", "argued about fares"}));
  CHECK_FALSE(a.empty());
}

TEST_CASE("prompt substitution leaves unknown braces alone") {
  const auto s = PromptLibrary::substitute(R"(Hi {name}, reply as {"k": {x}})",
                                           {{"name", "Ana"}, {"x", "1"}});
  CHECK(s == R"(Hi Ana, reply as {"k": 1})");
  CHECK(PromptLibrary::substitute("{missing}", {}) == "{missing}");
}

TEST_CASE("bundled prompts render") {
  const auto lib = PromptLibrary::load(EVOCORPS_TEST_PROMPTS);
  for (auto role : {RoleTag::kOrdinaryUser, RoleTag::kAnalyst, RoleTag::kStrategist,
                    RoleTag::kLeaderCreate, RoleTag::kUscEvaluate, RoleTag::kAmplifier,
                    RoleTag::kFactcheck, RoleTag::kGraderSentiment, RoleTag::kProbe}) {
    CHECK(lib.has(role));
  }
  const auto r = lib.render(RoleTag::kGraderSentiment, {{"TEXT", "Buses are late again"}});
  CHECK(r.user.find("Buses are late again") != std::string::npos);
  CHECK(r.user.find("{TEXT}") == std::string::npos);
}

TEST_CASE("remote: server errors are retried") {
  FakeServer srv([](int n, httplib::Response& res) {
    if (n <= 2) {
      res.status = n == 1 ? 503 : 429;
      return;
    }
    res.set_content(chat_reply("ok after retries"), "application/json");
  });
  RemoteBackend be(srv.config(3));
  const auto out = be.complete(req(RoleTag::kAmplifier, "hello"));
  CHECK(out.text == "ok after retries");
  CHECK(srv.hits == 3);
  const auto body = json::parse(srv.last_body);
  CHECK(body["messages"].back()["content"] == "hello");
}

TEST_CASE("remote: timeouts are retried") {
  FakeServer srv([](int n, httplib::Response& res) {
    if (n <= 2) std::this_thread::sleep_for(std::chrono::milliseconds(400));
    res.set_content(chat_reply("late but fine"), "application/json");
  });
  RemoteBackend be(srv.config(3, 150));
  CHECK(be.complete(req(RoleTag::kAmplifier, "hello")).text == "late but fine");
  CHECK(srv.hits >= 3);
}

TEST_CASE("remote: client errors fail at once, exhaustion names the role") {
  SUBCASE("400") {
    FakeServer srv([](int, httplib::Response& res) { res.status = 400; });
    RemoteBackend be(srv.config(3));
    CHECK_THROWS_AS(be.complete(req(RoleTag::kAnalyst, "x")), BackendError);
    CHECK(srv.hits == 1);
  }
  SUBCASE("exhausted") {
    FakeServer srv([](int, httplib::Response& res) { res.status = 500; });
    RemoteBackend be(srv.config(2));
    try {
      be.complete(req(RoleTag::kStrategist, "x"));
      FAIL("expected failure");
    } catch (const BackendError& e) {
      CHECK(std::string(e.what()).find("strategist") != std::string::npos);
    }
    CHECK(srv.hits == 3);
  }
  SUBCASE("malformed body") {
    FakeServer srv([](int, httplib::Response& res) {
      res.set_content("{\"nope\":1}", "application/json");
    });
    RemoteBackend be(srv.config(3));
    try {
      be.complete(req(RoleTag::kAnalyst, "x"));
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }
  }
}

TEST_CASE("remote backend needs a URL") {
  BackendConfig c;
  c.kind = BackendKind::kRemote;
  CHECK_THROWS_AS(make_backend(c), Error);
  c.endpoint = "ftp://x";
  CHECK_THROWS_AS(make_backend(c), Error);
}
