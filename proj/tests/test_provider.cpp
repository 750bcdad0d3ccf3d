#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "pdtsynth/openai_provider.hpp"
#include "pdtsynth/scripted_provider.hpp"

using namespace pdt;

namespace {

ChatRequest req(std::string user) {
  ChatRequest r;
  r.system_prompt = "sys";
  r.user_prompt = std::move(user);
  return r;
}

ScriptLine line(std::string text, std::int64_t in = 10, std::int64_t out = 5, std::optional<std::string> match = {}) {
  ScriptLine l;
  l.text = std::move(text);
  l.prompt_tokens = in;
  l.completion_tokens = out;
  l.match = std::move(match);
  return l;
}

// Minimal chat-completions server answering from a list of statuses.
class FakeServer {
 public:
  explicit FakeServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    svr_.Post("/v1/chat/completions", [this](const httplib::Request& r, httplib::Response& res) {
      const auto n = hits_.fetch_add(1);
      last_auth_ = r.get_header_value("Authorization");
      last_body_ = r.body;
      const int status = n < statuses_.size() ? statuses_[n] : 200;
      res.status = status;
      if (status == 200)
        res.set_content(
            R"({"model":"gpt-4o-mini","choices":[{"message":{"role":"assistant","content":"WORD: Dated ||| REVIEW: Old."}}],)"
            R"("usage":{"prompt_tokens":12,"completion_tokens":7,"total_tokens":19}})",
            "application/json");
      else
        res.set_content(R"({"error":{"message":"nope"}})", "application/json");
    });
    port_ = svr_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { svr_.listen_after_bind(); });
    svr_.wait_until_ready();
  }
  ~FakeServer() {
    svr_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::size_t hits() const { return hits_.load(); }
  std::string last_auth_;
  std::string last_body_;

 private:
  std::vector<int> statuses_;
  httplib::Server svr_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> hits_{0};
};

ProviderConfig local_config(const std::string& url) {
  ProviderConfig c;
  c.base_url = url;
  c.api_key_env = "PDTSYNTH_TEST_KEY";
  c.request_timeout_s = 5;
  c.max_retries = 3;
  return c;
}

}  // namespace

TEST(ScriptedProvider, RepliesInFileOrder) {
  ScriptedProvider p({line("one", 1, 2), line("two", 3, 4), line("three", 5, 6)});
  EXPECT_EQ(p.complete(req("a")).text, "one");
  const auto r2 = p.complete(req("b"));
  EXPECT_EQ(r2.text, "two");
  EXPECT_EQ(r2.prompt_tokens, 3);
  EXPECT_EQ(r2.completion_tokens, 4);
  EXPECT_EQ(r2.total_tokens(), 7);
  EXPECT_EQ(p.complete(req("c")).text, "three");
  EXPECT_EQ(p.remaining(), 0u);
}

TEST(ScriptedProvider, ExhaustionIsAnError) {
  ScriptedProvider p({line("Confusing|The menus hide everything.")});
  EXPECT_EQ(p.complete(req("x")).text, "Confusing|The menus hide everything.");
  try {
    p.complete(req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScriptExhausted);
  }
}

TEST(ScriptedProvider, MatchRoutesBySubstring) {
  ScriptedProvider p({line("for 0.75", 1, 1, "0.75"), line("generic")});
  EXPECT_EQ(p.complete(req("Sentiment score: 0.30")).text, "generic");
  EXPECT_EQ(p.complete(req("Sentiment score: 0.75")).text, "for 0.75");
  EXPECT_THROW(p.complete(req("Sentiment score: 0.75")), Error);
}

TEST(ScriptedProvider, ScriptedFailures) {
  ScriptLine t;
  t.error = "transient";
  ScriptLine a;
  a.error = "auth";
  ScriptedProvider p({t, a});
  try {
    p.complete(req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TransientExhausted);
    EXPECT_TRUE(e.is_provider_failure());
  }
  try {
    p.complete(req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthError);
    EXPECT_FALSE(e.is_provider_failure());
  }
}

TEST(ScriptedProvider, RejectsEmptyPrompts) {
  ScriptedProvider p({line("x")});
  ChatRequest r;
  r.system_prompt = "s";
  EXPECT_THROW(p.complete(r), Error);
}

TEST(ScriptedProvider, ScriptLineJsonRoundTrip) {
  auto l = line("hello", 3, 4, "0.5");
  l.latency_ms = 900;
  const auto back = script_line_from_json(to_json(l), "t");
  EXPECT_EQ(back.text, "hello");
  EXPECT_EQ(back.match, std::optional<std::string>("0.5"));
  EXPECT_EQ(back.latency_ms, 900);
  EXPECT_THROW(script_line_from_json(nlohmann::json{{"prompt_tokens", 1}}, "t"), Error);
  EXPECT_THROW(script_line_from_json(nlohmann::json{{"text", "x"}, {"prompt_tokens", -1}}, "t"), Error);
}

TEST(ProviderConfig, Bounds) {
  ProviderConfig c;
  EXPECT_NO_THROW(c.validate());
  c.max_retries = 11;
  EXPECT_THROW(c.validate(), Error);
  c.max_retries = 5;
  c.parallelism = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(OpenAiWire, RequestBodyShape) {
  auto r = req("Sentiment score: 0.30");
  r.temperature = 0.0;
  const auto j = chat_request_body(r);
  EXPECT_EQ(j["model"], "gpt-4o-mini");
  ASSERT_EQ(j["messages"].size(), 2u);
  EXPECT_EQ(j["messages"][0]["role"], "system");
  EXPECT_EQ(j["messages"][1]["content"], "Sentiment score: 0.30");
  EXPECT_EQ(j["temperature"], 0.0);
}

TEST(OpenAiWire, ReplyParsing) {
  const auto r = parse_chat_reply(
      R"({"choices":[{"message":{"content":"hi"}}],"usage":{"prompt_tokens":3,"completion_tokens":2,"total_tokens":5}})");
  EXPECT_EQ(r.text, "hi");
  EXPECT_EQ(r.total_tokens(), 5);
  auto code = [](const std::string& body) {
    try {
      parse_chat_reply(body);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code("not json"), ErrorCode::MalformedProviderReply);
  EXPECT_EQ(code(R"({"choices":[]})"), ErrorCode::MalformedProviderReply);
  EXPECT_EQ(code(R"({"choices":[{"message":{"content":"x"}}]})"), ErrorCode::MalformedProviderReply);
  EXPECT_EQ(code(R"({"choices":[{"message":{"content":"x"}}],"usage":{"prompt_tokens":3,"completion_tokens":2,"total_tokens":9}})"),
            ErrorCode::MalformedProviderReply);
}

TEST(OpenAiProvider, RetriesTransientThenSucceeds) {
  FakeServer server({429, 429, 200});
  ::setenv("PDTSYNTH_TEST_KEY", "sk-test", 1);
  std::vector<std::chrono::milliseconds> sleeps;
  OpenAiProvider p(local_config(server.base_url()), [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  const auto r = p.complete(req("Sentiment score: 0.30"));
  EXPECT_EQ(r.text, "WORD: Dated ||| REVIEW: Old.");
  EXPECT_EQ(r.prompt_tokens, 12);
  EXPECT_EQ(r.completion_tokens, 7);
  EXPECT_EQ(r.transport_retries, 2);
  EXPECT_EQ(server.hits(), 3u);
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_EQ(sleeps[0].count(), 500);
  EXPECT_EQ(sleeps[1].count(), 1000);
  EXPECT_EQ(server.last_auth_, "Bearer sk-test");
  EXPECT_NE(server.last_body_.find("\"messages\""), std::string::npos);
}

TEST(OpenAiProvider, UnauthorizedFailsImmediately) {
  FakeServer server({401});
  ::setenv("PDTSYNTH_TEST_KEY", "sk-test", 1);
  int sleeps = 0;
  OpenAiProvider p(local_config(server.base_url()), [&](std::chrono::milliseconds) { ++sleeps; });
  try {
    p.complete(req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthError);
    EXPECT_EQ(std::string(e.what()).find("sk-test"), std::string::npos);
  }
  EXPECT_EQ(server.hits(), 1u);
  EXPECT_EQ(sleeps, 0);
}

TEST(OpenAiProvider, RetryBudgetExhausted) {
  FakeServer server({503, 503, 503, 503, 503});
  ::setenv("PDTSYNTH_TEST_KEY", "sk-test", 1);
  OpenAiProvider p(local_config(server.base_url()), [](std::chrono::milliseconds) {});
  try {
    p.complete(req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TransientExhausted);
  }
  EXPECT_EQ(server.hits(), 4u);
}

TEST(OpenAiProvider, OtherClientErrorsAreRejected) {
  FakeServer server({400});
  ::setenv("PDTSYNTH_TEST_KEY", "sk-test", 1);
  OpenAiProvider p(local_config(server.base_url()), [](std::chrono::milliseconds) {});
  try {
    p.complete(req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RequestRejected);
  }
  EXPECT_EQ(server.hits(), 1u);
}

TEST(OpenAiProvider, MissingKeyIsAuthError) {
  auto cfg = local_config("http://127.0.0.1:1/v1");
  cfg.api_key_env = "PDTSYNTH_SURELY_UNSET_KEY";
  ::unsetenv("PDTSYNTH_SURELY_UNSET_KEY");
  OpenAiProvider p(cfg, [](std::chrono::milliseconds) {});
  try {
    p.complete(req("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthError);
  }
}

TEST(OpenAiProvider, BackoffIsCapped) {
  OpenAiProvider p(local_config("http://127.0.0.1:1/v1"), [](std::chrono::milliseconds) {});
  EXPECT_EQ(p.backoff_delay(0).count(), 500);
  EXPECT_EQ(p.backoff_delay(3).count(), 4000);
  EXPECT_EQ(p.backoff_delay(10).count(), 30000);
}
