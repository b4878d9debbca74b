// Copyright 2026 The evorepair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include <httplib.h>

#include "evorepair/error.hpp"
#include "evorepair/gateway.hpp"
#include "helpers.hpp"

using namespace evorepair;
using nlohmann::json;
using testutil::loc;
using testutil::snap;

namespace {

std::optional<ErrorKind> kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Local infill endpoint; the handler decides each reply.
class FakeEndpoint {
 public:
  using Handler = std::function<void(const json& req, httplib::Response& res)>;

  explicit FakeEndpoint(Handler h) : handler_(std::move(h)) {
    server_.Post("/infill", [this](const httplib::Request& req, httplib::Response& res) {
      const json body = json::parse(req.body);
      {
        std::lock_guard lock(mu_);
        requests_.push_back(body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      handler_(body, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  EndpointConfig config() const {
    EndpointConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_);
    c.backoff_ms = 1;
    c.timeout_ms = 5000;
    return c;
  }
  std::vector<json> requests() {
    std::lock_guard lock(mu_);
    return requests_;
  }
  std::vector<std::string> auth() {
    std::lock_guard lock(mu_);
    return auth_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::vector<json> requests_;
  std::vector<std::string> auth_;
};

void reply_choices(httplib::Response& res, int n, const std::string& reason = "stop", int offset = 0) {
  json choices = json::array();
  for (int i = 0; i < n; ++i) choices.push_back({{"text", "s" + std::to_string(offset + i)}, {"finish_reason", reason}});
  res.set_content(json{{"choices", choices}}.dump(), "application/json");
}

PromptBundle sample_prompt() {
  PromptBundle p;
  p.fill_token = "<FILL_ME>";
  p.text = "def f(x):\n    <FILL_ME>\n    return x\n";
  p.token_count = approx_token_count(p.text);
  return p;
}

}  // namespace

TEST_CASE("sampling defaults and validation") {
  const SamplingParams d;
  CHECK(d.top_p == 0.9);
  CHECK(d.top_k == 50);
  CHECK(d.temperature == 1.0);
  CHECK(d.num_return_sequences == 10);
  CHECK(d.max_new_tokens == 100);
  CHECK_NOTHROW(d.validate());
  for (auto bad : std::vector<std::function<void(SamplingParams&)>>{
           [](SamplingParams& p) { p.top_p = 0.0; }, [](SamplingParams& p) { p.top_p = 1.5; },
           [](SamplingParams& p) { p.temperature = -0.1; }, [](SamplingParams& p) { p.temperature = 1.1; },
           [](SamplingParams& p) { p.top_k = 0; }, [](SamplingParams& p) { p.num_return_sequences = 0; },
           [](SamplingParams& p) { p.max_new_tokens = 0; }}) {
    SamplingParams p;
    bad(p);
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::config);
  }
  const EndpointConfig e;
  CHECK(e.path == "/infill");
  CHECK(e.max_retries == 3);
  CHECK(kind_of([] { InfillClient c(EndpointConfig{}); }) == ErrorKind::config);
}

TEST_CASE("ten sequences pass through one call with the request fields") {
  FakeEndpoint ep([](const json& req, httplib::Response& res) { reply_choices(res, req["n"].get<int>()); });
  InfillClient client(ep.config());
  const PromptBundle p = sample_prompt();
  const auto seqs = client.request_infill(p, SamplingParams{}, 10);
  REQUIRE(seqs.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(seqs[i].text == "s" + std::to_string(i));
    CHECK(seqs[i].provider == Origin::endpoint);
    CHECK(seqs[i].terminated);
  }
  const auto reqs = ep.requests();
  REQUIRE(reqs.size() == 1);
  const json& r = reqs[0];
  CHECK(r["prefix"] == "def f(x):\n    ");
  CHECK(r["suffix"] == "\n    return x\n");
  CHECK(r["prefix"].get<std::string>() + "<FILL_ME>" + r["suffix"].get<std::string>() == p.text);
  CHECK(r["n"] == 10);
  CHECK(r["top_p"] == 0.9);
  CHECK(r["top_k"] == 50);
  CHECK(r["temperature"] == 1.0);
  CHECK(r["max_new_tokens"] == 100);
}

TEST_CASE("larger totals are split into batches") {
  std::atomic<int> served{0};
  FakeEndpoint ep([&](const json& req, httplib::Response& res) {
    const int n = req["n"].get<int>();
    reply_choices(res, n, "stop", served.fetch_add(n));
  });
  InfillClient client(ep.config());
  const auto seqs = client.request_infill(sample_prompt(), SamplingParams{}, 25);
  REQUIRE(seqs.size() == 25);
  CHECK(seqs[24].text == "s24");
  const auto reqs = ep.requests();
  REQUIRE(reqs.size() == 3);
  CHECK(reqs[0]["n"] == 10);
  CHECK(reqs[1]["n"] == 10);
  CHECK(reqs[2]["n"] == 5);
}

TEST_CASE("an endpoint running dry stops the loop, extra choices are cut") {
  FakeEndpoint dry([](const json&, httplib::Response& res) { reply_choices(res, 0); });
  CHECK(InfillClient(dry.config()).request_infill(sample_prompt(), SamplingParams{}, 10).empty());
  FakeEndpoint generous([](const json&, httplib::Response& res) { reply_choices(res, 30); });
  CHECK(InfillClient(generous.config()).request_infill(sample_prompt(), SamplingParams{}, 4).size() == 4);
}

TEST_CASE("unterminated sequences are flagged") {
  FakeEndpoint ep([](const json& req, httplib::Response& res) {
    json choices = json::array({{{"text", "a"}, {"finish_reason", "length"}},
                                {{"text", "b"}, {"finish_reason", "eos"}},
                                {{"text", "c"}, {"finish_reason", "endofmask"}},
                                {{"text", "d"}},
                                {{"finish_reason", "stop"}}});
    (void)req;
    res.set_content(json{{"choices", choices}}.dump(), "application/json");
  });
  SamplingParams sp;
  sp.num_return_sequences = 5;
  const auto seqs = InfillClient(ep.config()).request_infill(sample_prompt(), sp, 5);
  // the record without text is skipped; the second call is cut to one
  REQUIRE(seqs.size() == 5);
  CHECK_FALSE(seqs[0].terminated);
  CHECK(seqs[1].terminated);
  CHECK(seqs[2].terminated);
  CHECK_FALSE(seqs[3].terminated);
  CHECK(seqs[4].text == "a");
}

TEST_CASE("server errors are retried, then reported as a provider error") {
  FakeEndpoint ep([](const json&, httplib::Response& res) { res.status = 503; });
  InfillClient client(ep.config());
  const std::string msg = message_of([&] { client.request_infill(sample_prompt(), SamplingParams{}, 10); });
  CHECK(kind_of([&] { client.request_infill(sample_prompt(), SamplingParams{}, 10); }) == ErrorKind::provider);
  CHECK(msg.find("3 retries") != std::string::npos);
  CHECK(msg.find("HTTP 503") != std::string::npos);
  CHECK(ep.requests().size() == 8);  // 4 attempts per request, two requests
}

TEST_CASE("a transient failure is recovered by a retry") {
  std::atomic<int> calls{0};
  FakeEndpoint ep([&](const json& req, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 500;
      return;
    }
    if (calls == 3) {
      res.set_content("not json", "application/json");
      return;
    }
    reply_choices(res, req["n"].get<int>());
  });
  const auto seqs = InfillClient(ep.config()).request_infill(sample_prompt(), SamplingParams{}, 10);
  CHECK(seqs.size() == 10);
  CHECK(ep.requests().size() == 4);
}

TEST_CASE("over-length prompts are a provider error with the token count") {
  FakeEndpoint ep([](const json&, httplib::Response& res) { res.status = 413; });
  const PromptBundle p = sample_prompt();
  InfillClient client(ep.config());
  const std::string msg = message_of([&] { client.request_infill(p, SamplingParams{}, 10); });
  CHECK(msg.find(std::to_string(p.token_count)) != std::string::npos);
  CHECK(ep.requests().size() == 1);  // not retried

  EndpointConfig limited = ep.config();
  limited.max_prompt_tokens = p.token_count - 1;
  InfillClient strict(limited);
  CHECK(kind_of([&] { strict.request_infill(p, SamplingParams{}, 10); }) == ErrorKind::provider);
  const std::string m2 = message_of([&] { strict.request_infill(p, SamplingParams{}, 10); });
  CHECK(m2.find(std::to_string(p.token_count)) != std::string::npos);
  CHECK(m2.find(std::to_string(p.token_count - 1)) != std::string::npos);
  CHECK(ep.requests().size() == 1);
}

TEST_CASE("unreachable endpoint") {
  EndpointConfig c;
  c.base_url = "http://127.0.0.1:1";
  c.backoff_ms = 1;
  c.max_retries = 1;
  c.timeout_ms = 500;
  CHECK(kind_of([&] { InfillClient(c).request_infill(sample_prompt(), SamplingParams{}, 1); }) ==
        ErrorKind::provider);
}

TEST_CASE("authorization header comes from the environment") {
  FakeEndpoint ep([](const json& req, httplib::Response& res) { reply_choices(res, req["n"].get<int>()); });
  EndpointConfig c = ep.config();
  c.auth_env = "EVOREPAIR_UNIT_TEST_KEY";
  ::setenv("EVOREPAIR_UNIT_TEST_KEY", "Bearer xyz", 1);
  InfillClient(c).request_infill(sample_prompt(), SamplingParams{}, 1);
  ::unsetenv("EVOREPAIR_UNIT_TEST_KEY");
  InfillClient(c).request_infill(sample_prompt(), SamplingParams{}, 1);
  const auto a = ep.auth();
  REQUIRE(a.size() == 2);
  CHECK(a[0] == "Bearer xyz");
  CHECK(a[1].empty());
}

TEST_CASE("in-flight requests are bounded") {
  std::atomic<int> now{0}, peak{0};
  FakeEndpoint ep([&](const json& req, httplib::Response& res) {
    const int cur = ++now;
    int p = peak.load();
    while (cur > p && !peak.compare_exchange_weak(p, cur)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --now;
    reply_choices(res, req["n"].get<int>());
  });
  EndpointConfig c = ep.config();
  c.max_in_flight = 2;
  InfillClient client(c);
  std::vector<std::thread> ts;
  for (int i = 0; i < 6; ++i) ts.emplace_back([&] { client.request_infill(sample_prompt(), SamplingParams{}, 1); });
  for (auto& t : ts) t.join();
  CHECK(ep.requests().size() == 6);
  CHECK(peak.load() <= 2);
  CHECK(peak.load() >= 1);
}

TEST_CASE("redundancy ranks statements by shared identifiers") {
  const auto src = snap({{"f.py",
                          "def f(a, b):\n"
                          "    x = a + b\n"
                          "    y = a * 2\n"
                          "    return x + y\n"
                          "z = 7\n"
                          "w = q\n"}});
  SuspiciousStatement s;
  s.location = loc("f.py", 2);
  s.enclosing_region = {1, 4};
  const std::vector<std::string> prefixes{"#"};
  const auto all = redundancy_sequences(s, src, prefixes, 50);
  std::vector<std::string> texts;
  for (const auto& r : all) {
    texts.push_back(r.text);
    CHECK(r.provider == Origin::redundancy);
  }
  // shared counts: def line 4, y line 3, return line 3 (tie keeps file order), then zeros
  CHECK(texts == std::vector<std::string>{"def f(a, b):", "y = a * 2", "return x + y", "z = 7", "w = q"});
  CHECK(redundancy_sequences(s, src, prefixes, 2).size() == 2);
  CHECK(redundancy_sequences(s, src, prefixes, 0).empty());

  const auto lone = snap({{"g.py", "# header\nx = 1\n"}});
  SuspiciousStatement g;
  g.location = loc("g.py", 2);
  g.enclosing_region = {1, 2};
  CHECK(redundancy_sequences(g, lone, prefixes, 50).empty());
}

TEST_CASE("redundancy keeps multi-line statements whole and dedented") {
  const auto src = snap({{"h.py", "def h(v):\n    r = max(v,\n            0)\n    return r\n"}});
  SuspiciousStatement s;
  s.location = loc("h.py", 4);
  s.enclosing_region = {1, 4};
  const std::vector<std::string> prefixes{"#"};
  const auto out = redundancy_sequences(s, src, prefixes, 10);
  REQUIRE(out.size() == 2);
  CHECK(out[0].text == "r = max(v,\n        0)");
  CHECK(out[1].text == "def h(v):");
}

TEST_CASE("fixture book lookups") {
  json j = {{"src/a.py:3-3", {{"replace", {"x = 1", "x = 2"}}, {"insert", {"pass"}}}},
            {"src/a.py:5", {{"replace", json::array()}}}};
  json big = json::array({"oracle()"});
  for (int i = 0; i < 49; ++i) big.push_back("d" + std::to_string(i));
  j["src/b.py:1-2"] = {{"replace", big}};
  const FixtureBook book = FixtureBook::from_json(j);

  const auto r = book.sequences(loc("src/a.py", 3), PromptMode::replace);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == RawSequence{"x = 1", Origin::fixture, true});
  CHECK(r[1].text == "x = 2");
  CHECK(book.sequences(loc("src/a.py", 3), PromptMode::insert).size() == 1);
  CHECK(book.sequences(loc("src/a.py", 5), PromptMode::replace).empty());
  CHECK(book.sequences(loc("src/a.py", 5), PromptMode::insert).empty());
  CHECK(book.sequences(loc("src/a.py", 4), PromptMode::replace).empty());
  const auto b = book.sequences(loc("src/b.py", 1, 2), PromptMode::replace);
  REQUIRE(b.size() == 50);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i].text == big[i].get<std::string>());
}

TEST_CASE("malformed fixtures") {
  CHECK(kind_of([] { FixtureBook::from_json(json::array()); }) == ErrorKind::parse);
  CHECK(kind_of([] { FixtureBook::from_json(json{{"nocolon", json::object()}}); }) == ErrorKind::parse);
  CHECK(kind_of([] { FixtureBook::from_json(json{{"a:1", 3}}); }) == ErrorKind::parse);
  CHECK(kind_of([] { FixtureBook::from_json(json{{"a:1", {{"replace", {1, 2}}}}}); }) == ErrorKind::parse);

  testutil::TempDir dir;
  CHECK(kind_of([&] { FixtureBook::load(dir.path() / "none.json"); }) == ErrorKind::io);
  testutil::write_file(dir.path() / "bad.json", "{\"a:1\": ");
  CHECK(kind_of([&] { FixtureBook::load(dir.path() / "bad.json"); }) == ErrorKind::parse);
}
