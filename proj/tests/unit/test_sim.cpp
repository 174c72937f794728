#include <random>
#include <set>

#include <httplib.h>

#include "doctest.h"
#include "llweave/server.hpp"
#include "../support/generators.hpp"
#include "../support/ski.hpp"
#include "../support/specs.hpp"

using namespace llweave;
using namespace llweave::sim;
using pi::parse_process;
using pi::Process;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

const Process& ski_main() {
  static const testing::SkiFixture fixture;
  return fixture.main;
}

}  // namespace

TEST_CASE("instantiate substitutes definitions") {
  auto cm2inch = services::stub(services::ServiceSpec{"Cm2Inch", {"LENGTH_CM"}, {"LENGTH_IN"}, {}, {}, {}});
  Process p = instantiate(parse_process("Cm2Inch(z_3,cii)"), {cm2inch});
  CHECK(p == parse_process("z_3(lc).cii<li>.0"));
  CHECK(p.origin() == "Cm2Inch");
  CHECK(p.body().origin() == "Cm2Inch");

  Process plain = parse_process("x<a>.0 | x(b).0");
  Process same = instantiate(plain, {cm2inch});
  CHECK(same == plain);
  CHECK(same.left().origin() == kCompositionOrigin);

  CHECK(code_of([&] { instantiate(parse_process("Nope(a)"), {cm2inch}); }) == ErrorCode::UnknownRef);
  CHECK(code_of([&] { instantiate(parse_process("Cm2Inch(a)"), {cm2inch}); }) == ErrorCode::ArityMismatch);
}

TEST_CASE("instantiate keeps definition constants free") {
  auto cm2inch = services::stub(services::ServiceSpec{"Cm2Inch", {"LENGTH_CM"}, {"LENGTH_IN"}, {}, {}, {}});
  Process p = instantiate(parse_process("nu li. (Cm2Inch(a,b) | li<q>.0)"), {cm2inch});
  CHECK(pi::free_names(p).contains(ChannelName("li")));
  CHECK(pi::free_names(p) == ChannelSet{"a", "b", "li", "q"});
}

TEST_CASE("trivial runs") {
  RunResult nil = run(Process::nil(), Policy::first());
  CHECK(nil.events.empty());
  CHECK(nil.terminal == Terminal::Terminated);
  CHECK(nil.digests.size() == 1);

  RunResult lone = run(parse_process("x(a).0"), Policy::first());
  CHECK(lone.events.empty());
  CHECK(lone.terminal == Terminal::Stuck);

  RunResult pair = run(parse_process("x<c>.0 | x(a).a<d>.0 | c(e).0"), Policy::first());
  REQUIRE(pair.events.size() == 2);
  CHECK(pair.events[0].payload == pi::Names{"c"});
  CHECK(pair.events[1].channel == ChannelName("c"));
  CHECK(pair.terminal == Terminal::Terminated);
}

TEST_CASE("step rejects disabled ids") {
  SimState s = initial_state(Process::nil());
  CHECK(code_of([&] { step(s, 0); }) == ErrorCode::InvalidRedexId);
  SimState t = initial_state(parse_process("x<a>.0 | x(b).0"));
  CHECK(code_of([&] { step(t, 1); }) == ErrorCode::InvalidRedexId);
  SimState u = step(t, 0);
  CHECK(u.step_index == 1);
  CHECK(u.history.size() == 1);
  CHECK(u.picks == std::vector<std::size_t>{0});
}

TEST_CASE("edge report") {
  Process p = instantiate(parse_process("x(a).y<b>.0 | x<c>.0 | y(d).0"), {});
  EdgeReport r = edge_report(p);
  REQUIRE(r.enabled.size() == 1);
  CHECK(r.enabled[0].channel == ChannelName("x"));
  REQUIRE(r.blocked.size() == 1);
  CHECK(r.blocked[0].channel == ChannelName("y"));

  EdgeReport none = edge_report(Process::nil());
  CHECK(none.enabled.empty());
  CHECK(none.blocked.empty());

  // Distinct binders never pair up.
  EdgeReport scoped = edge_report(parse_process("nu z. z<a>.0 | nu z. w(b).z(c).0"));
  CHECK(scoped.blocked.empty());

  std::string dot = edge_report_to_dot(r);
  CHECK(dot.find("color=black, style=solid") != std::string::npos);
  CHECK(dot.find("color=grey, style=dashed") != std::string::npos);
}

TEST_CASE("step limit") {
  CHECK(code_of([] { run(ski_main(), Policy::first(), 5); }) == ErrorCode::StepLimit);
}

TEST_CASE("ski run under the first policy") {
  CHECK(pi::enabled_redexes(ski_main()).size() == 1);
  RunResult r = run(ski_main(), Policy::first());
  CHECK(r.terminal == Terminal::Terminated);
  CHECK(r.events.size() >= 15);
  CHECK(r.events.size() <= 19);
  for (std::size_t i = 0; i < r.events.size(); ++i) CHECK(r.events[i].step == i + 1);

  auto link = std::find_if(r.events.begin(), r.events.end(), [](const FiredEvent& e) {
    return e.sender_origin == "SelLen" && e.receiver_origin == "Cm2Inch";
  });
  REQUIRE(link != r.events.end());
  CHECK(link->payload == pi::Names{"lc"});
  CHECK_FALSE(pi::free_names(ski_main()).contains(link->channel));

  CHECK(testing::deliveries(r.events, "Request", "pnc") == 1);
  CHECK(testing::deliveries(r.events, "Request", "exc") == 0);
}

TEST_CASE("ski exception branch") {
  SimState s = testing::run_preferring(ski_main(), "sse");
  CHECK(pi::struct_congruent(s.term, Process::nil()));
  CHECK(testing::deliveries(s.history, "Request", "exc") == 1);
  CHECK(testing::deliveries(s.history, "Request", "pnc") == 0);
  CHECK(s.history.back().payload == pi::Names{"ex"});

  RunResult replay = run(ski_main(), Policy::script(s.picks));
  CHECK(replay.final_state.digest == s.digest);
}

TEST_CASE("ski runs deliver exactly one outcome") {
  std::vector<Policy> policies{Policy::first()};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) policies.push_back(Policy::random(seed));
  for (const auto& policy : policies) {
    CAPTURE(policy.seed());
    RunResult r = run(ski_main(), policy);
    CHECK(r.terminal == Terminal::Terminated);
    CHECK(testing::deliveries(r.events, "Request", "pnc") + testing::deliveries(r.events, "Request", "exc") == 1);
  }
}

TEST_CASE("replay reproduces digests and state") {
  RunResult r = run(ski_main(), Policy::random(42));
  RunResult again = run(ski_main(), Policy::script(r.final_state.picks));
  CHECK(again.digests == r.digests);

  SimState s = initial_state(ski_main());
  for (std::size_t pick : r.final_state.picks) s = step(s, pick);
  CHECK(s.digest == r.final_state.digest);
  CHECK(s.term == r.final_state.term);
}

TEST_CASE("stuck only when nothing is enabled") {
  std::mt19937 rng(5);
  for (int i = 0; i < 300; ++i) {
    Process p = testing::random_process(rng, 4);
    RunResult r = run(p, Policy::random(static_cast<std::uint64_t>(i)), 200);
    CHECK(pi::enabled_redexes(r.final_state.term).empty());
    if (r.terminal == Terminal::Stuck) CHECK_FALSE(pi::struct_congruent(r.final_state.term, Process::nil()));
  }
}

TEST_CASE("client and stub terminate under every policy") {
  std::mt19937 rng(321);
  for (int i = 0; i < 50; ++i) {
    services::ServiceSpec s = testing::random_spec(rng, "Svc");
    Process main = assemble(Process::ref(s.name, services::encode(s).channel_list()), services::client(s),
                            {services::stub(s)});
    for (auto policy : {Policy::first(), Policy::random(1), Policy::random(2), Policy::random(3)}) {
      CHECK(run(main, policy).terminal == Terminal::Terminated);
    }
  }
}

TEST_CASE("trace document") {
  RunResult r = run(ski_main(), Policy::first());
  nlohmann::json j = trace_to_json(r);
  CHECK(j["initial"].is_string());
  CHECK(j["terminal"] == "terminated");
  CHECK(j["digests"].size() == r.events.size() + 1);
  REQUIRE(j["events"].size() == r.events.size());
  for (const auto& e : j["events"]) {
    CHECK(e["step"].is_number_unsigned());
    CHECK(e["channel"].is_string());
    CHECK(e["from"].is_string());
    CHECK(e["to"].is_string());
    CHECK(e["payload"].is_array());
  }
}

TEST_CASE("state document") {
  nlohmann::json j = state_to_json(initial_state(ski_main()));
  CHECK(j["step_index"] == 0);
  CHECK(j["enabled"].size() == 1);
  CHECK(j["enabled"][0]["id"] == 0);
  CHECK(j["status"] == "running");
  std::set<std::string> origins;
  for (const auto& p : j["processes"]) origins.insert(p["origin"]);
  CHECK(origins.contains("Request"));
}

TEST_CASE("step session") {
  StepSession session(ski_main());
  std::string before = session.state()["digest"];
  nlohmann::json bad = session.step(R"({"id": 9})");
  CHECK(bad["error"] == "invalid-redex-id");
  CHECK(session.state()["digest"] == before);
  CHECK(session.step("not json")["error"] == "invalid-argument");
  CHECK(session.step(R"({"id": -1})")["error"] == "invalid-redex-id");

  nlohmann::json after = session.step(R"({"id": 0})");
  CHECK(after["step_index"] == 1);
  CHECK(session.reset()["digest"] == before);
}

TEST_CASE("step server over http") {
  StepServer server(ski_main());
  int port = server.start(0);
  httplib::Client client("127.0.0.1", port);

  RunResult batch = run(ski_main(), Policy::first());
  std::vector<std::string> digests;
  auto res = client.Get("/state");
  REQUIRE(res);
  CHECK(res->status == 200);
  digests.push_back(nlohmann::json::parse(res->body)["digest"]);
  for (std::size_t i = 0; i < batch.events.size(); ++i) {
    auto r = client.Post("/step", R"({"id": 0})", "application/json");
    REQUIRE(r);
    digests.push_back(nlohmann::json::parse(r->body)["digest"]);
  }
  CHECK(digests == batch.digests);

  auto bad = client.Post("/step", R"({"id": 0})", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(nlohmann::json::parse(bad->body)["error"] == "invalid-redex-id");

  auto reset = client.Post("/reset", "", "application/json");
  REQUIRE(reset);
  CHECK(nlohmann::json::parse(reset->body)["digest"] == batch.digests.front());

  StepServer second(Process::nil());
  CHECK(code_of([&] { second.bind(port); }) == ErrorCode::PortInUse);
  server.stop();
}
