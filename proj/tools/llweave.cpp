// llweave command-line tool: compose | simulate | serve | export-dot.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "llweave/composer.hpp"
#include "llweave/server.hpp"
#include "llweave/sim.hpp"

using namespace llweave;

namespace {

enum Exit { kOk = 0, kFailure = 1, kNotComposable = 2, kTimeout = 3, kStuck = 4, kStepLimit = 5 };

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("LLWEAVE_LOG");
  std::string v = env ? env : "warn";
  if (v == "error") return Level::Error;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

void log(Level level, const std::string& message) {
  static const Level threshold = log_level();
  if (level > threshold) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "llweave: " << names[static_cast<int>(level)] << ": " << message << "\n";
}

struct RunConfig {
  std::string registry_path;
  std::string request_path;
  composer::SearchLimits limits;
  long timeout_ms = 30000;
  std::string policy = "first";
  std::optional<std::uint64_t> seed;
  std::string script_path;
  std::string format = "text";
  std::size_t step_limit = sim::kDefaultStepLimit;
  std::vector<std::string> omit_stubs;
  std::string out_dir;
  int port = 8080;
  std::size_t at_step = 0;
};

void add_inputs(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--registry", c.registry_path, "Service registry file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--request", c.request_path, "Request file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--max-depth", c.limits.max_depth, "Bound on non-invertible steps per branch")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-cuts", c.limits.max_cuts, "Bound on cuts per branch")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--timeout", c.timeout_ms, "Search timeout in milliseconds")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
}

void add_policy(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--policy", c.policy, "Scheduler")
      ->capture_default_str()
      ->check(CLI::IsMember({"first", "random", "script"}));
  cmd->add_option("--seed", c.seed, "Seed for the random policy");
  cmd->add_option("--script", c.script_path, "File of redex indices for the script policy")
      ->check(CLI::ExistingFile);
  cmd->add_option("--step-limit", c.step_limit, "Maximum number of reductions")->capture_default_str();
  cmd->add_option("--omit-stub", c.omit_stubs, "Leave out the stub of a service");
}

std::vector<std::size_t> read_script(const std::string& path) {
  std::istringstream in(services::read_text_file(path));
  std::vector<std::size_t> picks;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw Error(ErrorCode::InvalidArgument, "bad redex index '" + token + "' in script");
    picks.push_back(v);
  }
  return picks;
}

sim::Policy make_policy(const RunConfig& c) {
  if (c.policy == "random") {
    if (!c.seed) throw Error(ErrorCode::InvalidArgument, "--policy random requires --seed");
    return sim::Policy::random(*c.seed);
  }
  if (c.seed) throw Error(ErrorCode::InvalidArgument, "--seed only applies to --policy random");
  if (c.policy == "script") {
    if (c.script_path.empty()) throw Error(ErrorCode::InvalidArgument, "--policy script requires --script");
    return sim::Policy::script(read_script(c.script_path));
  }
  return sim::Policy::first();
}

struct Loaded {
  std::vector<services::ServiceSpec> registry;
  services::ServiceSpec request;
  composer::CompositionResult result;
};

Loaded compose_from(RunConfig& c) {
  c.limits.timeout = std::chrono::milliseconds(c.timeout_ms);
  auto registry = services::load_registry(services::read_text_file(c.registry_path));
  auto request = services::load_request(services::read_text_file(c.request_path));
  log(Level::Info, "composing " + request.name + " from " + std::to_string(registry.size()) + " services");
  auto result = composer::compose(registry, request, c.limits);
  log(Level::Info, "proof found: " + std::to_string(result.stats.nodes_expanded) + " nodes, " +
                       std::to_string(result.stats.elapsed.count()) + " s");
  return Loaded{std::move(registry), std::move(request), std::move(result)};
}

pi::Process main_process(const Loaded& l, const RunConfig& c) {
  std::vector<services::ProcessDef> stubs;
  for (const auto& s : l.registry) {
    if (std::find(c.omit_stubs.begin(), c.omit_stubs.end(), s.name) != c.omit_stubs.end()) continue;
    stubs.push_back(services::stub(s));
  }
  return sim::assemble(l.result.theorem.process(), services::client(l.request), stubs);
}

nlohmann::json composition_json(const composer::CompositionResult& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (auto [rule, n] : kernel::rule_counts(r.theorem.derivation())) counts[std::string(kernel::to_string(rule))] = n;
  return {{"sequent", cll::print_sequent(r.theorem.sequent())},
          {"process", pi::print_process(r.theorem.process())},
          {"canonical", pi::canonical_form(r.theorem.process())},
          {"services_used", r.services_used},
          {"rule_counts", counts},
          {"proof", kernel::proof_to_json(r.theorem.derivation())},
          {"stats",
           {{"nodes_expanded", r.stats.nodes_expanded},
            {"cuts", r.stats.cuts_introduced},
            {"elapsed_seconds", r.stats.elapsed.count()}}}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

int cmd_compose(RunConfig& c) {
  Loaded l = compose_from(c);
  const auto& r = l.result;
  if (!c.out_dir.empty()) {
    std::filesystem::create_directories(c.out_dir);
    std::filesystem::path dir(c.out_dir);
    write_file(dir / "proof.json", kernel::proof_to_json(r.theorem.derivation()).dump(2) + "\n");
    write_file(dir / "process.txt", pi::print_process(r.theorem.process()) + "\n");
    std::string used;
    for (const auto& s : r.services_used) used += s + "\n";
    write_file(dir / "services.txt", used);
  }
  if (c.format == "json") {
    std::cout << composition_json(r).dump(2) << "\n";
  } else if (c.format == "dot") {
    std::cout << sim::edge_report_to_dot(sim::edge_report(main_process(l, c)));
  } else {
    std::cout << "sequent:  " << cll::print_sequent(r.theorem.sequent()) << "\n";
    std::cout << "process:  " << pi::print_process(r.theorem.process()) << "\n";
    std::cout << "services:";
    for (const auto& s : r.services_used) std::cout << " " << s;
    std::cout << "\nrules:   ";
    for (auto [rule, n] : kernel::rule_counts(r.theorem.derivation())) {
      std::cout << " " << kernel::to_string(rule) << "=" << n;
    }
    std::cout << "\n";
  }
  return kOk;
}

int cmd_simulate(RunConfig& c) {
  sim::Policy policy = make_policy(c);
  Loaded l = compose_from(c);
  pi::Process main = main_process(l, c);
  sim::RunResult r = sim::run(main, policy, c.step_limit);
  log(Level::Info, std::to_string(r.events.size()) + " reductions, " + std::string(sim::to_string(r.terminal)));
  if (c.format == "json") {
    std::cout << sim::trace_to_json(r).dump(2) << "\n";
  } else {
    for (const auto& e : r.events) {
      std::cout << e.step << ". " << e.channel.str() << ": " << e.sender_origin << " -> " << e.receiver_origin
                << " <";
      for (std::size_t i = 0; i < e.payload.size(); ++i) std::cout << (i ? "," : "") << e.payload[i].str();
      std::cout << ">\n";
    }
    std::cout << sim::to_string(r.terminal) << " after " << r.events.size() << " reductions\n";
  }
  return r.terminal == sim::Terminal::Terminated ? kOk : kStuck;
}

volatile std::sig_atomic_t g_interrupted = 0;
sim::StepServer* g_server = nullptr;

int cmd_serve(RunConfig& c) {
  Loaded l = compose_from(c);
  sim::StepServer server(main_process(l, c));
  int port = server.bind(c.port);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    g_interrupted = 1;
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    g_interrupted = 1;
    if (g_server) g_server->stop();
  });
  std::cout << "serving on http://127.0.0.1:" << port << std::endl;
  server.listen();
  g_server = nullptr;
  return kOk;
}

int cmd_export_dot(RunConfig& c) {
  sim::Policy policy = make_policy(c);
  Loaded l = compose_from(c);
  pi::Process main = main_process(l, c);
  sim::SimState state = sim::run_steps(main, policy, c.at_step);
  std::cout << sim::edge_report_to_dot(sim::edge_report(state.term));
  return kOk;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NotComposable: return kNotComposable;
    case ErrorCode::Timeout: return kTimeout;
    case ErrorCode::StepLimit: return kStepLimit;
    default: return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Service composition by linear-logic proof search and pi-calculus simulation", "llweave"};
  app.require_subcommand(1);
  RunConfig config;

  auto* compose = app.add_subcommand("compose", "Prove the request from the registry and print the composition");
  add_inputs(compose, config);
  compose->add_option("--format", config.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "json", "dot"}));
  compose->add_option("--out", config.out_dir, "Directory for proof.json, process.txt and services.txt");

  auto* simulate = app.add_subcommand("simulate", "Run the instantiated composition and print its trace");
  add_inputs(simulate, config);
  add_policy(simulate, config);
  simulate->add_option("--format", config.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "json"}));

  auto* serve = app.add_subcommand("serve", "Serve the step protocol for the instantiated composition");
  add_inputs(serve, config);
  serve->add_option("--port", config.port, "Local port (0 picks one)")->capture_default_str()->check(CLI::Range(0, 65535));
  serve->add_option("--omit-stub", config.omit_stubs, "Leave out the stub of a service");

  auto* dot = app.add_subcommand("export-dot", "Print the interaction graph as DOT");
  add_inputs(dot, config);
  add_policy(dot, config);
  dot->add_option("--at-step", config.at_step, "Advance this many reductions first")->capture_default_str();
  dot->add_option("--format", config.format, "Output format")->check(CLI::IsMember({"dot"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compose) return cmd_compose(config);
    if (*simulate) return cmd_simulate(config);
    if (*serve) return cmd_serve(config);
    if (*dot) return cmd_export_dot(config);
  } catch (const composer::SearchError& e) {
    log(Level::Error, e.what());
    return exit_for(e);
  } catch (const Error& e) {
    log(Level::Error, std::string(to_string(e.code())) + ": " + e.what());
    return exit_for(e);
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return kFailure;
  }
  return kFailure;
}
