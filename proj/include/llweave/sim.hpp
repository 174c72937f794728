#pragma once

// Execution of instantiated compositions: batch runs under a scheduling
// policy, single steps, edge reports and trace export.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llweave/pi.hpp"
#include "llweave/services.hpp"

namespace llweave::sim {

// Origin given to prefixes that no definition claims.
inline constexpr std::string_view kCompositionOrigin = "composition";

struct FiredEvent {
  std::size_t step = 0;
  ChannelName channel;
  std::string sender_origin;
  std::string receiver_origin;
  pi::Names payload;
};

struct SimState {
  pi::Process term;
  std::size_t step_index = 0;
  std::vector<FiredEvent> history;
  // Redex index chosen at each step; replaying them reproduces the state.
  std::vector<std::size_t> picks;
  std::string digest;
};

enum class Terminal { Terminated, Stuck };
std::string_view to_string(Terminal t);

// FNV-1a 64 of the canonical print, as 16 hex digits.
std::string digest(const pi::Process& p);

// Replaces every Ref by its definition's body with parameters substituted by
// the arguments. Prefixes of each body carry the definition name as origin;
// the remaining ones are labelled "composition".
pi::Process instantiate(const pi::Process& composition, const std::vector<services::ProcessDef>& defs);

// client(args) | composition, fully instantiated.
pi::Process assemble(const pi::Process& composition, const services::ProcessDef& client,
                     const std::vector<services::ProcessDef>& stubs);

SimState initial_state(const pi::Process& term);
// Fires enabled_redexes(state.term)[redex_id].
SimState step(const SimState& state, std::size_t redex_id);

class Policy {
 public:
  enum class Kind { First, Random, Script };

  static Policy first() { return Policy(Kind::First, 0, {}); }
  static Policy random(std::uint64_t seed) { return Policy(Kind::Random, seed, {}); }
  // Uses the listed indices in order, then falls back to the first redex.
  static Policy script(std::vector<std::size_t> picks) { return Policy(Kind::Script, 0, std::move(picks)); }

  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::size_t>& picks() const { return picks_; }

 private:
  Policy(Kind k, std::uint64_t seed, std::vector<std::size_t> picks)
      : kind_(k), seed_(seed), picks_(std::move(picks)) {}
  Kind kind_;
  std::uint64_t seed_;
  std::vector<std::size_t> picks_;
};

struct RunResult {
  pi::Process initial;
  std::vector<FiredEvent> events;
  Terminal terminal = Terminal::Stuck;
  SimState final_state;
  // Digest of the initial state, then one per event.
  std::vector<std::string> digests;
};

inline constexpr std::size_t kDefaultStepLimit = 10000;

RunResult run(const pi::Process& initial, const Policy& policy, std::size_t step_limit = kDefaultStepLimit);
// At most `steps` reductions under `policy`; never throws StepLimit.
SimState run_steps(const pi::Process& initial, const Policy& policy, std::size_t steps);

struct Edge {
  std::size_t id = 0;  // index into enabled_redexes for enabled edges
  ChannelName channel;
  std::string from;  // sender origin
  std::string to;    // receiver origin
};

struct EdgeReport {
  std::vector<Edge> enabled;
  // Output/input pairs bound to the same channel where a guard blocks them.
  std::vector<Edge> blocked;
};

EdgeReport edge_report(const pi::Process& term);

struct Component {
  std::string origin;
  std::string text;
};

// Top-level parallel components under any outer restrictions.
std::vector<Component> components(const pi::Process& term);

nlohmann::json event_to_json(const FiredEvent& e);
nlohmann::json trace_to_json(const RunResult& r);
// State document of the step protocol.
nlohmann::json state_to_json(const SimState& s);
std::string edge_report_to_dot(const EdgeReport& report);

}  // namespace llweave::sim
