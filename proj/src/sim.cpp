#include "llweave/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "llweave/error.hpp"

namespace llweave::sim {

using pi::Kind;
using pi::Process;

std::string_view to_string(Terminal t) { return t == Terminal::Terminated ? "terminated" : "stuck"; }

std::string digest(const Process& p) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : pi::canonical_form(p)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Renames binders that appear in `avoid`, so substituted bodies cannot have
// their free names captured.
Process freshen_binders(const Process& p, const ChannelSet& avoid, ChannelSet& used) {
  auto rebind = [&](const pi::Names& names, const Process& body) {
    pi::Names out;
    pi::Substitution map;
    for (const auto& n : names) {
      if (avoid.contains(n)) {
        ChannelSet taken = used;
        taken.insert(avoid.begin(), avoid.end());
        ChannelName f = fresh_variant(n, taken);
        used.insert(f);
        map.emplace(n, f);
        out.push_back(f);
      } else {
        out.push_back(n);
      }
    }
    return std::pair{out, freshen_binders(pi::substitute(body, map), avoid, used)};
  };
  switch (p.kind()) {
    case Kind::Nil:
    case Kind::Ref: return p;
    case Kind::Input: {
      auto [params, body] = rebind(p.names(), p.body());
      return Process::input(p.channel(), params, body, p.origin());
    }
    case Kind::Output:
      return Process::output(p.channel(), p.names(), freshen_binders(p.body(), avoid, used), p.origin());
    case Kind::Parallel:
      return Process::parallel(freshen_binders(p.left(), avoid, used), freshen_binders(p.right(), avoid, used));
    case Kind::Sum:
      return Process::sum(freshen_binders(p.left(), avoid, used), freshen_binders(p.right(), avoid, used));
    case Kind::Restrict: {
      auto [names, body] = rebind(p.names(), p.body());
      return Process::restrict(names, body);
    }
    case Kind::Replicate: return Process::replicate(freshen_binders(p.body(), avoid, used));
  }
  return p;
}

Process expand_refs(const Process& p, const std::map<std::string, const services::ProcessDef*>& defs, int depth) {
  switch (p.kind()) {
    case Kind::Nil: return p;
    case Kind::Ref: {
      auto it = defs.find(p.ref_name());
      if (it == defs.end()) throw Error(ErrorCode::UnknownRef, "no definition for '" + p.ref_name() + "'");
      const auto& def = *it->second;
      if (def.params.size() != p.names().size()) {
        throw Error(ErrorCode::ArityMismatch, p.ref_name() + " expects " + std::to_string(def.params.size()) +
                                                  " arguments, got " + std::to_string(p.names().size()));
      }
      if (depth > 64) throw Error(ErrorCode::InvalidArgument, "definitions nest too deeply at " + def.name);
      pi::Substitution map;
      for (std::size_t i = 0; i < def.params.size(); ++i) map.emplace(def.params[i], p.names()[i]);
      return expand_refs(pi::substitute(def.body, map).relabeled(def.name), defs, depth + 1);
    }
    case Kind::Input: return Process::input(p.channel(), p.names(), expand_refs(p.body(), defs, depth), p.origin());
    case Kind::Output: return Process::output(p.channel(), p.names(), expand_refs(p.body(), defs, depth), p.origin());
    case Kind::Parallel:
      return Process::parallel(expand_refs(p.left(), defs, depth), expand_refs(p.right(), defs, depth));
    case Kind::Sum: return Process::sum(expand_refs(p.left(), defs, depth), expand_refs(p.right(), defs, depth));
    case Kind::Restrict: return Process::restrict(p.names(), expand_refs(p.body(), defs, depth));
    case Kind::Replicate: return Process::replicate(expand_refs(p.body(), defs, depth));
  }
  return p;
}

Process label_unclaimed(const Process& p) {
  const std::string origin(kCompositionOrigin);
  auto own = [&](const Process& q) { return q.origin().empty() ? origin : q.origin(); };
  switch (p.kind()) {
    case Kind::Nil:
    case Kind::Ref: return p;
    case Kind::Input: return Process::input(p.channel(), p.names(), label_unclaimed(p.body()), own(p));
    case Kind::Output: return Process::output(p.channel(), p.names(), label_unclaimed(p.body()), own(p));
    case Kind::Parallel: return Process::parallel(label_unclaimed(p.left()), label_unclaimed(p.right()));
    case Kind::Sum: return Process::sum(label_unclaimed(p.left()), label_unclaimed(p.right()));
    case Kind::Restrict: return Process::restrict(p.names(), label_unclaimed(p.body()));
    case Kind::Replicate: return Process::replicate(label_unclaimed(p.body()));
  }
  return p;
}

std::string origin_or_default(const std::string& o) { return o.empty() ? std::string(kCompositionOrigin) : o; }

SimState advance(const SimState& state, const std::vector<pi::Redex>& redexes, std::size_t id) {
  if (id >= redexes.size()) {
    throw Error(ErrorCode::InvalidRedexId, "redex " + std::to_string(id) + " is not enabled (" +
                                               std::to_string(redexes.size()) + " available)");
  }
  pi::Firing f = pi::fire_detailed(state.term, redexes[id]);
  SimState next = state;
  next.term = f.result;
  next.step_index = state.step_index + 1;
  next.history.push_back(FiredEvent{next.step_index, f.channel, origin_or_default(f.sender_origin),
                                    origin_or_default(f.receiver_origin), f.payload});
  next.picks.push_back(id);
  next.digest = digest(next.term);
  return next;
}

bool is_prefix_path(const pi::Path& a, const pi::Path& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

std::string first_origin(const Process& p) {
  if (p.is_prefix() && !p.origin().empty()) return p.origin();
  switch (p.kind()) {
    case Kind::Input:
    case Kind::Output:
    case Kind::Restrict:
    case Kind::Replicate: return first_origin(p.body());
    case Kind::Parallel:
    case Kind::Sum: {
      std::string l = first_origin(p.left());
      return l.empty() ? first_origin(p.right()) : l;
    }
    default: return {};
  }
}

void collect_components(const Process& p, std::vector<Component>& out) {
  switch (p.kind()) {
    case Kind::Nil: return;
    case Kind::Parallel:
      collect_components(p.left(), out);
      collect_components(p.right(), out);
      return;
    case Kind::Restrict: collect_components(p.body(), out); return;
    default: out.push_back(Component{origin_or_default(first_origin(p)), pi::print_process(p)});
  }
}

nlohmann::json names_json(const pi::Names& names) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& n : names) out.push_back(n.str());
  return out;
}

nlohmann::json edge_json(const Edge& e, bool with_id) {
  nlohmann::json j{{"channel", e.channel.str()}, {"from", e.from}, {"to", e.to}};
  if (with_id) j["id"] = e.id;
  return j;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Process instantiate(const Process& composition, const std::vector<services::ProcessDef>& defs) {
  std::map<std::string, const services::ProcessDef*> by_name;
  ChannelSet constants;
  for (const auto& d : defs) {
    by_name.emplace(d.name, &d);
    constants.insert(d.constants.begin(), d.constants.end());
  }
  ChannelSet used = pi::all_names(composition);
  Process safe = freshen_binders(composition, constants, used);
  return label_unclaimed(expand_refs(safe, by_name, 0));
}

Process assemble(const Process& composition, const services::ProcessDef& client,
                 const std::vector<services::ProcessDef>& stubs) {
  std::vector<services::ProcessDef> defs = stubs;
  defs.push_back(client);
  return instantiate(Process::parallel(Process::ref(client.name, client.params), composition), defs);
}

SimState initial_state(const Process& term) {
  SimState s;
  s.term = term;
  s.digest = digest(term);
  return s;
}

SimState step(const SimState& state, std::size_t redex_id) {
  return advance(state, pi::enabled_redexes(state.term), redex_id);
}

namespace {

// Fires up to `limit` redexes chosen by `policy`; `exhausted` is set when
// redexes were still enabled at the limit.
SimState drive(const Process& initial, const Policy& policy, std::size_t limit, std::vector<std::string>* digests,
               bool& exhausted) {
  SimState s = initial_state(initial);
  if (digests) digests->push_back(s.digest);
  std::mt19937_64 rng(policy.seed());
  exhausted = false;
  for (;;) {
    auto redexes = pi::enabled_redexes(s.term);
    if (redexes.empty()) break;
    if (s.step_index >= limit) {
      exhausted = true;
      break;
    }
    std::size_t pick = 0;
    if (policy.kind() == Policy::Kind::Random) {
      pick = std::uniform_int_distribution<std::size_t>(0, redexes.size() - 1)(rng);
    } else if (policy.kind() == Policy::Kind::Script && s.step_index < policy.picks().size()) {
      pick = policy.picks()[s.step_index];
    }
    s = advance(s, redexes, pick);
    if (digests) digests->push_back(s.digest);
  }
  return s;
}

}  // namespace

RunResult run(const Process& initial, const Policy& policy, std::size_t step_limit) {
  RunResult r;
  r.initial = initial;
  bool exhausted = false;
  SimState s = drive(initial, policy, step_limit, &r.digests, exhausted);
  if (exhausted) throw Error(ErrorCode::StepLimit, "step limit of " + std::to_string(step_limit) + " reached");
  r.events = s.history;
  r.terminal = pi::struct_congruent(s.term, Process::nil()) ? Terminal::Terminated : Terminal::Stuck;
  r.final_state = std::move(s);
  return r;
}

SimState run_steps(const Process& initial, const Policy& policy, std::size_t steps) {
  bool exhausted = false;
  return drive(initial, policy, steps, nullptr, exhausted);
}

EdgeReport edge_report(const Process& term) {
  EdgeReport report;
  auto redexes = pi::enabled_redexes(term);
  for (std::size_t i = 0; i < redexes.size(); ++i) {
    const auto& r = redexes[i];
    report.enabled.push_back(Edge{i, r.channel, origin_or_default(pi::subterm_at(term, r.sender_path).origin()),
                                  origin_or_default(pi::subterm_at(term, r.receiver_path).origin())});
  }
  auto sites = pi::prefix_sites(term);
  std::set<std::tuple<ChannelName, std::string, std::string>> seen;
  for (const auto& out : sites) {
    if (!out.output) continue;
    for (const auto& in : sites) {
      if (in.output || in.channel != out.channel || in.scope != out.scope) continue;
      if (!out.guarded && !in.guarded) continue;
      if (is_prefix_path(out.path, in.path) || is_prefix_path(in.path, out.path)) continue;
      std::string from = origin_or_default(out.origin), to = origin_or_default(in.origin);
      if (!seen.emplace(out.channel, from, to).second) continue;
      report.blocked.push_back(Edge{report.blocked.size(), out.channel, from, to});
    }
  }
  return report;
}

std::vector<Component> components(const Process& term) {
  std::vector<Component> out;
  collect_components(term, out);
  return out;
}

nlohmann::json event_to_json(const FiredEvent& e) {
  return {{"step", e.step},
          {"channel", e.channel.str()},
          {"from", e.sender_origin},
          {"to", e.receiver_origin},
          {"payload", names_json(e.payload)}};
}

nlohmann::json trace_to_json(const RunResult& r) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : r.events) events.push_back(event_to_json(e));
  return {{"initial", pi::print_process(r.initial)},
          {"events", events},
          {"terminal", to_string(r.terminal)},
          {"digests", r.digests}};
}

nlohmann::json state_to_json(const SimState& s) {
  nlohmann::json processes = nlohmann::json::array();
  for (const auto& c : components(s.term)) processes.push_back({{"origin", c.origin}, {"text", c.text}});
  EdgeReport report = edge_report(s.term);
  nlohmann::json enabled = nlohmann::json::array(), blocked = nlohmann::json::array();
  for (const auto& e : report.enabled) enabled.push_back(edge_json(e, true));
  for (const auto& e : report.blocked) blocked.push_back(edge_json(e, false));
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.history) events.push_back(event_to_json(e));
  std::string status = "running";
  if (report.enabled.empty()) {
    status = std::string(to_string(pi::struct_congruent(s.term, Process::nil()) ? Terminal::Terminated
                                                                                 : Terminal::Stuck));
  }
  return {{"processes", processes}, {"enabled", enabled},          {"blocked", blocked},
          {"step_index", s.step_index}, {"digest", s.digest}, {"status", status},
          {"events", events}};
}

std::string edge_report_to_dot(const EdgeReport& report) {
  std::string out = "digraph interactions {\n  node [shape=box];\n";
  std::set<std::string> nodes;
  for (const auto* list : {&report.enabled, &report.blocked}) {
    for (const auto& e : *list) {
      nodes.insert(e.from);
      nodes.insert(e.to);
    }
  }
  for (const auto& n : nodes) out += "  " + dot_quote(n) + ";\n";
  for (const auto& e : report.enabled) {
    out += "  " + dot_quote(e.from) + " -> " + dot_quote(e.to) + " [label=" + dot_quote(e.channel.str()) +
           ", color=black, style=solid];\n";
  }
  for (const auto& e : report.blocked) {
    out += "  " + dot_quote(e.from) + " -> " + dot_quote(e.to) + " [label=" + dot_quote(e.channel.str()) +
           ", color=grey, style=dashed];\n";
  }
  return out + "}\n";
}

}  // namespace llweave::sim
