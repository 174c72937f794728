#pragma once

// Brute-force observation oracle: a theorem runs against environments that
// offer the dual of each conclusion formula, and every maximal run is
// explored.

#include <functional>
#include <map>
#include <set>

#include "llweave/kernel.hpp"
#include "llweave/services.hpp"
#include "llweave/sim.hpp"

namespace llweave::testing {

// Observation of a run: (receiving binder, payload) pairs. Environment
// binders and payload constants are named by their environment and their
// position in it, so observations compare across harnesses.
using Observation = std::multiset<std::pair<std::string, std::string>>;

struct Harness {
  pi::Process term;
  std::map<ChannelName, std::string> constants;
  std::map<ChannelName, std::string> binders;
};

inline void label_binders(const pi::Process& p, const std::string& env, std::map<ChannelName, std::string>& out) {
  if (p.kind() == pi::Kind::Input) {
    for (const auto& n : p.names()) out.emplace(n, env + "@" + std::to_string(out.size()));
  }
  switch (p.kind()) {
    case pi::Kind::Input:
    case pi::Kind::Output:
    case pi::Kind::Restrict:
    case pi::Kind::Replicate: label_binders(p.body(), env, out); break;
    case pi::Kind::Parallel:
    case pi::Kind::Sum:
      label_binders(p.left(), env, out);
      label_binders(p.right(), env, out);
      break;
    default: break;
  }
}

// The theorem in parallel with, for each entry c:F, an environment offering
// F^ on c. Environment prefixes are labelled "env:c".
inline Harness with_environment(const kernel::Theorem& t) {
  ChannelSet reserved = pi::all_names(t.process());
  for (const auto& c : t.sequent().channels()) reserved.insert(c);
  services::Translator tr(services::TranslateOptions{"e", true, true}, reserved);
  std::vector<pi::Process> parts{t.process()};
  std::map<ChannelName, std::string> labels, binders;
  for (const auto& e : t.sequent().entries()) {
    std::string env = "env:" + e.channel.str();
    std::size_t before = tr.constants().size();
    pi::Process side = tr.translate(e.channel, cll::negate(e.formula)).relabeled(env);
    for (std::size_t i = before; i < tr.constants().size(); ++i) {
      labels[tr.constants()[i]] = env + "#" + std::to_string(i - before);
    }
    std::map<ChannelName, std::string> own;
    label_binders(side, env, own);
    binders.insert(own.begin(), own.end());
    parts.push_back(side);
  }
  return Harness{sim::instantiate(pi::Process::parallel_all(parts), {}), std::move(labels), std::move(binders)};
}

struct Explored {
  std::set<std::pair<Observation, bool>> outcomes;  // (observation, terminated)
  bool truncated = false;
};

// Every maximal run up to `depth` reductions.
inline Explored explore(const Harness& h, std::size_t depth) {
  Explored out;
  // Shallowest depth at which each (state, observation) pair was reached.
  std::map<std::pair<std::string, Observation>, std::size_t> seen;
  std::function<void(const pi::Process&, const Observation&, std::size_t)> go;
  go = [&](const pi::Process& p, const Observation& obs, std::size_t d) {
    auto [it, fresh] = seen.emplace(std::pair{pi::canonical_form(p), obs}, d);
    if (!fresh && it->second <= d) return;
    it->second = d;
    auto redexes = pi::enabled_redexes(p);
    if (redexes.empty()) {
      out.outcomes.emplace(obs, pi::struct_congruent(p, pi::Process::nil()));
      return;
    }
    if (d == depth) {
      out.truncated = true;
      return;
    }
    for (const auto& r : redexes) {
      const pi::Names& params = pi::subterm_at(p, r.receiver_path).names();
      pi::Firing f = pi::fire_detailed(p, r);
      Observation next = obs;
      for (std::size_t i = 0; i < f.payload.size(); ++i) {
        auto it = h.constants.find(f.payload[i]);
        if (it == h.constants.end() || !f.receiver_origin.starts_with("env:")) continue;
        auto slot = h.binders.find(params[i]);
        next.emplace(slot == h.binders.end() ? f.receiver_origin + "@?" : slot->second, it->second);
      }
      go(f.result, next, d + 1);
    }
  };
  go(h.term, {}, 0);
  return out;
}

}  // namespace llweave::testing
