#include <algorithm>
#include <numeric>

#include "llweave/pi.hpp"

namespace llweave::pi {

namespace {

// Renames every binder to a name used nowhere else in the term, so scope
// extrusion and flattening never need further renaming.
Process uniquify(const Process& p, const Substitution& env, ChannelSet& avoid) {
  auto bind = [&](const Names& names, Substitution& inner) {
    Names out;
    for (const auto& n : names) {
      ChannelName fresh = fresh_variant(n, avoid);
      avoid.insert(fresh);
      inner[n] = fresh;
      out.push_back(fresh);
    }
    return out;
  };
  auto map_name = [&](const ChannelName& c) {
    auto it = env.find(c);
    return it == env.end() ? c : it->second;
  };
  auto map_names = [&](const Names& ns) {
    Names out;
    for (const auto& c : ns) out.push_back(map_name(c));
    return out;
  };
  switch (p.kind()) {
    case Kind::Nil: return p;
    case Kind::Input: {
      Substitution inner = env;
      Names params = bind(p.names(), inner);
      return Process::input(map_name(p.channel()), params, uniquify(p.body(), inner, avoid));
    }
    case Kind::Output:
      return Process::output(map_name(p.channel()), map_names(p.names()), uniquify(p.body(), env, avoid));
    case Kind::Parallel:
      return Process::parallel(uniquify(p.left(), env, avoid), uniquify(p.right(), env, avoid));
    case Kind::Sum: return Process::sum(uniquify(p.left(), env, avoid), uniquify(p.right(), env, avoid));
    case Kind::Restrict: {
      Substitution inner = env;
      Names names = bind(p.names(), inner);
      return Process::restrict(names, uniquify(p.body(), inner, avoid));
    }
    case Kind::Replicate: return Process::replicate(uniquify(p.body(), env, avoid));
    case Kind::Ref: return Process::ref(p.ref_name(), map_names(p.names()));
  }
  return p;
}

struct StdForm {
  Names restricted;
  std::vector<Process> comps;  // prefixes, sums, replications, references
};

Process to_process(const StdForm& sf) {
  Process body = Process::parallel_all(sf.comps);
  if (sf.restricted.empty() || body.is_nil()) return body;
  return Process::restrict(sf.restricted, body);
}

StdForm normalize(const Process& p);

Process normalized(const Process& p) { return to_process(normalize(p)); }

void flatten_sum(const Process& p, std::vector<Process>& out) {
  if (p.kind() == Kind::Sum) {
    flatten_sum(p.left(), out);
    flatten_sum(p.right(), out);
  } else {
    out.push_back(p);
  }
}

StdForm normalize(const Process& p) {
  switch (p.kind()) {
    case Kind::Nil: return {};
    case Kind::Parallel: {
      StdForm a = normalize(p.left());
      StdForm b = normalize(p.right());
      a.restricted.insert(a.restricted.end(), b.restricted.begin(), b.restricted.end());
      a.comps.insert(a.comps.end(), b.comps.begin(), b.comps.end());
      return a;
    }
    case Kind::Restrict: {
      StdForm inner = normalize(p.body());
      ChannelSet fn;
      for (const auto& c : inner.comps) fn.insert(c.free_names().begin(), c.free_names().end());
      for (const auto& n : p.names()) {
        if (fn.contains(n)) inner.restricted.push_back(n);
      }
      return inner;
    }
    case Kind::Sum: {
      std::vector<Process> summands;
      flatten_sum(p, summands);
      std::vector<Process> kept;
      for (const auto& s : summands) {
        Process n = normalized(s);
        if (!n.is_nil()) kept.push_back(n);
      }
      if (kept.empty()) return {};
      if (kept.size() == 1) return normalize(kept.front());
      Process acc = kept.front();
      for (std::size_t i = 1; i < kept.size(); ++i) acc = Process::sum(acc, kept[i]);
      return StdForm{{}, {acc}};
    }
    case Kind::Input:
      return StdForm{{}, {Process::input(p.channel(), p.names(), normalized(p.body()))}};
    case Kind::Output:
      return StdForm{{}, {Process::output(p.channel(), p.names(), normalized(p.body()))}};
    case Kind::Replicate: return StdForm{{}, {Process::replicate(normalized(p.body()))}};
    case Kind::Ref: return StdForm{{}, {p}};
  }
  return {};
}

StdForm decompose(const Process& normalized_term) {
  StdForm sf;
  const Process* cur = &normalized_term;
  if (cur->kind() == Kind::Restrict) {
    sf.restricted = cur->names();
    cur = &cur->body();
  }
  std::vector<const Process*> stack{cur};
  while (!stack.empty()) {
    const Process* t = stack.back();
    stack.pop_back();
    if (t->kind() == Kind::Parallel) {
      stack.push_back(&t->right());
      stack.push_back(&t->left());
    } else if (!t->is_nil()) {
      sf.comps.push_back(*t);
    }
  }
  return sf;
}

struct Namer {
  std::map<ChannelName, std::string> bound;
  std::map<ChannelName, int> pending;  // restricted name -> depth of its scope
  std::map<int, int> counter;
  bool peek = false;

  std::string name(const ChannelName& c) {
    if (auto it = bound.find(c); it != bound.end()) return it->second;
    if (auto it = pending.find(c); it != pending.end()) {
      if (peek) return "?";
      std::string canon = "#r" + std::to_string(it->second) + "." + std::to_string(counter[it->second]++);
      bound[c] = canon;
      pending.erase(it);
      return canon;
    }
    return c.str();
  }
};

constexpr std::size_t kMaxOrderings = 720;

class Canonicalizer {
 public:
  explicit Canonicalizer(int unfold_bound) : unfold_bound_(unfold_bound) {}

  std::string render(const Process& normalized_term, Namer& namer, int depth) {
    StdForm sf = decompose(normalized_term);
    for (const auto& r : sf.restricted) namer.pending[r] = depth;
    const Names declared = sf.restricted;

    std::vector<std::string> keys;
    for (const auto& c : sf.comps) keys.push_back(peek_key(c, namer, depth));
    absorb_replicated_copies(sf, keys, namer, depth);

    std::vector<std::size_t> order(sf.comps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });

    // Components with equal masked keys may still differ once restricted
    // names are numbered; try every arrangement of each tie group.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::size_t orderings = 1;
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j < order.size() && keys[order[j]] == keys[order[i]]) ++j;
      if (j - i > 1) {
        groups.emplace_back(i, j);
        for (std::size_t k = 2; k <= j - i && orderings <= kMaxOrderings; ++k) orderings *= k;
      }
      i = j;
    }
    if (orderings > kMaxOrderings) groups.clear();

    std::string best;
    Namer best_namer;
    bool first = true;
    while (true) {
      Namer trial = namer;
      std::string body;
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (i) body += " | ";
        body += render_comp(sf.comps[order[i]], trial, depth);
      }
      if (first || body < best) {
        best = std::move(body);
        best_namer = std::move(trial);
        first = false;
      }
      // Odometer over the tie groups.
      std::size_t g = 0;
      for (; g < groups.size(); ++g) {
        auto begin = order.begin() + static_cast<std::ptrdiff_t>(groups[g].first);
        auto end = order.begin() + static_cast<std::ptrdiff_t>(groups[g].second);
        if (std::next_permutation(begin, end)) break;
      }
      if (g == groups.size()) break;
    }
    namer = std::move(best_namer);
    for (const auto& r : declared) namer.pending.erase(r);

    if (sf.comps.empty()) return "0";
    if (sf.restricted.empty()) return best;
    return "nu" + std::to_string(sf.restricted.size()) + "(" + best + ")";
  }

 private:
  std::string peek_key(const Process& comp, const Namer& namer, int depth) {
    Namer m = namer;
    m.peek = true;
    return render_comp(comp, m, depth);
  }

  // P | !P = !P, at most unfold_bound_ times per replication. A copy of a
  // body with restrictions appears with those names extruded to this level;
  // it is absorbed only when no other component shares them.
  void absorb_replicated_copies(StdForm& sf, std::vector<std::string>& keys, const Namer& namer, int depth) {
    auto& comps = sf.comps;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (comps[i].kind() != Kind::Replicate) continue;
      StdForm body = decompose(comps[i].body());
      if (body.comps.empty()) continue;
      Namer masked = namer;
      for (const auto& r : body.restricted) masked.pending[r] = depth;
      std::vector<std::string> body_keys;
      for (const auto& c : body.comps) body_keys.push_back(peek_key(c, masked, depth));
      for (int round = 0; round < unfold_bound_; ++round) {
        std::vector<std::size_t> hit;
        for (const auto& bk : body_keys) {
          for (std::size_t j = 0; j < comps.size(); ++j) {
            if (j == i || keys[j] != bk || std::find(hit.begin(), hit.end(), j) != hit.end()) continue;
            hit.push_back(j);
            break;
          }
        }
        if (hit.size() != body_keys.size()) break;
        ChannelSet extruded;
        for (auto j : hit) {
          for (const auto& n : comps[j].free_names()) {
            if (std::find(sf.restricted.begin(), sf.restricted.end(), n) != sf.restricted.end()) extruded.insert(n);
          }
        }
        if (extruded.size() != body.restricted.size()) break;
        bool shared = false;
        for (std::size_t j = 0; j < comps.size() && !shared; ++j) {
          if (std::find(hit.begin(), hit.end(), j) != hit.end()) continue;
          for (const auto& n : extruded) shared = shared || comps[j].free_names().contains(n);
        }
        if (shared) break;
        std::erase_if(sf.restricted, [&](const ChannelName& n) { return extruded.contains(n); });
        std::sort(hit.rbegin(), hit.rend());
        for (auto j : hit) {
          comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(j));
          keys.erase(keys.begin() + static_cast<std::ptrdiff_t>(j));
          if (j < i) --i;
        }
      }
    }
  }

  std::string names_of(const Names& ns, Namer& namer) {
    std::string out;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (i) out += ',';
      out += namer.name(ns[i]);
    }
    return out;
  }

  std::string render_comp(const Process& c, Namer& namer, int depth) {
    switch (c.kind()) {
      case Kind::Input: {
        std::string chan = namer.name(c.channel());
        std::string params;
        for (std::size_t i = 0; i < c.names().size(); ++i) {
          std::string canon = "#p" + std::to_string(depth) + "." + std::to_string(i);
          namer.bound[c.names()[i]] = canon;
          if (i) params += ',';
          params += canon;
        }
        return chan + "(" + params + ")." + render(c.body(), namer, depth + 1);
      }
      case Kind::Output: {
        std::string head = namer.name(c.channel()) + "<" + names_of(c.names(), namer) + ">.";
        return head + render(c.body(), namer, depth + 1);
      }
      case Kind::Sum: {
        std::vector<Process> summands;
        flatten_sum(c, summands);
        std::vector<std::pair<std::string, std::size_t>> keyed;
        for (std::size_t i = 0; i < summands.size(); ++i) {
          Namer m = namer;
          m.peek = true;
          keyed.emplace_back(render(summands[i], m, depth + 1), i);
        }
        std::sort(keyed.begin(), keyed.end());
        std::string out = "(";
        for (std::size_t i = 0; i < keyed.size(); ++i) {
          if (i) out += " + ";
          out += render(summands[keyed[i].second], namer, depth + 1);
        }
        return out + ")";
      }
      case Kind::Replicate: return "!(" + render(c.body(), namer, depth + 1) + ")";
      case Kind::Ref: return c.ref_name() + "(" + names_of(c.names(), namer) + ")";
      default: return render(c, namer, depth);
    }
  }

  int unfold_bound_;
};

}  // namespace

std::string canonical_form(const Process& p, int unfold_bound) {
  ChannelSet avoid = all_names(p);
  Process unique = uniquify(p, {}, avoid);
  Namer namer;
  return Canonicalizer(unfold_bound).render(normalized(unique), namer, 0);
}

bool struct_congruent(const Process& p, const Process& q, int unfold_bound) {
  return canonical_form(p, unfold_bound) == canonical_form(q, unfold_bound);
}

bool congruent_up_to_renaming(const Process& p, const Process& q, int unfold_bound) {
  auto close = [](const Process& t) {
    const auto& fn = t.free_names();
    if (fn.empty()) return t;
    return Process::restrict(Names(fn.begin(), fn.end()), t);
  };
  return struct_congruent(close(p), close(q), unfold_bound);
}

}  // namespace llweave::pi
