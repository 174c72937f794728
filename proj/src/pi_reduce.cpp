#include <algorithm>
#include <functional>

#include "llweave/error.hpp"
#include "llweave/pi.hpp"

namespace llweave::pi {

namespace {

struct Active {
  Path path;
  bool output;
  ChannelName chan;
  long scope;
  std::size_t arity;
};

using Scopes = std::map<ChannelName, long>;

long resolve(const Scopes& scopes, const ChannelName& c) {
  auto it = scopes.find(c);
  return it == scopes.end() ? -1 : it->second;
}

void collect_active(const Process& p, Path& path, Scopes& scopes, long& next_scope, bool in_sum,
                    std::vector<Active>& out) {
  switch (p.kind()) {
    case Kind::Input:
    case Kind::Output:
      out.push_back(Active{path, p.kind() == Kind::Output, p.channel(), resolve(scopes, p.channel()),
                           p.names().size()});
      return;
    case Kind::Parallel:
      if (in_sum) return;  // only prefix summands are unguarded
      for (std::uint8_t i = 0; i < 2; ++i) {
        path.push_back(i);
        collect_active(i == 0 ? p.left() : p.right(), path, scopes, next_scope, false, out);
        path.pop_back();
      }
      return;
    case Kind::Sum:
      for (std::uint8_t i = 0; i < 2; ++i) {
        path.push_back(i);
        collect_active(i == 0 ? p.left() : p.right(), path, scopes, next_scope, true, out);
        path.pop_back();
      }
      return;
    case Kind::Restrict: {
      if (in_sum) return;
      Scopes saved = scopes;
      for (const auto& n : p.names()) scopes[n] = next_scope++;
      path.push_back(0);
      collect_active(p.body(), path, scopes, next_scope, false, out);
      path.pop_back();
      scopes = std::move(saved);
      return;
    }
    default: return;
  }
}

Path common_prefix(const Path& a, const Path& b) {
  Path out;
  for (std::size_t i = 0; i < a.size() && i < b.size() && a[i] == b[i]; ++i) out.push_back(a[i]);
  return out;
}

}  // namespace

std::vector<Redex> enabled_redexes(const Process& p) {
  std::vector<Active> active;
  Path path;
  Scopes scopes;
  long next_scope = 0;
  collect_active(p, path, scopes, next_scope, false, active);

  std::vector<Redex> out;
  for (const auto& s : active) {
    if (!s.output) continue;
    for (const auto& r : active) {
      if (r.output || r.chan != s.chan || r.scope != s.scope || r.arity != s.arity) continue;
      Path lca = common_prefix(s.path, r.path);
      if (lca.size() == s.path.size() || lca.size() == r.path.size()) continue;
      if (subterm_at(p, lca).kind() != Kind::Parallel) continue;
      out.push_back(Redex{s.chan, s.path, r.path, s.arity});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Extrusion {
  ChannelSet avoid;            // every name already in use
  const ChannelSet* fn_lca;    // free names of the redex's parallel node
  ChannelSet taken;            // names already lifted to the parallel node
  Names lifted;
};

// Walks from a child of the parallel node down to the sum context holding
// the prefix at `path`, lifting restrictions out of the way. The sum context
// is replaced by `continue_with(prefix)`.
Process lift_and_replace(const Process& node, const Path& path, std::size_t i, Extrusion& ex,
                         const std::function<Process(const Process&)>& continue_with) {
  switch (node.kind()) {
    case Kind::Restrict: {
      Substitution rename;
      for (const auto& n : node.names()) {
        ChannelName lifted = n;
        if (ex.fn_lca->contains(n) || ex.taken.contains(n)) {
          lifted = fresh_variant(n, ex.avoid);
          ex.avoid.insert(lifted);
          rename[n] = lifted;
        }
        ex.taken.insert(lifted);
        ex.lifted.push_back(lifted);
      }
      Process body = rename.empty() ? node.body() : substitute(node.body(), rename);
      return lift_and_replace(body, path, i + 1, ex, continue_with);
    }
    case Kind::Parallel: {
      Process child = lift_and_replace(path[i] == 0 ? node.left() : node.right(), path, i + 1, ex,
                                       continue_with);
      return path[i] == 0 ? Process::parallel(child, node.right()) : Process::parallel(node.left(), child);
    }
    default: {
      // Sum chain (possibly empty) ending at the prefix.
      Path rest(path.begin() + static_cast<std::ptrdiff_t>(i), path.end());
      return continue_with(subterm_at(node, rest));
    }
  }
}

}  // namespace

Firing fire_detailed(const Process& p, const Redex& r) {
  auto enabled = enabled_redexes(p);
  if (std::find(enabled.begin(), enabled.end(), r) == enabled.end()) {
    throw Error(ErrorCode::StaleRedex, "redex on '" + r.channel.str() + "' is not enabled");
  }
  const Process& sender = subterm_at(p, r.sender_path);
  const Process& receiver = subterm_at(p, r.receiver_path);

  Path lca = common_prefix(r.sender_path, r.receiver_path);
  const Process& par = subterm_at(p, lca);
  std::size_t depth = lca.size();
  std::uint8_t sender_side = r.sender_path[depth];

  Extrusion ex{all_names(p), &par.free_names(), {}, {}};
  Names args;
  Process sender_child = lift_and_replace(
      sender_side == 0 ? par.left() : par.right(), r.sender_path, depth + 1, ex,
      [&](const Process& prefix) {
        args = prefix.names();
        return prefix.body();
      });
  Process receiver_child = lift_and_replace(
      sender_side == 0 ? par.right() : par.left(), r.receiver_path, depth + 1, ex,
      [&](const Process& prefix) {
        Substitution m;
        for (std::size_t k = 0; k < args.size(); ++k) m[prefix.names()[k]] = args[k];
        // Params are bound in the body, so route through a restriction-free
        // binder-aware substitution.
        return substitute(prefix.body(), m);
      });

  Process joined = sender_side == 0 ? Process::parallel(sender_child, receiver_child)
                                    : Process::parallel(receiver_child, sender_child);
  if (!ex.lifted.empty()) joined = Process::restrict(ex.lifted, joined);

  Firing f;
  f.result = prune(replace_at(p, lca, joined));
  f.channel = r.channel;
  f.payload = sender.names();
  f.sender_origin = sender.origin();
  f.receiver_origin = receiver.origin();
  return f;
}

Process fire(const Process& p, const Redex& r) { return fire_detailed(p, r).result; }

namespace {

void collect_sites(const Process& p, Path& path, Scopes& scopes, long& next_scope, bool guarded,
                   std::vector<PrefixSite>& out) {
  auto descend = [&](const Process& child, std::uint8_t idx, bool g) {
    path.push_back(idx);
    collect_sites(child, path, scopes, next_scope, g, out);
    path.pop_back();
  };
  switch (p.kind()) {
    case Kind::Input:
    case Kind::Output: {
      out.push_back(PrefixSite{path, p.kind() == Kind::Output, p.channel(), resolve(scopes, p.channel()),
                               guarded, p.names().size(), p.origin()});
      Scopes saved = scopes;
      if (p.kind() == Kind::Input) {
        for (const auto& n : p.names()) scopes[n] = next_scope++;
      }
      descend(p.body(), 0, true);
      scopes = std::move(saved);
      return;
    }
    case Kind::Parallel:
    case Kind::Sum:
      descend(p.left(), 0, guarded);
      descend(p.right(), 1, guarded);
      return;
    case Kind::Restrict: {
      Scopes saved = scopes;
      for (const auto& n : p.names()) scopes[n] = next_scope++;
      descend(p.body(), 0, guarded);
      scopes = std::move(saved);
      return;
    }
    case Kind::Replicate: descend(p.body(), 0, true); return;
    default: return;
  }
}

}  // namespace

std::vector<PrefixSite> prefix_sites(const Process& p) {
  std::vector<PrefixSite> out;
  Path path;
  Scopes scopes;
  long next_scope = 0;
  collect_sites(p, path, scopes, next_scope, false, out);
  return out;
}

}  // namespace llweave::pi
