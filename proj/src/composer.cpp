#include "llweave/composer.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>

namespace llweave::composer {

using cll::Connective;
using cll::Formula;
using kernel::Theorem;

namespace {

using Key = std::vector<Formula>;  // sorted formula multiset

Key sorted(Key k) {
  std::sort(k.begin(), k.end());
  return k;
}

Key key_of(const cll::AnnotatedSequent& s) { return sorted(s.formula_multiset()); }

Key with_added(Key k, std::initializer_list<Formula> fs) {
  k.insert(k.end(), fs.begin(), fs.end());
  return sorted(std::move(k));
}

Key without_one(const Key& k, const Formula& f) {
  Key out = k;
  out.erase(std::find(out.begin(), out.end(), f));
  return out;
}

Key difference(const Key& k, const Key& sub) {
  Key out = k;
  for (const auto& f : sub) out.erase(std::find(out.begin(), out.end(), f));
  return out;
}

std::string print_key(const Key& k) {
  std::string out = "⊢ ";
  for (std::size_t i = 0; i < k.size(); ++i) out += (i ? ", " : "") + cll::print_formula(k[i]);
  return out;
}

// Distinct sub-multisets, smallest first.
std::vector<Key> sub_multisets(const Key& k) {
  std::vector<Key> out;
  std::set<Key> seen;
  const std::size_t n = k.size();
  for (std::size_t size = 0; size <= n; ++size) {
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(size), true);
    do {
      Key pick;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) pick.push_back(k[i]);
      }
      if (seen.insert(pick).second) out.push_back(std::move(pick));
    } while (std::prev_permutation(mask.begin(), mask.end()));
  }
  return out;
}

void collect_atoms(const Formula& f, std::set<std::string>& pos, std::set<std::string>& neg) {
  switch (f.kind()) {
    case Connective::PosAtom: pos.insert(f.atom_name()); return;
    case Connective::NegAtom: neg.insert(f.atom_name()); return;
    default:
      collect_atoms(f.left(), pos, neg);
      collect_atoms(f.right(), pos, neg);
  }
}

struct AxiomInfo {
  Key key;
  std::set<std::string> consumes;
  std::set<std::string> produces;
};

enum class Step { Axiom, Id, Par, With, PlusL, PlusR, Tensor, Cut };

struct Plan {
  Step step;
  std::size_t axiom = 0;
  std::optional<Formula> principal;  // the decomposed or cut formula
  Key left;                          // context sent to the first premise of a split
  std::vector<std::shared_ptr<const Plan>> premises;
  int depth = 1;
  int cuts = 0;
};
using PlanPtr = std::shared_ptr<const Plan>;

PlanPtr make_plan(Step step, std::optional<Formula> principal, Key left, std::vector<PlanPtr> premises) {
  auto p = std::make_shared<Plan>();
  p->step = step;
  p->principal = std::move(principal);
  p->left = std::move(left);
  int depth = 0, cuts = 0;
  for (const auto& q : premises) {
    depth = std::max(depth, q->depth);
    cuts = std::max(cuts, q->cuts);
  }
  bool invertible = step == Step::Par || step == Step::With;
  p->depth = invertible ? depth : depth + 1;
  p->cuts = step == Step::Cut ? cuts + 1 : cuts;
  p->premises = std::move(premises);
  return p;
}

class Search {
 public:
  Search(const std::vector<Theorem>& axioms, const SearchLimits& limits)
      : limits_(limits), candidates_(cut_candidates(axioms)), start_(std::chrono::steady_clock::now()) {
    for (const auto& a : axioms) {
      AxiomInfo info;
      info.key = key_of(a.sequent());
      for (const auto& f : info.key) collect_atoms(f, info.produces, info.consumes);
      axioms_.push_back(std::move(info));
    }
  }

  PlanPtr run(const Key& goal) {
    // Fewest cuts first, then shallowest.
    for (int cuts = 0; cuts <= limits_.max_cuts; ++cuts) {
      for (int budget = 1; budget <= limits_.max_depth; ++budget) {
        if (PlanPtr p = solve(goal, budget, cuts, 0)) return p;
      }
    }
    return nullptr;
  }

  std::size_t nodes() const { return nodes_; }
  const std::string& deepest() const { return deepest_; }
  std::chrono::duration<double> elapsed() const { return std::chrono::steady_clock::now() - start_; }

 private:
  struct Memo {
    PlanPtr success;
    std::vector<std::pair<int, int>> failures;
  };

  void check_limits() {
    if (limits_.cancel && limits_.cancel->load()) {
      throw SearchError(ErrorCode::Timeout, "search cancelled", deepest_);
    }
    if ((nodes_ & 0xff) == 1 && elapsed() > limits_.timeout) {
      throw SearchError(ErrorCode::Timeout,
                        "search timed out after " + std::to_string(limits_.timeout.count()) + " ms", deepest_);
    }
  }

  PlanPtr solve(const Key& key, int budget, int cuts, std::size_t level) {
    ++nodes_;
    check_limits();
    Memo& m = memo_[key];
    if (m.success && m.success->depth <= budget && m.success->cuts <= cuts) return m.success;
    for (auto [b, c] : m.failures) {
      if (b >= budget && c >= cuts) return nullptr;
    }
    PlanPtr p = expand(key, budget, cuts, level);
    Memo& after = memo_[key];
    if (p) {
      if (!after.success) after.success = p;
    } else {
      after.failures.emplace_back(budget, cuts);
      if (level >= deepest_level_) {
        deepest_level_ = level;
        deepest_ = print_key(key);
      }
    }
    return p;
  }

  // Cheap necessary condition: every positive atom can be produced from the
  // sequent's own negative atoms through the hypotheses, and every top-level
  // negative atom has some consumer.
  bool plausible(const Key& key) const {
    std::set<std::string> pos, neg;
    for (const auto& f : key) collect_atoms(f, pos, neg);
    std::set<std::string> closure = neg;
    std::vector<bool> fired(axioms_.size(), false);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < axioms_.size(); ++i) {
        if (fired[i]) continue;
        const auto& a = axioms_[i];
        if (std::includes(closure.begin(), closure.end(), a.consumes.begin(), a.consumes.end())) {
          fired[i] = true;
          changed = true;
          closure.insert(a.produces.begin(), a.produces.end());
        }
      }
    }
    auto producible = [&](auto&& self, const Formula& f) -> bool {
      switch (f.kind()) {
        case Connective::PosAtom: return closure.contains(f.atom_name());
        case Connective::NegAtom: return true;
        case Connective::Plus: return self(self, f.left()) || self(self, f.right());
        default: return self(self, f.left()) && self(self, f.right());
      }
    };
    for (const auto& f : key) {
      if (!producible(producible, f)) return false;
      if (f.kind() != Connective::NegAtom || pos.contains(f.atom_name())) continue;
      bool consumed = false;
      for (std::size_t i = 0; i < axioms_.size() && !consumed; ++i) {
        consumed = fired[i] && axioms_[i].consumes.contains(f.atom_name());
      }
      if (!consumed) return false;
    }
    return true;
  }

  PlanPtr expand(const Key& key, int budget, int cuts, std::size_t level) {
    if (budget < 1) return nullptr;
    for (std::size_t i = 0; i < axioms_.size(); ++i) {
      if (axioms_[i].key == key) {
        auto p = std::make_shared<Plan>();
        p->step = Step::Axiom;
        p->axiom = i;
        return p;
      }
    }
    if (key.size() == 2 && key[0].is_atom() && key[1] == cll::negate(key[0])) {
      return make_plan(Step::Id, std::nullopt, {}, {});
    }
    if (!plausible(key)) return nullptr;

    // Invertible rules commit.
    for (const auto& f : key) {
      if (f.kind() != Connective::Par) continue;
      PlanPtr p = solve(with_added(without_one(key, f), {f.left(), f.right()}), budget, cuts, level + 1);
      return p ? make_plan(Step::Par, f, {}, {p}) : nullptr;
    }
    for (const auto& f : key) {
      if (f.kind() != Connective::With) continue;
      Key rest = without_one(key, f);
      PlanPtr l = solve(with_added(rest, {f.left()}), budget, cuts, level + 1);
      if (!l) return nullptr;
      PlanPtr r = solve(with_added(rest, {f.right()}), budget, cuts, level + 1);
      return r ? make_plan(Step::With, f, {}, {l, r}) : nullptr;
    }

    if (budget < 2) return nullptr;
    std::set<Formula> tried;
    for (const auto& f : key) {
      if (f.kind() != Connective::Plus || !tried.insert(f).second) continue;
      Key rest = without_one(key, f);
      if (PlanPtr p = solve(with_added(rest, {f.left()}), budget - 1, cuts, level + 1)) {
        return make_plan(Step::PlusL, f, {}, {p});
      }
      if (PlanPtr p = solve(with_added(rest, {f.right()}), budget - 1, cuts, level + 1)) {
        return make_plan(Step::PlusR, f, {}, {p});
      }
    }
    for (const auto& f : key) {
      if (f.kind() != Connective::Tensor || !tried.insert(f).second) continue;
      Key rest = without_one(key, f);
      for (const auto& part : sub_multisets(rest)) {
        PlanPtr l = solve(with_added(part, {f.left()}), budget - 1, cuts, level + 1);
        if (!l) continue;
        PlanPtr r = solve(with_added(difference(rest, part), {f.right()}), budget - 1, cuts, level + 1);
        if (r) return make_plan(Step::Tensor, f, part, {l, r});
      }
    }
    if (cuts < 1) return nullptr;
    auto parts = sub_multisets(key);
    for (const auto& c : candidates_) {
      Formula dual = cll::negate(c);
      for (const auto& part : parts) {
        PlanPtr l = solve(with_added(part, {c}), budget - 1, cuts - 1, level + 1);
        if (!l) continue;
        PlanPtr r = solve(with_added(difference(key, part), {dual}), budget - 1, cuts - 1, level + 1);
        if (r) return make_plan(Step::Cut, c, part, {l, r});
      }
    }
    return nullptr;
  }

  SearchLimits limits_;
  std::vector<AxiomInfo> axioms_;
  std::vector<Formula> candidates_;
  std::map<Key, Memo> memo_;
  std::chrono::steady_clock::time_point start_;
  std::size_t nodes_ = 0;
  std::size_t deepest_level_ = 0;
  std::string deepest_;
};

// Rebuilds a plan through the kernel on concrete channels.
class Replay {
 public:
  Replay(const std::vector<Theorem>& axioms, const cll::AnnotatedSequent& goal) : axioms_(axioms) {
    avoid_ = goal.channels();
  }

  Theorem build(const cll::AnnotatedSequent& goal, const Plan& plan) {
    switch (plan.step) {
      case Step::Axiom: return leaf(goal, axioms_[plan.axiom]);
      case Step::Id: {
        const auto& es = goal.entries();
        bool first_positive = es[0].formula.kind() == Connective::PosAtom;
        const auto& pos = first_positive ? es[0] : es[1];
        const auto& neg = first_positive ? es[1] : es[0];
        return kernel::ax(pos.formula, pos.channel, neg.channel);
      }
      default: break;
    }
    const Formula& f = *plan.principal;
    if (plan.step == Step::Cut) {
      auto [left_ctx, right_ctx] = split(goal, plan.left);
      ChannelName x = fresh("x"), y = fresh("y");
      left_ctx.add(x, f);
      right_ctx.add(y, cll::negate(f));
      return kernel::cut(build(left_ctx, *plan.premises[0]), build(right_ctx, *plan.premises[1]), x, y);
    }
    ChannelName z = take(goal, f);
    cll::AnnotatedSequent rest = goal.without(z);
    ChannelName x = fresh("x"), y = fresh("y");
    switch (plan.step) {
      case Step::Par: {
        cll::AnnotatedSequent s = rest;
        s.add(x, f.left());
        s.add(y, f.right());
        return kernel::par(build(s, *plan.premises[0]), x, y, z);
      }
      case Step::With: {
        cll::AnnotatedSequent l = rest, r = rest;
        l.add(x, f.left());
        r.add(y, f.right());
        return kernel::with_(build(l, *plan.premises[0]), build(r, *plan.premises[1]), x, y, z);
      }
      case Step::PlusL: {
        cll::AnnotatedSequent s = rest;
        s.add(x, f.left());
        return kernel::plus_l(build(s, *plan.premises[0]), x, f.right(), z);
      }
      case Step::PlusR: {
        cll::AnnotatedSequent s = rest;
        s.add(y, f.right());
        return kernel::plus_r(build(s, *plan.premises[0]), y, f.left(), z);
      }
      case Step::Tensor: {
        auto [l, r] = split(rest, plan.left);
        l.add(x, f.left());
        r.add(y, f.right());
        return kernel::tensor(build(l, *plan.premises[0]), build(r, *plan.premises[1]), x, y, z);
      }
      default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "unreachable plan step");
  }

 private:
  ChannelName fresh(const char* base) {
    ChannelName c = names_.next(base, avoid_);
    avoid_.insert(c);
    return c;
  }

  static ChannelName take(const cll::AnnotatedSequent& s, const Formula& f) {
    for (const auto& e : s.entries()) {
      if (e.formula == f) return e.channel;
    }
    throw Error(ErrorCode::MissingChannel, "plan formula " + cll::print_formula(f) + " not in sequent");
  }

  // Entries matching `part` (first occurrences, in entry order) and the rest.
  static std::pair<cll::AnnotatedSequent, cll::AnnotatedSequent> split(const cll::AnnotatedSequent& s,
                                                                        const Key& part) {
    Key wanted = part;
    cll::AnnotatedSequent in, out;
    for (const auto& e : s.entries()) {
      auto it = std::find(wanted.begin(), wanted.end(), e.formula);
      if (it != wanted.end()) {
        wanted.erase(it);
        in.add(e.channel, e.formula);
      } else {
        out.add(e.channel, e.formula);
      }
    }
    return {in, out};
  }

  static Theorem leaf(const cll::AnnotatedSequent& goal, const Theorem& axiom) {
    std::vector<std::pair<ChannelName, ChannelName>> map;
    std::vector<bool> used(goal.size(), false);
    for (const auto& e : axiom.sequent().entries()) {
      for (std::size_t i = 0; i < goal.size(); ++i) {
        if (!used[i] && goal.entries()[i].formula == e.formula) {
          used[i] = true;
          map.emplace_back(e.channel, goal.entries()[i].channel);
          break;
        }
      }
    }
    return kernel::rename_channels(axiom, map);
  }

  const std::vector<Theorem>& axioms_;
  NameSupply names_;
  ChannelSet avoid_;
};

void add_unique(std::vector<Formula>& out, const Formula& f) {
  if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
}

// Atoms of a tensor of positive atoms; empty for anything else.
std::optional<std::vector<std::string>> tensor_atoms(const Formula& f) {
  if (f.kind() == Connective::PosAtom) return std::vector<std::string>{f.atom_name()};
  if (f.kind() != Connective::Tensor) return std::nullopt;
  auto l = tensor_atoms(f.left());
  auto r = tensor_atoms(f.right());
  if (!l || !r) return std::nullopt;
  l->insert(l->end(), r->begin(), r->end());
  return l;
}

}  // namespace

std::vector<Formula> cut_candidates(const std::vector<Theorem>& axioms) {
  std::vector<Formula> out;
  std::vector<std::optional<Formula>> outputs;
  for (const auto& a : axioms) {
    std::optional<Formula> single;
    int positives = 0;
    for (const auto& e : a.sequent().entries()) {
      if (e.formula.kind() == Connective::NegAtom) continue;
      ++positives;
      single = e.formula;
      for (const auto& sub : cll::subformulas(e.formula)) add_unique(out, sub);
    }
    outputs.push_back(positives == 1 ? single : std::nullopt);
  }
  for (std::size_t consumer = 0; consumer < axioms.size(); ++consumer) {
    std::vector<std::string> inputs;
    for (const auto& e : axioms[consumer].sequent().entries()) {
      if (e.formula.kind() == Connective::NegAtom) inputs.push_back(e.formula.atom_name());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.size() < 2) continue;
    std::vector<std::size_t> producers;
    for (std::size_t p = 0; p < axioms.size() && producers.size() < 16; ++p) {
      if (p == consumer || !outputs[p]) continue;
      auto atoms = tensor_atoms(*outputs[p]);
      if (!atoms) continue;
      std::sort(atoms->begin(), atoms->end());
      if (std::includes(inputs.begin(), inputs.end(), atoms->begin(), atoms->end())) producers.push_back(p);
    }
    for (std::size_t mask = 1; mask < (std::size_t{1} << producers.size()); ++mask) {
      std::vector<std::string> covered;
      std::optional<Formula> bundle;
      int members = 0;
      for (std::size_t b = 0; b < producers.size(); ++b) {
        if (!(mask & (std::size_t{1} << b))) continue;
        const Formula& o = *outputs[producers[b]];
        auto atoms = tensor_atoms(o);
        covered.insert(covered.end(), atoms->begin(), atoms->end());
        bundle = bundle ? Formula::tensor(*bundle, o) : o;
        ++members;
      }
      std::sort(covered.begin(), covered.end());
      if (members >= 2 && covered == inputs) add_unique(out, *bundle);
    }
  }
  return out;
}

Theorem prove(const cll::AnnotatedSequent& goal, const std::vector<Theorem>& axioms, const SearchLimits& limits,
              SearchStats* stats) {
  Search search(axioms, limits);
  PlanPtr plan = search.run(key_of(goal));
  if (stats) {
    stats->nodes_expanded = search.nodes();
    stats->elapsed = search.elapsed();
  }
  if (!plan) {
    throw SearchError(ErrorCode::NotComposable,
                      "no proof of " + cll::print_sequent(goal) + " within depth " +
                          std::to_string(limits.max_depth) + "; deepest failed subgoal: " + search.deepest(),
                      search.deepest());
  }
  Replay replay(axioms, goal);
  Theorem t = replay.build(goal, *plan);
  if (stats) stats->cuts_introduced = kernel::rule_counts(t.derivation())[kernel::Rule::Cut];
  return t;
}

CompositionResult compose(const std::vector<services::ServiceSpec>& available, const services::ServiceSpec& goal,
                          const SearchLimits& limits) {
  std::set<std::string> names;
  std::vector<Theorem> axioms;
  for (const auto& s : available) {
    if (!names.insert(s.name).second) {
      throw Error(ErrorCode::DuplicateName, "duplicate service name '" + s.name + "'");
    }
    axioms.push_back(kernel::assume(s.name, services::encode(s)));
  }
  SearchStats stats;
  Theorem t = prove(services::encode(goal), axioms, limits, &stats);
  return CompositionResult{t, kernel::axiom_leaves(t.derivation()), stats, {}};
}

}  // namespace llweave::composer
