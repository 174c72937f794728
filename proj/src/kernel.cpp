#include "llweave/kernel.hpp"

#include <algorithm>

#include "llweave/error.hpp"

namespace llweave::kernel {

using cll::AnnotatedSequent;
using cll::Formula;
using pi::Process;

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::Id: return "Id";
    case Rule::Tensor: return "Tensor";
    case Rule::Par: return "Par";
    case Rule::PlusL: return "PlusL";
    case Rule::PlusR: return "PlusR";
    case Rule::With: return "With";
    case Rule::Cut: return "Cut";
    case Rule::Axiom: return "Axiom";
  }
  return "?";
}

struct detail::Mint {
  static Theorem make(AnnotatedSequent s, Process p, Rule rule, std::vector<ChannelName> principal,
                      std::vector<const Theorem*> premises, std::uint32_t counter, std::string axiom = {}) {
    auto tree = std::make_shared<ProofTree>();
    tree->rule = rule;
    tree->axiom = std::move(axiom);
    tree->principal = std::move(principal);
    tree->conclusion = s;
    for (const auto* t : premises) tree->premises.push_back(t->derivation_ptr());
    return Theorem(std::move(s), std::move(p), std::move(tree), counter);
  }

  static Theorem renamed(const Theorem& t, AnnotatedSequent s, Process p, std::shared_ptr<const ProofTree> d) {
    return Theorem(std::move(s), std::move(p), std::move(d), t.fresh_counter());
  }
};

namespace {

using detail::Mint;

// Bound-name allocator seeded from the premises' counters.
class Fresh {
 public:
  Fresh(std::uint32_t counter, ChannelSet avoid) : counter_(counter), avoid_(std::move(avoid)) {}

  void avoid(const ChannelName& c) { avoid_.insert(c); }
  void avoid(const ChannelSet& cs) { avoid_.insert(cs.begin(), cs.end()); }

  ChannelName next(const std::string& base) {
    ChannelName c(base, ++counter_);
    while (avoid_.contains(c)) c.suffix = ++counter_;
    avoid_.insert(c);
    return c;
  }

  std::uint32_t counter() const { return counter_; }

 private:
  std::uint32_t counter_;
  ChannelSet avoid_;
};

Fresh fresh_for(std::initializer_list<const Theorem*> premises) {
  std::uint32_t counter = 0;
  ChannelSet avoid;
  for (const auto* t : premises) {
    counter = std::max(counter, t->fresh_counter());
    auto names = pi::all_names(t->process());
    avoid.insert(names.begin(), names.end());
    auto chans = t->sequent().channels();
    avoid.insert(chans.begin(), chans.end());
  }
  return Fresh(counter, std::move(avoid));
}

Formula require_channel(const Theorem& t, const ChannelName& c, const char* role) {
  auto f = t.sequent().find(c);
  if (!f) {
    throw Error(ErrorCode::MissingChannel, std::string(role) + " channel '" + c.str() + "' not in sequent " +
                                               cll::print_sequent(t.sequent()));
  }
  return *f;
}

void require_fresh(const ChannelName& z, const AnnotatedSequent& context) {
  if (context.contains(z)) {
    throw Error(ErrorCode::NotFresh, "conclusion channel '" + z.str() + "' already occurs in the context");
  }
}

// Bound copy of `c`: kept unless it would capture something in `clash`.
ChannelName binder_name(const ChannelName& c, const ChannelSet& clash, Fresh& fresh) {
  return clash.contains(c) ? fresh.next(c.base) : c;
}

Process rename(const Process& p, const ChannelName& from, const ChannelName& to) {
  return from == to ? p : pi::substitute(p, {{from, to}});
}

}  // namespace

Theorem ax(const Formula& f, const ChannelName& x, const ChannelName& y) {
  if (x == y) throw Error(ErrorCode::ChannelClash, "identity needs two channels, got '" + x.str() + "' twice");
  AnnotatedSequent s{{x, f}, {y, cll::negate(f)}};
  Fresh fresh(0, {x, y});
  ChannelName a = fresh.next("a");
  Process p = Process::input(y, {a}, Process::output(x, {a}, Process::nil()));
  return Mint::make(std::move(s), std::move(p), Rule::Id, {x, y}, {}, fresh.counter());
}

Theorem tensor(const Theorem& left, const Theorem& right, const ChannelName& x, const ChannelName& y,
               const ChannelName& z) {
  Formula a = require_channel(left, x, "left");
  Formula b = require_channel(right, y, "right");
  AnnotatedSequent gamma = left.sequent().without(x);
  AnnotatedSequent delta = right.sequent().without(y);
  AnnotatedSequent s = cll::sequent_union(gamma, delta);
  require_fresh(z, s);
  s.add(z, Formula::tensor(a, b));

  Fresh fresh = fresh_for({&left, &right});
  fresh.avoid(z);
  ChannelSet clash_x = delta.channels();
  clash_x.insert(z);
  ChannelName bx = binder_name(x, clash_x, fresh);
  ChannelSet clash_y = gamma.channels();
  clash_y.insert({z, bx});
  ChannelName by = binder_name(y, clash_y, fresh);
  Process body = Process::parallel(rename(left.process(), x, bx), rename(right.process(), y, by));
  Process p = Process::restrict({bx, by}, Process::output(z, {bx, by}, body));
  return Mint::make(std::move(s), std::move(p), Rule::Tensor, {x, y, z}, {&left, &right}, fresh.counter());
}

Theorem par(const Theorem& premise, const ChannelName& x, const ChannelName& y, const ChannelName& z) {
  Formula a = require_channel(premise, x, "left");
  Formula b = require_channel(premise, y, "right");
  if (x == y) throw Error(ErrorCode::ChannelClash, "par needs two distinct channels, got '" + x.str() + "' twice");
  AnnotatedSequent s = premise.sequent().without(x).without(y);
  require_fresh(z, s);
  s.add(z, Formula::par(a, b));

  Fresh fresh = fresh_for({&premise});
  fresh.avoid(z);
  ChannelName bx = binder_name(x, {z}, fresh);
  ChannelName by = binder_name(y, {z}, fresh);
  Process body = rename(rename(premise.process(), x, bx), y, by);
  Process p = Process::input(z, {bx, by}, body);
  return Mint::make(std::move(s), std::move(p), Rule::Par, {x, y, z}, {&premise}, fresh.counter());
}

namespace {

Theorem plus(const Theorem& premise, const ChannelName& x, const Formula& other, const ChannelName& z, bool left) {
  Formula a = require_channel(premise, x, "premise");
  AnnotatedSequent s = premise.sequent().without(x);
  require_fresh(z, s);
  s.add(z, left ? Formula::plus(a, other) : Formula::plus(other, a));

  Fresh fresh = fresh_for({&premise});
  fresh.avoid(z);
  ChannelName bx = binder_name(x, {z}, fresh);
  ChannelName u = fresh.next("u");
  ChannelName v = fresh.next("v");
  Process body = rename(premise.process(), x, bx);
  Process p = Process::restrict(
      {bx}, Process::input(z, {u, v}, Process::output(left ? u : v, {bx}, body)));
  return Mint::make(std::move(s), std::move(p), left ? Rule::PlusL : Rule::PlusR, {x, z}, {&premise},
                    fresh.counter());
}

}  // namespace

Theorem plus_l(const Theorem& premise, const ChannelName& x, const Formula& b, const ChannelName& z) {
  return plus(premise, x, b, z, true);
}

Theorem plus_r(const Theorem& premise, const ChannelName& y, const Formula& a, const ChannelName& z) {
  return plus(premise, y, a, z, false);
}

Theorem with_(const Theorem& left, const Theorem& right, const ChannelName& x, const ChannelName& y,
              const ChannelName& z) {
  Formula a = require_channel(left, x, "left");
  Formula b = require_channel(right, y, "right");
  AnnotatedSequent gamma = left.sequent().without(x);
  AnnotatedSequent other = right.sequent().without(y);
  if (!(gamma == other)) {
    std::string only_left, only_right;
    for (const auto& e : gamma.entries()) {
      if (other.find(e.channel) != e.formula) {
        only_left += (only_left.empty() ? "" : ", ") + e.channel.str() + ":" + cll::print_formula(e.formula);
      }
    }
    for (const auto& e : other.entries()) {
      if (gamma.find(e.channel) != e.formula) {
        only_right += (only_right.empty() ? "" : ", ") + e.channel.str() + ":" + cll::print_formula(e.formula);
      }
    }
    throw Error(ErrorCode::ContextMismatch,
                "with contexts differ: left has [" + only_left + "], right has [" + only_right + "]");
  }
  AnnotatedSequent s = gamma;
  require_fresh(z, s);
  s.add(z, Formula::with(a, b));

  Fresh fresh = fresh_for({&left, &right});
  fresh.avoid(z);
  ChannelName u = fresh.next("u");
  ChannelName v = fresh.next("v");
  Process choice = Process::sum(Process::input(u, {x}, left.process()), Process::input(v, {y}, right.process()));
  Process p = Process::restrict({u, v}, Process::output(z, {u, v}, choice));
  return Mint::make(std::move(s), std::move(p), Rule::With, {x, y, z}, {&left, &right}, fresh.counter());
}

Theorem cut(const Theorem& left, const Theorem& right, const ChannelName& x, const ChannelName& y) {
  Formula c = require_channel(left, x, "left");
  Formula d = require_channel(right, y, "right");
  if (d != cll::negate(c)) {
    throw Error(ErrorCode::CutMismatch,
                "cut formulas are not dual: " + cll::print_formula(c) + " vs " + cll::print_formula(d));
  }
  AnnotatedSequent s = cll::sequent_union(left.sequent().without(x), right.sequent().without(y));

  Fresh fresh = fresh_for({&left, &right});
  ChannelName z = fresh.next("z");
  Process p = Process::restrict(
      {z}, Process::parallel(rename(left.process(), x, z), rename(right.process(), y, z)));
  return Mint::make(std::move(s), std::move(p), Rule::Cut, {x, y}, {&left, &right}, fresh.counter());
}

Theorem assume(const std::string& name, const AnnotatedSequent& s) {
  std::vector<ChannelName> chans = s.channel_list();
  return Mint::make(s, Process::ref(name, chans), Rule::Axiom, chans, {}, 0, name);
}

namespace {

Theorem expand(const Formula& f, const ChannelName& x, const ChannelName& y, NameSupply& names,
               const ChannelSet& avoid) {
  auto fresh = [&](const char* base) { return names.next(base, avoid); };
  switch (f.kind()) {
    case cll::Connective::PosAtom: return ax(f, x, y);
    case cll::Connective::NegAtom: return ax(cll::negate(f), y, x);
    case cll::Connective::Tensor:
    case cll::Connective::Par: {
      ChannelName x1 = fresh("x"), y1 = fresh("y"), x2 = fresh("x"), y2 = fresh("y");
      Theorem l = expand(f.left(), x1, y1, names, avoid);
      Theorem r = expand(f.right(), x2, y2, names, avoid);
      if (f.kind() == cll::Connective::Tensor) return par(tensor(l, r, x1, x2, x), y1, y2, y);
      return par(tensor(l, r, y1, y2, y), x1, x2, x);
    }
    case cll::Connective::Plus:
    case cll::Connective::With: {
      bool positive_plus = f.kind() == cll::Connective::Plus;
      // The & side owns the two branches; the ⊕ side is rebuilt in each.
      const ChannelName& plus_side = positive_plus ? x : y;
      const ChannelName& with_side = positive_plus ? y : x;
      Formula plus_form = positive_plus ? f : cll::negate(f);
      ChannelName p1 = fresh("x"), w1 = fresh("y"), p2 = fresh("x"), w2 = fresh("y");
      Theorem l = expand(plus_form.left(), p1, w1, names, avoid);
      Theorem r = expand(plus_form.right(), p2, w2, names, avoid);
      Theorem lp = plus_l(l, p1, plus_form.right(), plus_side);
      Theorem rp = plus_r(r, p2, plus_form.left(), plus_side);
      return with_(lp, rp, w1, w2, with_side);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unreachable formula kind");
}

}  // namespace

Theorem identity_expand(const Formula& f, const ChannelName& x, const ChannelName& y) {
  if (x == y) throw Error(ErrorCode::ChannelClash, "identity needs two channels, got '" + x.str() + "' twice");
  NameSupply names;
  return expand(f, x, y, names, {x, y});
}

namespace {

std::shared_ptr<const ProofTree> rename_tree(const std::shared_ptr<const ProofTree>& t, const pi::Substitution& m) {
  auto out = std::make_shared<ProofTree>(*t);
  for (auto& c : out->principal) {
    if (auto it = m.find(c); it != m.end()) c = it->second;
  }
  std::vector<std::pair<ChannelName, ChannelName>> pairs(m.begin(), m.end());
  std::vector<std::pair<ChannelName, ChannelName>> present;
  for (const auto& [from, to] : pairs) {
    if (out->conclusion.contains(from)) present.emplace_back(from, to);
  }
  out->conclusion = out->conclusion.renamed(present);
  for (auto& p : out->premises) p = rename_tree(p, m);
  return out;
}

}  // namespace

Theorem rename_channels(const Theorem& t, const std::vector<std::pair<ChannelName, ChannelName>>& map) {
  pi::Substitution m;
  for (const auto& [from, to] : map) {
    if (!t.sequent().contains(from)) {
      throw Error(ErrorCode::MissingChannel, "cannot rename '" + from.str() + "': not in sequent");
    }
    m[from] = to;
  }
  AnnotatedSequent s = t.sequent().renamed(map);  // throws on clashes, so the map is injective
  return detail::Mint::renamed(t, std::move(s), pi::substitute(t.process(), m), rename_tree(t.derivation_ptr(), m));
}

namespace {

void count(const ProofTree& t, std::map<Rule, int>& out) {
  ++out[t.rule];
  for (const auto& p : t.premises) count(*p, out);
}

void leaves(const ProofTree& t, std::vector<std::string>& out) {
  if (t.rule == Rule::Axiom) out.push_back(t.axiom);
  for (const auto& p : t.premises) leaves(*p, out);
}

}  // namespace

std::map<Rule, int> rule_counts(const ProofTree& tree) {
  std::map<Rule, int> out;
  count(tree, out);
  return out;
}

std::vector<std::string> axiom_leaves(const ProofTree& tree) {
  std::vector<std::string> out;
  leaves(tree, out);
  return out;
}

int proof_depth(const ProofTree& tree) {
  int d = 0;
  for (const auto& p : tree.premises) d = std::max(d, proof_depth(*p));
  return d + 1;
}

nlohmann::json proof_to_json(const ProofTree& tree) {
  nlohmann::json j;
  j["rule"] = std::string(to_string(tree.rule));
  if (tree.rule == Rule::Axiom) j["axiom"] = tree.axiom;
  auto principal = nlohmann::json::array();
  for (const auto& c : tree.principal) principal.push_back(c.str());
  j["principal"] = principal;
  j["conclusion"] = cll::print_sequent(tree.conclusion);
  auto premises = nlohmann::json::array();
  for (const auto& p : tree.premises) premises.push_back(proof_to_json(*p));
  j["premises"] = premises;
  return j;
}

}  // namespace llweave::kernel
