#pragma once

// Random kernel derivations for property tests.

#include <random>

#include "llweave/kernel.hpp"
#include "generators.hpp"

namespace llweave::testing {

class DerivationGenerator {
 public:
  explicit DerivationGenerator(unsigned seed) : rng_(seed) {}

  kernel::Theorem generate(int depth) {
    if (depth <= 1) return leaf();
    switch (pick(6)) {
      case 0: return tensor(depth);
      case 1: return par(depth);
      case 2: return plus(depth);
      case 3: return with(depth);
      case 4: return cut(depth);
      default: return leaf();
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  ChannelName channel() { return ChannelName("c", ++counter_); }
  cll::Formula formula(int depth = 3) { return random_formula(rng_, depth); }

  const cll::Entry& entry(const kernel::Theorem& t) {
    const auto& es = t.sequent().entries();
    return es[static_cast<std::size_t>(pick(static_cast<int>(es.size())))];
  }

  cll::AnnotatedSequent random_sequent(int min_size) {
    cll::AnnotatedSequent s;
    for (int n = min_size + pick(3); n > 0; --n) s.add(channel(), formula());
    return s;
  }

  kernel::Theorem leaf() {
    if (pick(2) == 0) return kernel::ax(formula(), channel(), channel());
    return kernel::assume("S" + std::to_string(++services_), random_sequent(1));
  }

  kernel::Theorem tensor(int depth) {
    kernel::Theorem l = generate(depth - 1);
    kernel::Theorem r = generate(depth - 1);
    return kernel::tensor(l, r, entry(l).channel, entry(r).channel, channel());
  }

  kernel::Theorem par(int depth) {
    kernel::Theorem t = generate(depth - 1);
    while (t.sequent().size() < 2) t = generate(depth - 1);
    const auto& es = t.sequent().entries();
    std::size_t i = static_cast<std::size_t>(pick(static_cast<int>(es.size())));
    std::size_t j = (i + 1 + static_cast<std::size_t>(pick(static_cast<int>(es.size()) - 1))) % es.size();
    return kernel::par(t, es[i].channel, es[j].channel, channel());
  }

  kernel::Theorem plus(int depth) {
    kernel::Theorem t = generate(depth - 1);
    ChannelName x = entry(t).channel;
    if (pick(2) == 0) return kernel::plus_l(t, x, formula(), channel());
    return kernel::plus_r(t, x, formula(), channel());
  }

  kernel::Theorem with(int depth) {
    kernel::Theorem l = generate(depth - 1);
    ChannelName x = entry(l).channel;
    if (pick(2) == 0) return kernel::with_(l, l, x, x, channel());
    cll::AnnotatedSequent s = l.sequent().without(x);
    ChannelName y = channel();
    s.add(y, formula());
    return kernel::with_(l, kernel::assume("W" + std::to_string(++services_), s), x, y, channel());
  }

  kernel::Theorem cut(int depth) {
    kernel::Theorem l = generate(depth - 1);
    cll::Entry e = entry(l);
    cll::Formula dual = cll::negate(e.formula);
    ChannelName p = channel(), q = channel();
    switch (pick(3)) {
      case 0: return kernel::cut(l, kernel::ax(e.formula, p, q), e.channel, q);
      case 1: return kernel::cut(l, kernel::identity_expand(e.formula, p, q), e.channel, q);
      default: {
        cll::AnnotatedSequent s = random_sequent(1);
        s.add(q, dual);
        return kernel::cut(l, kernel::assume("K" + std::to_string(++services_), s), e.channel, q);
      }
    }
  }

  std::mt19937 rng_;
  std::uint32_t counter_ = 0;
  int services_ = 0;
};

}  // namespace llweave::testing
