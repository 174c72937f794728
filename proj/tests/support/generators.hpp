#pragma once

// Random term generators shared by unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "llweave/cll.hpp"
#include "llweave/pi.hpp"

namespace llweave::testing {

inline cll::Formula random_formula(std::mt19937& rng, int max_depth,
                                   const std::vector<std::string>& atoms = {"A", "B", "C"}) {
  std::uniform_int_distribution<int> pick_atom(0, static_cast<int>(atoms.size()) - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> op(0, 3);
  if (max_depth <= 1 || std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
    const auto& name = atoms[static_cast<std::size_t>(pick_atom(rng))];
    return coin(rng) ? cll::Formula::atom(name) : cll::Formula::neg_atom(name);
  }
  static constexpr cll::Connective ops[] = {cll::Connective::Tensor, cll::Connective::Par,
                                            cll::Connective::Plus, cll::Connective::With};
  auto l = random_formula(rng, max_depth - 1, atoms);
  auto r = random_formula(rng, max_depth - 1, atoms);
  return cll::Formula::binary(ops[op(rng)], l, r);
}

// Every formula of depth <= max_depth over the given atoms.
inline std::vector<cll::Formula> all_formulas(int max_depth, const std::vector<std::string>& atoms) {
  std::vector<cll::Formula> out;
  for (const auto& a : atoms) {
    out.push_back(cll::Formula::atom(a));
    out.push_back(cll::Formula::neg_atom(a));
  }
  for (int d = 2; d <= max_depth; ++d) {
    std::vector<cll::Formula> prev = out;
    std::vector<cll::Formula> next = out;
    for (auto c : {cll::Connective::Tensor, cll::Connective::Par, cll::Connective::Plus, cll::Connective::With}) {
      for (const auto& l : prev) {
        for (const auto& r : prev) {
          if (std::max(l.depth(), r.depth()) == d - 1) next.push_back(cll::Formula::binary(c, l, r));
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

// Random process over a small name pool.
inline pi::Process random_process(std::mt19937& rng, int max_depth) {
  static const std::vector<std::string> pool = {"x", "y", "z", "a", "b"};
  std::uniform_int_distribution<int> name_idx(0, static_cast<int>(pool.size()) - 1);
  std::uniform_int_distribution<int> arity(0, 2);
  auto name = [&] { return ChannelName(pool[static_cast<std::size_t>(name_idx(rng))]); };
  auto distinct = [&](int n) {
    pi::Names out;
    while (static_cast<int>(out.size()) < n) {
      auto c = name();
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
  };
  int choice = max_depth <= 1 ? std::uniform_int_distribution<int>(0, 2)(rng)
                              : std::uniform_int_distribution<int>(0, 8)(rng);
  switch (choice) {
    case 0: return pi::Process::nil();
    case 1: {
      pi::Names args;
      for (int i = arity(rng); i > 0; --i) args.push_back(name());
      return pi::Process::output(name(), args, pi::Process::nil());
    }
    case 2: return pi::Process::input(name(), distinct(arity(rng)), pi::Process::nil());
    case 3: {
      pi::Names args;
      for (int i = arity(rng); i > 0; --i) args.push_back(name());
      return pi::Process::output(name(), args, random_process(rng, max_depth - 1));
    }
    case 4: return pi::Process::input(name(), distinct(arity(rng)), random_process(rng, max_depth - 1));
    case 5:
    case 6:
      return pi::Process::parallel(random_process(rng, max_depth - 1), random_process(rng, max_depth - 1));
    case 7: return pi::Process::sum(random_process(rng, max_depth - 1), random_process(rng, max_depth - 1));
    default: return pi::Process::restrict(distinct(1 + arity(rng) % 2), random_process(rng, max_depth - 1));
  }
}

}  // namespace llweave::testing
