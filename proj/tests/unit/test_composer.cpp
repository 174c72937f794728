#include <atomic>
#include <functional>
#include <random>

#include "doctest.h"
#include "llweave/composer.hpp"
#include "../support/generators.hpp"

using namespace llweave;
using namespace llweave::composer;
using cll::Formula;
using cll::parse_formula;
using cll::parse_sequent;
using kernel::Rule;

namespace {

std::vector<services::ServiceSpec> ski_registry() {
  return services::load_registry(services::read_text_file(LLWEAVE_SKI_DATA "/registry.txt"));
}

services::ServiceSpec ski_request() {
  return services::load_request(services::read_text_file(LLWEAVE_SKI_DATA "/request.txt"));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

void check_id_leaves_atomic(const kernel::ProofTree& t) {
  if (t.rule == Rule::Id) {
    for (const auto& e : t.conclusion.entries()) CHECK(e.formula.is_atom());
  }
  for (const auto& p : t.premises) check_id_leaves_atomic(*p);
}

}  // namespace

TEST_CASE("ski composition has the expected rule multiset") {
  auto result = compose(ski_registry(), ski_request());
  auto counts = kernel::rule_counts(result.theorem.derivation());
  CHECK(counts[Rule::Axiom] == 5);
  CHECK(counts[Rule::Id] == 1);
  CHECK(counts[Rule::Tensor] == 1);
  CHECK(counts[Rule::Par] == 2);
  CHECK(counts[Rule::With] == 1);
  CHECK(counts[Rule::PlusL] + counts[Rule::PlusR] == 2);
  CHECK(counts[Rule::Cut] == 3);
  CHECK(result.stats.elapsed.count() < 10.0);

  std::vector<std::string> used = result.services_used;
  std::sort(used.begin(), used.end());
  CHECK(used == std::vector<std::string>{"Cm2Inch", "SelLen", "SelMod", "SelSki", "Usd2Nok"});
  CHECK(result.theorem.sequent() == services::encode(ski_request()));
  CHECK(result.theorem.process().free_names() == result.theorem.sequent().channels());
}

TEST_CASE("ski extraction contains the length conversion pipeline") {
  auto result = compose(ski_registry(), ski_request());
  auto fragment = pi::parse_process("nu z. (SelLen(a,b,z) | Cm2Inch(z,c))");
  bool found = false;
  for (const auto& sub : pi::subterms(result.theorem.process())) {
    if (pi::congruent_up_to_renaming(sub, fragment)) found = true;
  }
  CHECK(found);
}

TEST_CASE("composition is deterministic") {
  auto a = compose(ski_registry(), ski_request());
  auto b = compose(ski_registry(), ski_request());
  CHECK(pi::print_process(a.theorem.process()) == pi::print_process(b.theorem.process()));
  CHECK(kernel::proof_to_json(a.theorem.derivation()) == kernel::proof_to_json(b.theorem.derivation()));
  CHECK(a.stats.nodes_expanded == b.stats.nodes_expanded);
}

TEST_CASE("a goal equal to a service is a single leaf") {
  auto reg = ski_registry();
  services::ServiceSpec goal{"Convert", {"LENGTH_CM"}, {"LENGTH_IN"}, {}, {}, {}};
  auto result = compose(reg, goal);
  auto counts = kernel::rule_counts(result.theorem.derivation());
  CHECK(counts[Rule::Axiom] == 1);
  CHECK(counts[Rule::Cut] == 0);
  CHECK(result.services_used == std::vector<std::string>{"Cm2Inch"});
  CHECK(result.theorem.sequent() == services::encode(goal));
}

TEST_CASE("two-step chain needs one cut") {
  services::ServiceSpec goal{"Chain", {"HEIGHT_CM", "WEIGHT_KG"}, {"LENGTH_IN"}, {}, {}, {}};
  auto result = compose(ski_registry(), goal);
  CHECK(kernel::rule_counts(result.theorem.derivation())[Rule::Cut] == 1);
  CHECK(result.services_used == std::vector<std::string>{"SelLen", "Cm2Inch"});
}

TEST_CASE("unprovable goals report the failure") {
  SUBCASE("lone atom") {
    try {
      prove(parse_sequent("x:A"), {});
      FAIL("expected failure");
    } catch (const SearchError& e) {
      CHECK(e.code() == ErrorCode::NotComposable);
      CHECK_FALSE(e.deepest_subgoal().empty());
    }
  }
  SUBCASE("missing converter") {
    auto reg = ski_registry();
    std::erase_if(reg, [](const auto& s) { return s.name == "Cm2Inch"; });
    CHECK(code_of([&] { compose(reg, ski_request()); }) == ErrorCode::NotComposable);
  }
  SUBCASE("wrong polarity") {
    CHECK(code_of([] { prove(parse_sequent("x:A, y:B^"), {}); }) == ErrorCode::NotComposable);
  }
}

TEST_CASE("duplicate service names are rejected") {
  auto reg = ski_registry();
  reg.push_back(reg.front());
  CHECK(code_of([&] { compose(reg, ski_request()); }) == ErrorCode::DuplicateName);
}

TEST_CASE("cancellation and timeout") {
  std::atomic<bool> cancel{true};
  SearchLimits limits;
  limits.cancel = &cancel;
  CHECK(code_of([&] { compose(ski_registry(), ski_request(), limits); }) == ErrorCode::Timeout);

  SearchLimits instant;
  instant.timeout = std::chrono::milliseconds(0);
  CHECK(code_of([&] { prove(parse_sequent("x:(A*B)*C, y:D"), {}, instant); }) == ErrorCode::Timeout);
}

TEST_CASE("cut candidates include output bundles") {
  std::vector<kernel::Theorem> axioms;
  for (const auto& s : ski_registry()) axioms.push_back(kernel::assume(s.name, services::encode(s)));
  auto cands = cut_candidates(axioms);
  auto has = [&](const char* text) { return std::find(cands.begin(), cands.end(), parse_formula(text)) != cands.end(); };
  CHECK(has("LENGTH_CM"));
  CHECK(has("BRAND * MODEL"));
  CHECK(has("PRICE_USD + EXCEPTION"));
  CHECK(has("(BRAND * MODEL) * LENGTH_IN"));
  CHECK_FALSE(has("LENGTH_CM^"));
}

TEST_CASE("identity sequents are provable without hypotheses") {
  std::vector<Formula> formulas = testing::all_formulas(2, {"A", "B"});
  std::mt19937 rng(7);
  for (int i = 0; i < 150; ++i) formulas.push_back(testing::random_formula(rng, 3));
  for (const auto& f : formulas) {
    CAPTURE(cll::print_formula(f));
    cll::AnnotatedSequent goal{{ChannelName("p"), f}, {ChannelName("q"), cll::negate(f)}};
    auto t = prove(goal, {});
    CHECK(t.sequent() == goal);
    CHECK(t.process().free_names() == goal.channels());
    check_id_leaves_atomic(t.derivation());
  }
}

TEST_CASE("proved theorems keep the goal channels") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < 100; ++i) {
    Formula a = testing::random_formula(rng, 2);
    Formula b = testing::random_formula(rng, 2);
    // ⊢ a^, b^, a*b is always derivable.
    cll::AnnotatedSequent goal{{ChannelName("u"), cll::negate(a)},
                               {ChannelName("v"), cll::negate(b)},
                               {ChannelName("w"), coin(rng) ? Formula::tensor(a, b) : Formula::tensor(b, a)}};
    CAPTURE(cll::print_sequent(goal));
    auto t = prove(goal, {});
    CHECK(t.sequent() == goal);
    CHECK(t.process().free_names() == goal.channels());
  }
}
