#include "doctest.h"
#include "llweave/kernel.hpp"
#include "../support/oracle.hpp"

using namespace llweave;
using namespace llweave::kernel;
using cll::Formula;

namespace {

const Formula A = Formula::atom("A");
const Formula B = Formula::atom("B");
const Formula C = Formula::atom("C");

testing::Explored run_all(const Theorem& t, std::size_t depth) {
  return testing::explore(testing::with_environment(t), depth);
}

}  // namespace

TEST_CASE("cut against an expanded tensor of a sum reduces like its cut-free form") {
  auto mixed = [&](const ChannelName& z) {
    return tensor(plus_l(ax(A, "s", "a"), "s", B, "m"), ax(C, "t", "c"), "m", "t", z);
  };
  Theorem with_cut = cut(mixed("z"), identity_expand(Formula::tensor(Formula::plus(A, B), C), "p", "q"), "z", "q");
  Theorem cut_free = mixed("p");
  REQUIRE(with_cut.sequent() == cut_free.sequent());

  auto a = run_all(with_cut, 16);
  auto b = run_all(cut_free, 16);
  CHECK_FALSE(a.truncated);
  CHECK_FALSE(b.truncated);
  CHECK(a.outcomes == b.outcomes);
  CHECK(run_all(with_cut, 11).truncated);
}

TEST_CASE("the oracle separates different choices") {
  Theorem left = plus_l(ax(A, "s", "a"), "s", A, "z");
  Theorem right = plus_r(ax(A, "s", "a"), "s", A, "z");
  REQUIRE(left.sequent() == right.sequent());
  auto l = run_all(left, 10);
  auto r = run_all(right, 10);
  REQUIRE_FALSE(l.truncated);
  REQUIRE_FALSE(r.truncated);
  CHECK(l.outcomes != r.outcomes);

  Theorem straight = tensor(ax(A, "s", "a"), ax(A, "t", "b"), "s", "t", "z");
  Theorem crossed = tensor(ax(A, "s", "b"), ax(A, "t", "a"), "s", "t", "z");
  REQUIRE(straight.sequent() == crossed.sequent());
  CHECK(run_all(straight, 10).outcomes != run_all(crossed, 10).outcomes);
}

TEST_CASE("the oracle explores every scheduling of independent forwarders") {
  Theorem t = tensor(ax(A, "s", "a"), ax(B, "t", "b"), "s", "t", "z");
  auto e = run_all(t, 10);
  REQUIRE(e.outcomes.size() == 1);
  CHECK(e.outcomes.begin()->second);
  CHECK(e.outcomes.begin()->first.size() == 2);
}
