#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stlfd/stl/parser.hpp"
#include "stlfd/stl/robustness.hpp"
#include "support/stl_oracle.hpp"

using namespace stlfd;
using namespace stlfd::stl;

namespace {

Signal line(std::vector<double> xs) { return Signal{{"x", std::move(xs)}}; }

double rho(std::string_view text, const Signal& s, std::size_t t = 0) {
  return robustness(parse_formula(text), s, t).value;
}

}  // namespace

TEST_CASE("parser builds the expected trees") {
  CHECK(parse_formula("G[0,9](d_obs >= 1)") ==
        Formula::always({Bound::literal(0), Bound::literal(9)},
                        Formula::predicate("d_obs", Comparator::GreaterEq, 1.0)));
  CHECK(parse_formula("F[0,9](d_goal < 1)") ==
        Formula::eventually({Bound::literal(0), Bound::literal(9)},
                            Formula::predicate("d_goal", Comparator::Less, 1.0)));
  const Formula f = parse_formula("x > 1 and y < 2 or not z == 0");
  CHECK(f.op() == Op::Or);
  CHECK(f.lhs().op() == Op::And);
  CHECK(f.rhs().op() == Op::Not);
  CHECK(parse_formula("a > 0 -> b > 0 -> c > 0").rhs().op() == Op::Implies);
  CHECK(parse_formula("x > 0 U[1,3] y > 0").op() == Op::Until);
  CHECK(parse_formula("x >= -2.5e-1").pred().threshold.value == -0.25);
}

TEST_CASE("parser accepts named parameters and bind substitutes them") {
  const Formula f = parse_formula("F[0,T](d_goal < 1 and t <= T_goal)");
  CHECK_FALSE(f.is_bound());
  CHECK(f.parameters() == std::set<std::string>{"T", "T_goal"});
  CHECK(f.channels() == std::set<std::string>{"d_goal", "t"});
  CHECK_THROWS_AS(f.bind({{"T", 5}}), UnboundParameter);
  const Formula b = f.bind({{"T", 5}, {"T_goal", 3}});
  CHECK(b.is_bound());
  CHECK(b == parse_formula("F[0,5](d_goal < 1 and t <= 3)"));
  CHECK_THROWS_AS(robustness(f, Signal{{"d_goal", {0}}, {"t", {0}}}, 0), UnboundParameter);
  CHECK_THROWS_AS(parse_formula("G[0,T](x > 0)").bind({{"T", -1}}), ValidationError);
}

TEST_CASE("parse errors carry position and expectations") {
  try {
    parse_formula("G[0,9](x >= )");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 13);
    CHECK_FALSE(e.expected().empty());
  }
  CHECK_THROWS_AS(parse_formula("G[5,2](x > 0)"), ParseError);
  CHECK_THROWS_AS(parse_formula("x > 0 and"), ParseError);
  CHECK_THROWS_AS(parse_formula("(x > 0"), ParseError);
  CHECK_THROWS_AS(parse_formula("x $ 0"), ParseError);
  CHECK_THROWS_AS(parse_formula(""), ParseError);
}

TEST_CASE("predicate robustness follows the signed distance") {
  const Signal s = line({3.0});
  CHECK(rho("x > 1", s) == 2.0);
  CHECK(rho("x >= 1", s) == 2.0);
  CHECK(rho("x < 1", s) == -2.0);
  CHECK(rho("x <= 5", s) == 2.0);
  CHECK(rho("x == 1", s) == -2.0);
  CHECK(rho("x == 3", s) == 0.0);
  CHECK(rho("x == 5", s) == -2.0);
}

TEST_CASE("temporal operators over a hand-checked signal") {
  const Signal s = line({1, -2, 4, 0, 3});
  CHECK(rho("G[0,4](x > -3)", s) == 1.0);
  CHECK(rho("G[0,4](x > 0)", s) == -2.0);
  CHECK(rho("F[0,4](x > 0)", s) == 4.0);
  CHECK(rho("F[3,4](x > 0)", s) == 3.0);
  CHECK(rho("G[1,2](x > 0)", s, 1) == 0.0);
  CHECK(rho("G[0,1](x > 0)", s, 1) == -2.0);
  // lhs must hold on [0, tau) and rhs at tau.
  CHECK(rho("x > -5 U[0,4] x > 3", s) == 1.0);
  CHECK(rho("x > 0 U[0,4] x > 3", s) == -2.0);
  CHECK(rho("x > 0 U[0,0] x > 0", s) == 1.0);
}

TEST_CASE("sine wave example gives zero robustness") {
  std::vector<double> xs;
  for (int j = 0; j <= 8; ++j) xs.push_back(std::sin(2 * std::numbers::pi * j * 0.125));
  double expected = xs.front() + 1;
  for (double x : xs) expected = std::min(expected, x + 1);
  const double r = robustness(parse_formula("G[0,8](x >= -1)"), line(xs), 0).value;
  CHECK(r == expected);
  CHECK(std::abs(r) < 1e-15);
}

TEST_CASE("window policies") {
  const Signal s = line({1, 2});
  const Formula g = parse_formula("G[0,5](x > 0)");
  CHECK(robustness(g, s, 0).value == 1.0);
  CHECK_THROWS_AS(robustness(g, s, 0, {WindowPolicy::Strict}), EvalError);
  CHECK(robustness(parse_formula("G[1,1](x > 0)"), s, 0, {WindowPolicy::Strict}).value == 2.0);
  // Empty clipped windows give the neutral element, clamped to the cap.
  CHECK(robustness(parse_formula("G[3,4](x > 0)"), s, 0).raw == INFINITY);
  CHECK(robustness(parse_formula("G[3,4](x > 0)"), s, 0).value == kDefaultRobustnessCap);
  CHECK(robustness(parse_formula("F[3,4](x > 0)"), s, 0).value == -kDefaultRobustnessCap);
  CHECK(robustness(parse_formula("F[3,4](x > 0)"), s, 0, {WindowPolicy::Clip, 10.0}).value == -10.0);
  CHECK_THROWS_AS(robustness(g, Signal{{"x", {}}}, 0), EvalError);
  CHECK_THROWS_AS(robustness(parse_formula("y > 0"), s, 0), EvalError);
  CHECK_THROWS_AS(robustness(g, s, 2), EvalError);
}

TEST_CASE("signal bookkeeping") {
  Signal s(std::vector<std::string>{"a", "b"});
  const double sample[] = {1.0, 2.0};
  s.append(sample);
  s.append(sample);
  CHECK(s.length() == 2);
  CHECK(s.channel("b") == std::vector<double>{2.0, 2.0});
  CHECK(s.prefix(1).length() == 1);
  CHECK_THROWS_AS(s.add_channel("c", {1.0}), EvalError);
  CHECK_THROWS_AS(s.channel("zz"), EvalError);
}

TEST_CASE("sign of robustness agrees with the Boolean oracle") {
  oracle::Generator gen(11);
  int nonzero = 0;
  for (int i = 0; i < 3000; ++i) {
    const Formula f = gen.formula();
    const Signal s = gen.signal();
    const double r = robustness(f, s, 0).value;
    if (r == 0.0) continue;
    ++nonzero;
    INFO(f.to_string());
    REQUIRE((r > 0) == oracle::holds(f, s, 0));
  }
  CHECK(nonzero > 2000);
}

TEST_CASE("dualities hold exactly at every sample") {
  oracle::Generator gen(12);
  const Interval w{Bound::literal(1), Bound::literal(3)};
  for (int i = 0; i < 1000; ++i) {
    const Formula a = gen.formula(3);
    const Formula b = gen.formula(3);
    const Signal s = gen.signal();
    const auto ra = robustness_trace(a, s);
    const auto neg = robustness_trace(Formula::negation(a), s);
    const auto conj = robustness_trace(Formula::conjunction(a, b), s);
    const auto dual_conj = robustness_trace(
        Formula::disjunction(Formula::negation(a), Formula::negation(b)), s);
    const auto alw = robustness_trace(Formula::always(w, a), s);
    const auto dual_alw = robustness_trace(Formula::eventually(w, Formula::negation(a)), s);
    for (std::size_t t = 0; t < s.length(); ++t) {
      REQUIRE(neg[t] == -ra[t]);
      REQUIRE(conj[t] == -dual_conj[t]);
      REQUIRE(alw[t] == -dual_alw[t]);
    }
  }
}

TEST_CASE("raising a lower-bound threshold lowers robustness by the same amount") {
  oracle::Generator gen(13);
  for (int i = 0; i < 500; ++i) {
    const Signal s = gen.signal();
    const double c = gen.value();
    const double delta = 0.25 * gen.uniform(1, 8);
    for (Comparator cmp : {Comparator::Greater, Comparator::GreaterEq}) {
      const auto lo = robustness_trace(Formula::predicate("x", cmp, c), s);
      const auto hi = robustness_trace(Formula::predicate("x", cmp, c + delta), s);
      for (std::size_t t = 0; t < s.length(); ++t) REQUIRE(hi[t] == lo[t] - delta);
    }
  }
}

TEST_CASE("printing and re-parsing yields the same formula") {
  oracle::Generator gen(14);
  for (int i = 0; i < 2000; ++i) {
    const Formula f = gen.formula();
    const std::string text = f.to_string();
    INFO(text);
    const Formula once = parse_formula(text);
    REQUIRE(once == f);
    REQUIRE(parse_formula(once.to_string()) == once);
  }
  const Formula p = parse_formula("G[0,T](d_obs >= 1) -> F[2,T_goal](d_goal < 1)");
  CHECK(parse_formula(p.to_string()) == p);
}

TEST_CASE("prefix robustness matches full evaluation") {
  oracle::Generator gen(15);
  int in_range = 0;
  for (int i = 0; i < 2000; ++i) {
    const Formula f = gen.formula();
    const Signal s = gen.signal();
    CHECK(robustness_prefix(f, s).value == robustness(f, s, 0).value);
    if (static_cast<std::size_t>(f.horizon()) < s.length()) {
      ++in_range;
      REQUIRE(robustness_prefix(f, s).value == robustness(f, s, 0, {WindowPolicy::Strict}).value);
    }
  }
  CHECK(in_range > 100);
}

TEST_CASE("prefix monitor agrees with recomputation on every prefix") {
  oracle::Generator gen(16);
  std::vector<Formula> formulas = {parse_formula("G[0,20](x >= 1)"), parse_formula("F[2,6](y < 0)"),
                                   parse_formula("G[1,3](x > 0 and y > 0)")};
  for (int i = 0; i < 200; ++i) formulas.push_back(gen.formula());
  for (const Formula& f : formulas) {
    PrefixMonitor m(f, {"x", "y"});
    const Signal s = gen.signal(12);
    for (int pass = 0; pass < 2; ++pass) {
      m.reset();
      for (std::size_t n = 1; n <= s.length(); ++n) {
        const double sample[] = {s.channel("x")[n - 1], s.channel("y")[n - 1]};
        const double v = m.push(sample);
        INFO(f.to_string());
        REQUIRE(v == robustness_prefix(f, s.prefix(n)).value);
      }
    }
  }
  CHECK(PrefixMonitor(parse_formula("G[0,20](x >= 1)"), {"x"}).incremental());
  CHECK_FALSE(PrefixMonitor(parse_formula("G[0,2](F[0,1](x >= 1))"), {"x"}).incremental());
}

TEST_CASE("squash transforms") {
  CHECK(Squash{}.apply(3.5) == 3.5);
  CHECK(Squash{Squash::Kind::Tanh, 2.0}.apply(2.0) == doctest::Approx(std::tanh(1.0)));
}
