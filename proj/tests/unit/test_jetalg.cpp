#include <doctest.h>

#include <random>

#include "retfront/errors.hpp"
#include "retfront/jetalg/poly_text.hpp"
#include "retfront/jetalg/subspace.hpp"

using namespace retfront;
using namespace retfront::jetalg;

namespace {

std::vector<std::string> names(const RingContext& ctx, const std::vector<Monomial>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.degree() == 0 ? "1" : m.to_string(ctx));
  return out;
}

JetPoly random_jet(const RingContext& ctx, int L, std::mt19937& rng) {
  std::uniform_int_distribution<int> coef(-4, 4);
  JetPoly p(ctx, L);
  for (const auto& m : all_monomials(ctx.num_vars(), L)) {
    if (rng() % 3 == 0) p.add_term(m, Rational(coef(rng), 1 + rng() % 3));
  }
  return p;
}

}  // namespace

TEST_CASE("truncated multiplication") {
  RingContext cx(1, 0, 0, 0);
  RingContext cy(0, 1, 0, 0);
  CHECK(mul_truncated(parse_jet("1+x", cx, 2), parse_jet("1-x", cx, 2)) == parse_jet("1-x^2", cx, 2));
  CHECK(mul_truncated(parse_jet("x^2", cx, 3), parse_jet("x^2", cx, 3)).is_zero());
  CHECK(mul_truncated(parse_jet("y+y^2", cy, 3), parse_jet("y+y^2", cy, 3)) == parse_jet("y^2+2y^3", cy, 3));
  CHECK_THROWS_AS(mul_truncated(parse_jet("x", cx, 2), parse_jet("x", cx, 3)), ContextMismatch);
}

TEST_CASE("partial derivatives") {
  RingContext ct(1, 0, 1, 0);
  RingContext cy(0, 1, 0, 0);
  CHECK(partial(parse_jet("y^3", cy, 4), 0) == parse_jet("3y^2", cy, 4));
  CHECK(partial(parse_jet("x^3+t*x^2", ct, 4), 0) == parse_jet("3x^2+2t*x", ct, 4));
  CHECK(euler_term(parse_jet("x^3", ct, 4), 0) == parse_jet("3x^3", ct, 4));
}

TEST_CASE("parser") {
  RingContext ctx = RingContext::generating_family(1, 2, 1, 2);
  JetPoly p = parse_jet("-3/2 x*y1^2 + 0.25 t q2 - (z)", ctx, 5);
  CHECK(p.terms().size() == 3);
  CHECK(p.coefficient(Monomial::unit(ctx.num_vars(), ctx.z_var())) == -1);
  CHECK_THROWS_AS(parse_jet("x +", ctx, 3), ParseError);
  CHECK_THROWS_AS(parse_jet("w", ctx, 3), ParseError);
  CHECK_THROWS_AS(parse_jet("x^", ctx, 3), ParseError);
  CHECK_THROWS_AS(parse_jet("1/0", ctx, 3), ParseError);
  CHECK(parse_jet(p.to_string(), ctx, 5) == p);
}

TEST_CASE("module spans") {
  RingContext cy(0, 1, 0, 0);
  ModuleBlock b{{parse_jet("y^2", cy, 4)}, {0}, 1};
  auto s = module_span(cy, 4, b);
  CHECK(names(cy, s.pivots()) == std::vector<std::string>{"y^3", "y^4"});

  RingContext ct(1, 0, 1, 0);
  ModuleBlock tb{{JetPoly::constant(ct, 2, 1)}, {1}, 0};
  CHECK(names(ct, module_span(ct, 2, tb).pivots()) == std::vector<std::string>{"1", "t", "t^2"});

  RingContext cx(1, 0, 0, 0);
  ModuleBlock xb{{parse_jet("x^3", cx, 5), parse_jet("3x^3", cx, 5)}, {0}, 0};
  auto ideal = module_span(cx, 5, xb);
  CHECK(names(cx, ideal.pivots()) == std::vector<std::string>{"x^3", "x^4", "x^5"});
  CHECK(contains(ideal, parse_jet("x^4", cx, 5)).contained);
  auto miss = contains(ideal, parse_jet("x^2", cx, 5));
  CHECK_FALSE(miss.contained);
  CHECK(miss.residue == parse_jet("x^2", cx, 5));
  CHECK(names(cx, quotient_cobasis(ideal)) == std::vector<std::string>{"1", "x", "x^2"});

  ModuleBlock empty{{}, {0}, 0};
  auto none = module_span(cy, 1, empty);
  CHECK(none.rank() == 0);
  CHECK(names(cy, quotient_cobasis(none)) == std::vector<std::string>{"1", "y"});

  ModuleBlock one{{JetPoly::constant(cy, 3, 1)}, {0}, 0};
  CHECK(quotient_cobasis(module_span(cy, 3, one)).empty());
}

TEST_CASE("membership needs the whole row") {
  RingContext cy(0, 1, 0, 0);
  std::vector<JetPoly> gens{parse_jet("y^3+y^4", cy, 4)};
  auto s = linear_span(cy, 4, gens);
  CHECK_FALSE(contains(s, parse_jet("y^3", cy, 4)).contained);
  CHECK(contains(s, parse_jet("2y^3+2y^4", cy, 4)).contained);
  gens.push_back(parse_jet("y^4", cy, 4));
  CHECK(contains(linear_span(cy, 4, gens), parse_jet("y^3", cy, 4)).contained);
}

TEST_CASE("rows are reduced with ascending pivots") {
  RingContext ctx(1, 1, 0, 1);
  std::vector<JetPoly> gens{parse_jet("x*y + y^3 + u", ctx, 4), parse_jet("y + x^2 - u*y", ctx, 4),
                            parse_jet("x + y^2", ctx, 4)};
  ModuleBlock b{gens, {0, 1, 2}, 0};
  auto s = module_span(ctx, 4, b);
  auto rows = s.rows();
  auto piv = s.pivots();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].terms().begin()->first == piv[i]);
    CHECK(rows[i].coefficient(piv[i]) == 1);
    if (i > 0) CHECK(piv[i - 1] < piv[i]);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j != i) CHECK(rows[i].coefficient(piv[j]) == 0);
    }
  }
}

TEST_CASE("dimension cap") {
  RingContext ctx(0, 6, 0, 0);
  ModuleBlock b{{JetPoly::constant(ctx, 20, 1)}, {0}, 0};
  CHECK_THROWS_AS(module_span(ctx, 20, b), DimensionCapExceeded);
  CHECK_THROWS_AS(module_span(ctx, 3, b, JetLimits{10}), DimensionCapExceeded);
  CHECK(jet_space_dimension(3, 4) == 35);
}

TEST_CASE("property: ring axioms under truncation") {
  std::mt19937 rng(7);
  RingContext ctx(1, 1, 1, 0);
  for (int trial = 0; trial < 20; ++trial) {
    JetPoly a = random_jet(ctx, 4, rng), b = random_jet(ctx, 4, rng), c = random_jet(ctx, 4, rng);
    CHECK(mul_truncated(a, b) == mul_truncated(b, a));
    CHECK(mul_truncated(mul_truncated(a, b), c) == mul_truncated(a, mul_truncated(b, c)));
    CHECK(mul_truncated(a, b + c) == mul_truncated(a, b) + mul_truncated(a, c));
  }
}

TEST_CASE("property: span idempotence, generator membership, dimension count") {
  std::mt19937 rng(11);
  RingContext ctx(1, 1, 0, 1);
  const int L = 4;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<JetPoly> gens;
    for (int g = 0; g < 2; ++g) {
      JetPoly p = random_jet(ctx, L, rng);
      p.add_term(Monomial(ctx.num_vars()), -p.constant_term());
      gens.push_back(p);
    }
    const std::vector<int> mv{0, 2};
    ModuleBlock b{gens, mv, 1};
    auto s = module_span(ctx, L, b);
    auto again = linear_span(ctx, L, s.rows());
    CHECK(again == s);
    for (const auto& g : gens) {
      for (const auto& mu : all_monomials(ctx.num_vars(), L)) {
        if (mu.degree() < 1 || !mu.supported_on(mv)) continue;
        CHECK(contains(s, g.shifted(mu)).contained);
      }
    }
    CHECK(quotient_cobasis(s).size() + s.rank() == jet_space_dimension(ctx.num_vars(), L));
  }
}
