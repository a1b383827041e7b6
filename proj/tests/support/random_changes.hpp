#ifndef RETFRONT_TESTS_RANDOM_CHANGES_HPP
#define RETFRONT_TESTS_RANDOM_CHANGES_HPP

#include <random>

#include "retfront/jetalg/jet_poly.hpp"

namespace support {

using namespace retfront::jetalg;

/// a * (f o phi) with phi in B(r;k): x_i -> x_i * unit, y -> A y + B x + quadratic.
inline JetPoly random_equivalent(const JetPoly& f, std::mt19937& rng) {
  const RingContext& ctx = f.context();
  const int L = f.truncation();
  std::uniform_int_distribution<int> small(-3, 3);
  auto nonzero = [&] {
    int v = 0;
    while (v == 0) v = small(rng);
    return Rational(v);
  };
  auto linear = [&](const std::vector<int>& vars) {
    JetPoly p(ctx, L);
    for (int v : vars) p.add_term(Monomial::unit(ctx.num_vars(), v), small(rng));
    return p;
  };
  std::vector<JetPoly> images;
  for (int x : ctx.vars(Role::X)) {
    // Corner coordinates keep their orientation.
    JetPoly unit = JetPoly::constant(ctx, L, abs(nonzero())) + linear(ctx.all_vars());
    images.push_back(mul_truncated(JetPoly::variable(ctx, L, x), unit));
  }
  const auto ys = ctx.vars(Role::Y);
  // Unipotent-times-diagonal matrix keeps A invertible.
  for (std::size_t i = 0; i < ys.size(); ++i) {
    JetPoly img = JetPoly::variable(ctx, L, ys[i]) * nonzero();
    for (std::size_t j = i + 1; j < ys.size(); ++j) img += JetPoly::variable(ctx, L, ys[j]) * Rational(small(rng));
    img += linear(ctx.vars(Role::X));
    JetPoly q = linear(ctx.all_vars());
    img += mul_truncated(q, q);
    images.push_back(img);
  }
  JetPoly a = JetPoly::constant(ctx, L, nonzero()) + linear(ctx.all_vars());
  return mul_truncated(a, f.compose(images));
}

}  // namespace support

#endif  // RETFRONT_TESTS_RANDOM_CHANGES_HPP
