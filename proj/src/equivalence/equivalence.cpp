#include "retfront/equivalence/equivalence.hpp"

#include "retfront/errors.hpp"

namespace retfront::equivalence {

using jetalg::ModuleBlock;
using jetalg::RingContext;
using jetalg::Role;

namespace {

void require_germ_ring(const JetPoly& f, bool allow_params) {
  const RingContext& ctx = f.context();
  if (ctx.m() != 0 || (!allow_params && ctx.n() != 0)) {
    throw PreconditionError("germ must live in E(r;k" + std::string(allow_params ? "+n" : "") + "), got " +
                            ctx.describe());
  }
  if (ctx.num_vars() == 0) throw PreconditionError("germ ring has no variables");
  if (f.constant_term() != 0) throw PreconditionError("germ has nonzero constant term (unit germ)");
}

/// Blocks for <f, x df/dx>_E (min_degree a) + M^{1+a} <df/dy>.
std::vector<ModuleBlock> k_blocks(const JetPoly& f, int truncation, int extra_degree) {
  const RingContext& ctx = f.context();
  const JetPoly g = f.with_truncation(truncation);
  ModuleBlock main{{g}, ctx.all_vars(), extra_degree};
  for (int x : ctx.vars(Role::X)) main.generators.push_back(euler_term(g, x));
  ModuleBlock internal{{}, ctx.all_vars(), extra_degree + 1};
  for (int y : ctx.vars(Role::Y)) internal.generators.push_back(partial(g, y));
  return {main, internal};
}

std::size_t pivots_of_degree(const SubspaceBasis& s, int degree) {
  std::size_t count = 0;
  for (const auto& p : s.pivots()) count += (p.degree() == degree);
  return count;
}

}  // namespace

std::string DeterminacyVerdict::to_string() const {
  const char* name = "Unknown";
  if (status == DeterminacyStatus::DeterminedAtMost) name = "DeterminedAtMost";
  if (status == DeterminacyStatus::NecessaryFailed) name = "NecessaryFailed";
  return std::string(name) + "(" + std::to_string(order_tested) + ")";
}

SubspaceBasis reticular_K_tangent(const JetPoly& f0, int truncation, const JetLimits& limits) {
  require_germ_ring(f0, false);
  auto blocks = k_blocks(f0, truncation, 0);
  return span_of(f0.context(), truncation, blocks, limits);
}

DeterminacyVerdict is_K_l_determined(const JetPoly& f0, int l, const JetLimits& limits) {
  if (l < 0) throw PreconditionError("determinacy order must be non-negative");
  require_germ_ring(f0, false);
  const RingContext& ctx = f0.context();
  const int L = l + 1;
  const std::size_t top = jetalg::jet_space_dimension(ctx.num_vars(), L) - jetalg::jet_space_dimension(ctx.num_vars(), l);

  // Rows with pivot degree L span the intersection with M^L = M^{l+1} mod M^{l+2}.
  auto sufficient = span_of(ctx, L, k_blocks(f0, L, 1), limits);
  if (pivots_of_degree(sufficient, L) == top) return {l, DeterminacyStatus::DeterminedAtMost};

  auto necessary = span_of(ctx, L, k_blocks(f0, L, 0), limits);
  if (pivots_of_degree(necessary, L) != top) return {l, DeterminacyStatus::NecessaryFailed};
  return {l, DeterminacyStatus::Unknown};
}

DeterminacyVerdict determinacy_order(const JetPoly& f0, int l_max, const JetLimits& limits) {
  require_germ_ring(f0, false);
  if (f0.is_zero()) throw PreconditionError("the zero germ is not finitely determined");
  for (int l = 1; l <= l_max; ++l) {
    auto v = is_K_l_determined(f0, l, limits);
    if (v.determined()) return v;
  }
  return {l_max, DeterminacyStatus::Unknown};
}

SubspaceBasis reticular_PK_orbit_tangent(const JetPoly& f, int truncation, const JetLimits& limits) {
  require_germ_ring(f, true);
  const RingContext& ctx = f.context();
  auto blocks = k_blocks(f, truncation, 0);
  const JetPoly g = f.with_truncation(truncation);
  ModuleBlock params{{}, ctx.vars(Role::U), 1};
  for (int u : ctx.vars(Role::U)) params.generators.push_back(partial(g, u));
  blocks.push_back(std::move(params));
  return span_of(ctx, truncation, blocks, limits);
}

KCodimension K_codimension(const JetPoly& f0, int truncation, const JetLimits& limits) {
  auto tangent = reticular_K_tangent(f0, truncation, limits);
  KCodimension out;
  out.cobasis = quotient_cobasis(tangent);
  out.dim = out.cobasis.size();
  out.hilbert.assign(truncation + 1, 0);
  out.stabilized = true;
  for (const auto& m : out.cobasis) {
    out.hilbert[m.degree()] += 1;
    if (m.degree() >= truncation - 1) out.stabilized = false;
  }
  while (!out.hilbert.empty() && out.hilbert.back() == 0) out.hilbert.pop_back();
  return out;
}

}  // namespace retfront::equivalence
