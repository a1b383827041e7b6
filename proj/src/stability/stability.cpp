#include "retfront/stability/stability.hpp"

#include <algorithm>

#include "retfront/errors.hpp"

namespace retfront::stability {

using jetalg::ModuleBlock;
using jetalg::Monomial;
using jetalg::Role;

namespace {

/// Sets t and/or u to zero and re-expresses the jet in `target`.
JetPoly restrict_to(const JetPoly& f, const RingContext& target, bool keep_t, bool keep_u) {
  const RingContext& src = f.context();
  std::vector<int> zero;
  if (!keep_t) zero = src.vars(Role::T);
  if (!keep_u) {
    auto u = src.vars(Role::U);
    zero.insert(zero.end(), u.begin(), u.end());
  }
  JetPoly g = f.restrict_zero(zero);
  std::vector<int> map(src.num_vars(), -1);
  int next = 0;
  for (int v = 0; v < src.num_vars(); ++v) {
    const Role role = src.role(v);
    if ((role == Role::T && !keep_t) || (role == Role::U && !keep_u)) continue;
    map[v] = next++;
  }
  return g.embed(target, map);
}

/// Order-L jet of a partial derivative of a jet known to order L + 1.
JetPoly derivative(const JetPoly& f_hi, int var, int truncation) {
  return partial(f_hi, var).with_truncation(truncation);
}

RingContext without_t(const RingContext& ctx) {
  if (ctx.has_z()) return RingContext::generating_family(ctx.r(), ctx.k(), 0, ctx.n() - 1);
  return RingContext(ctx.r(), ctx.k(), 0, ctx.n());
}

std::vector<std::string> render(const RingContext& ctx, const std::vector<Monomial>& ms) {
  std::vector<std::string> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(m.to_string(ctx));
  return out;
}

int resolve_truncation(const UnfoldingSpec& spec, const CheckOptions& options, StabilityReport& report) {
  if (!spec.core().is_zero()) {
    report.base_determinacy = equivalence::determinacy_order(spec.core(), options.l_max, options.limits);
  }
  if (options.truncation) {
    if (*options.truncation < 0) throw PreconditionError("truncation order must be non-negative");
    return *options.truncation;
  }
  if (!report.base_determinacy || !report.base_determinacy->determined()) {
    throw PreconditionError("base germ is not finitely determined up to order " + std::to_string(options.l_max) +
                            "; supply a truncation order explicitly");
  }
  return transversal_order(report.base_determinacy->order_tested, std::max(spec.F().context().m(), 1));
}

/// Ambient 1-jet rank test shared by the two non-degeneracy predicates.
bool nondegenerate(const JetPoly& F, bool with_t) {
  const RingContext& ctx = F.context();
  if (!ctx.has_z()) throw PreconditionError("non-degeneracy needs a generating-family ring with q and z");
  if (with_t && ctx.m() == 0) throw PreconditionError("P-C-non-degeneracy needs a t variable");
  if (F.constant_term() != 0) throw PreconditionError("generating family must vanish at the origin");

  const JetPoly G = F.with_truncation(std::max(F.truncation(), 2));
  std::vector<JetPoly> derivs;
  for (int x : ctx.vars(Role::X)) derivs.push_back(partial(G, x));
  for (int y : ctx.vars(Role::Y)) derivs.push_back(partial(G, y));
  for (const auto& d : derivs) {
    if (d.constant_term() != 0) return false;
  }

  std::vector<JetPoly> functionals;
  for (int x : ctx.vars(Role::X)) functionals.push_back(JetPoly::variable(ctx, 1, x));
  if (with_t) {
    for (int t : ctx.vars(Role::T)) functionals.push_back(JetPoly::variable(ctx, 1, t));
  }
  functionals.push_back(G.with_truncation(1));
  for (const auto& d : derivs) functionals.push_back(d.with_truncation(1));
  auto span = jetalg::linear_span(ctx, 1, functionals);
  return span.rank() == functionals.size();
}

}  // namespace

int transversal_order(int l, int m) {
  if (l < 0) throw PreconditionError("determinacy order must be non-negative");
  if (m < 1) throw PreconditionError("transversal order needs m >= 1");
  return l * m + l + m + 1;
}

UnfoldingSpec::UnfoldingSpec(JetPoly F) : F_(std::move(F)) {
  const RingContext& ctx = F_.context();
  if (F_.constant_term() != 0) throw PreconditionError("unfolding must vanish at the origin");
  base_ = restrict_to(F_, without_t(ctx), false, true);
  core_ = restrict_to(F_, RingContext(ctx.r(), ctx.k(), 0, 0), false, false);
}

nlohmann::json StabilityReport::to_json() const {
  nlohmann::json j;
  j["label"] = label;
  j["versal"] = versal ? nlohmann::json(*versal) : nlohmann::json(nullptr);
  j["stable"] = stable ? nlohmann::json(*stable) : nlohmann::json(nullptr);
  j["truncation"] = truncation;
  j["cobasis"] = cobasis;
  j["base_determinacy"] = base_determinacy ? nlohmann::json(base_determinacy->to_string()) : nlohmann::json(nullptr);
  return j;
}

StabilityReport is_infinitesimally_versal(const UnfoldingSpec& spec, const CheckOptions& options) {
  StabilityReport report;
  const int L = resolve_truncation(spec, options, report);
  report.truncation = L;

  const JetPoly f = spec.base().with_truncation(L);
  const JetPoly f_hi = spec.base().with_truncation(L + 1);
  const RingContext& ctx = f.context();
  ModuleBlock full{{f}, ctx.all_vars(), 0};
  for (int x : ctx.vars(Role::X)) full.generators.push_back(euler_term(f, x));
  for (int y : ctx.vars(Role::Y)) full.generators.push_back(derivative(f_hi, y, L));
  ModuleBlock params{{}, ctx.vars(Role::U), 0};
  for (int u : ctx.vars(Role::U)) params.generators.push_back(derivative(f_hi, u, L));
  ModuleBlock times{{}, {}, 0};
  const JetPoly F_hi = spec.F().with_truncation(L + 1);
  for (int t : F_hi.context().vars(Role::T)) {
    times.generators.push_back(restrict_to(derivative(F_hi, t, L), ctx, false, true));
  }
  std::vector<ModuleBlock> blocks{full, params, times};
  auto span = jetalg::span_of(ctx, L, blocks, options.limits);
  report.versal = span.is_full();
  report.cobasis = render(ctx, quotient_cobasis(span));
  return report;
}

StabilityReport is_infinitesimally_stable(const UnfoldingSpec& spec, const CheckOptions& options) {
  StabilityReport report;
  const int L = resolve_truncation(spec, options, report);
  report.truncation = L;

  const JetPoly F = spec.F().with_truncation(L);
  const JetPoly F_hi = spec.F().with_truncation(L + 1);
  const RingContext& ctx = F.context();
  ModuleBlock full{{F}, ctx.all_vars(), 0};
  for (int x : ctx.vars(Role::X)) full.generators.push_back(euler_term(F, x));
  for (int y : ctx.vars(Role::Y)) full.generators.push_back(derivative(F_hi, y, L));
  std::vector<int> tu = ctx.vars(Role::T);
  for (int u : ctx.vars(Role::U)) tu.push_back(u);
  ModuleBlock params{{}, tu, 0};
  for (int u : ctx.vars(Role::U)) params.generators.push_back(derivative(F_hi, u, L));
  ModuleBlock times{{}, ctx.vars(Role::T), 0};
  for (int t : ctx.vars(Role::T)) times.generators.push_back(derivative(F_hi, t, L));
  std::vector<ModuleBlock> blocks{full, params, times};
  auto span = jetalg::span_of(ctx, L, blocks, options.limits);
  report.stable = span.is_full();
  report.cobasis = render(ctx, quotient_cobasis(span));
  return report;
}

bool is_C_nondegenerate(const JetPoly& F) { return nondegenerate(F, false); }

bool is_PC_nondegenerate(const JetPoly& F) { return nondegenerate(F, true); }

StabilityReport check_generating_family_stable(const JetPoly& F, const CheckOptions& options) {
  if (F.context().m() != 1) throw PreconditionError("generating family must have exactly one t variable");
  if (!is_PC_nondegenerate(F)) throw PreconditionError("generating family is not P-C-non-degenerate");
  return is_infinitesimally_stable(UnfoldingSpec(F), options);
}

}  // namespace retfront::stability
