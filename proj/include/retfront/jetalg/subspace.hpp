#ifndef RETFRONT_JETALG_SUBSPACE_HPP
#define RETFRONT_JETALG_SUBSPACE_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "retfront/jetalg/jet_poly.hpp"

namespace retfront::jetalg {

/// Guards every jet-space computation; exceeding it throws DimensionCapExceeded.
struct JetLimits {
  std::uint64_t max_dimension = 200'000;
};

/// generators x { monomials in multiplier_vars of degree >= min_multiplier_degree }.
///
/// min_multiplier_degree = 1 with all variables realizes M * <g>; restricting
/// multiplier_vars realizes coefficients from a subring such as E(t, u).
/// An empty multiplier set contributes the generators themselves (real span)
/// when min_multiplier_degree is 0, and nothing otherwise.
struct ModuleBlock {
  std::vector<JetPoly> generators;
  std::vector<int> multiplier_vars;
  int min_multiplier_degree = 0;
};

struct MembershipReport {
  bool contained = false;
  /// Remainder after reduction; supported on non-pivot monomials only.
  JetPoly residue;
  std::vector<Monomial> cobasis;
};

class MonomialTable;

/// Reduced row-echelon basis of a subspace of J^L. Pivots are the lowest
/// monomial of each row under the graded order, so rows with pivot degree
/// >= i span the intersection with M^i.
class SubspaceBasis {
 public:
  const RingContext& context() const;
  int truncation() const;

  std::size_t rank() const;
  /// dim J^L.
  std::size_t ambient_dimension() const;
  bool is_full() const { return rank() == ambient_dimension(); }

  /// Basis rows, pivot ascending; pivot coefficient 1, zero at other pivots.
  std::vector<JetPoly> rows() const;
  std::vector<Monomial> pivots() const;

  friend bool operator==(const SubspaceBasis& a, const SubspaceBasis& b);

  struct Impl;

 private:
  explicit SubspaceBasis(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend SubspaceBasis span_of(const RingContext&, int, std::span<const ModuleBlock>, const JetLimits&);
  friend SubspaceBasis linear_span(const RingContext&, int, std::span<const JetPoly>, const JetLimits&);
  friend MembershipReport contains(const SubspaceBasis&, const JetPoly&);
  friend std::vector<Monomial> quotient_cobasis(const SubspaceBasis&);
};

/// Sum of several module blocks truncated at L.
SubspaceBasis span_of(const RingContext& ctx, int truncation, std::span<const ModuleBlock> blocks,
                      const JetLimits& limits = {});

/// Single-block convenience form.
SubspaceBasis module_span(const RingContext& ctx, int truncation, const ModuleBlock& block,
                          const JetLimits& limits = {});

/// Plain real span of the given jets.
SubspaceBasis linear_span(const RingContext& ctx, int truncation, std::span<const JetPoly> rows,
                          const JetLimits& limits = {});

MembershipReport contains(const SubspaceBasis& basis, const JetPoly& p);

/// Non-pivot monomials of degree <= L; their count is dim(J^L / span).
std::vector<Monomial> quotient_cobasis(const SubspaceBasis& basis);

/// All monomials of degree <= L in graded order.
std::vector<Monomial> all_monomials(int num_vars, int truncation);

}  // namespace retfront::jetalg

#endif  // RETFRONT_JETALG_SUBSPACE_HPP
