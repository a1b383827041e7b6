#ifndef RETFRONT_EQUIVALENCE_EQUIVALENCE_HPP
#define RETFRONT_EQUIVALENCE_EQUIVALENCE_HPP

#include <string>
#include <vector>

#include "retfront/jetalg/subspace.hpp"

namespace retfront::equivalence {

using jetalg::JetLimits;
using jetalg::JetPoly;
using jetalg::Monomial;
using jetalg::SubspaceBasis;

enum class DeterminacyStatus { DeterminedAtMost, NecessaryFailed, Unknown };

struct DeterminacyVerdict {
  int order_tested = 0;
  DeterminacyStatus status = DeterminacyStatus::Unknown;

  bool determined() const { return status == DeterminacyStatus::DeterminedAtMost; }
  /// "DeterminedAtMost(3)", "NecessaryFailed(2)", "Unknown(12)".
  std::string to_string() const;
};

/// <f0, x_i df0/dx_i>_E + M <df0/dy_j>, truncated at L. Requires m = n = 0.
SubspaceBasis reticular_K_tangent(const JetPoly& f0, int truncation, const JetLimits& limits = {});

/// Sufficient test M^{l+1} in M(<f0, x df0/dx> + M <df0/dy>) + M^{l+2};
/// on failure the converse inclusion decides NecessaryFailed vs Unknown.
DeterminacyVerdict is_K_l_determined(const JetPoly& f0, int l, const JetLimits& limits = {});

/// Smallest l in 1..l_max passing the sufficient test, else Unknown(l_max).
/// Rejects the zero germ.
DeterminacyVerdict determinacy_order(const JetPoly& f0, int l_max = 12, const JetLimits& limits = {});

/// <f, x df/dx>_{E(r;k+n)} + M(r;k+n) <df/dy> + M(n) <df/du>. Requires m = 0.
SubspaceBasis reticular_PK_orbit_tangent(const JetPoly& f, int truncation, const JetLimits& limits = {});

struct KCodimension {
  std::size_t dim = 0;
  std::vector<Monomial> cobasis;
  /// No cobasis monomial of degree >= L - 1.
  bool stabilized = false;
  /// hilbert[i] = number of cobasis monomials of degree i; trailing zeros dropped.
  std::vector<std::size_t> hilbert;
};

KCodimension K_codimension(const JetPoly& f0, int truncation, const JetLimits& limits = {});

}  // namespace retfront::equivalence

#endif  // RETFRONT_EQUIVALENCE_EQUIVALENCE_HPP
