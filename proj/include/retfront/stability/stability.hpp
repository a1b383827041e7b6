#ifndef RETFRONT_STABILITY_STABILITY_HPP
#define RETFRONT_STABILITY_STABILITY_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "retfront/equivalence/equivalence.hpp"

namespace retfront::stability {

using equivalence::DeterminacyVerdict;
using jetalg::JetLimits;
using jetalg::JetPoly;
using jetalg::RingContext;

/// l' = l m + l + m + 1.
int transversal_order(int l, int m);

/// An unfolding F(x, y, t, u) of f = F|_{t=0}.
class UnfoldingSpec {
 public:
  explicit UnfoldingSpec(JetPoly F);

  const JetPoly& F() const { return F_; }
  /// F|_{t=0} over (r; k, 0, n).
  const JetPoly& base() const { return base_; }
  /// F|_{t=0, u=0} over (r; k, 0, 0).
  const JetPoly& core() const { return core_; }

 private:
  JetPoly F_;
  JetPoly base_;
  JetPoly core_;
};

struct StabilityReport {
  std::string label;
  std::optional<bool> versal;
  std::optional<bool> stable;
  int truncation = 0;
  /// Cobasis of the failed membership (empty when the check passed).
  std::vector<std::string> cobasis;
  std::optional<DeterminacyVerdict> base_determinacy;

  nlohmann::json to_json() const;
};

struct CheckOptions {
  /// Working truncation; default transversal_order(l_base, max(m, 1)).
  std::optional<int> truncation;
  int l_max = 12;
  JetLimits limits;
};

/// E(r;k+n) = <f, x df/dx, df/dy>_{E(r;k+n)} + <df/du>_{E(n)} + <dF/dt|_{t=0}>_R.
StabilityReport is_infinitesimally_versal(const UnfoldingSpec& spec, const CheckOptions& options = {});

/// E(r;k+m+n) = <F, x dF/dx, dF/dy>_{E(r;k+m+n)} + <dF/du>_{E(m+n)} + <dF/dt>_{E(m)}.
StabilityReport is_infinitesimally_stable(const UnfoldingSpec& spec, const CheckOptions& options = {});

/// dF/dx(0) = dF/dy(0) = 0 and the 1-jets of x, F, dF/dx, dF/dy are independent.
/// F must live in a generating-family ring (parameters q, z).
bool is_C_nondegenerate(const JetPoly& F);

/// As is_C_nondegenerate with the t coordinates added to the independent set.
bool is_PC_nondegenerate(const JetPoly& F);

/// Stability of a generating family F(x, y, t, q, z) with u = (q, z), m = 1.
/// Throws PreconditionError unless F is P-C-non-degenerate.
StabilityReport check_generating_family_stable(const JetPoly& F, const CheckOptions& options = {});

}  // namespace retfront::stability

#endif  // RETFRONT_STABILITY_STABILITY_HPP
