#ifndef RETFRONT_CATALOG_CATALOG_HPP
#define RETFRONT_CATALOG_CATALOG_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "retfront/stability/stability.hpp"

namespace retfront::catalog {

using jetalg::JetPoly;
using jetalg::RingContext;

/// One instantiated normal form F(x, y, t, q, z).
struct NormalFormEntry {
  /// Full label with signs resolved, e.g. "1D4-", "0A3", "1B3".
  std::string label;
  /// Label without the signs, e.g. "1D4", "0C3".
  std::string base_label;
  /// Singularity type of F|_{t=q=z=0}, e.g. "D4-", "B3", "A3".
  std::string family;
  int r = 0;
  int k = 0;
  /// Number of q parameters.
  int n = 0;
  int variant = 1;
  std::vector<int> signs;
  std::string text;

  RingContext context() const { return RingContext::generating_family(r, k, 1, n); }
  JetPoly polynomial() const;
  /// F|_{t=q=z=0} over (r; k).
  JetPoly base_germ() const;
  /// "1D4- v2 (n=3)" style description.
  std::string describe() const;
  nlohmann::json to_json() const;
};

/// Working truncation order used for parsing catalog polynomials.
inline constexpr int kTemplateTruncation = 24;

/// Instantiations with entry.n <= n. Throws PreconditionError unless
/// r = 0, 1 <= n <= 4 or r = 1, 1 <= n <= 2.
std::vector<NormalFormEntry> list_entries(int r, int n);

/// Both lists at their maximal n.
std::vector<NormalFormEntry> all_entries();

/// `label` is a base label ("1D4") or a signed label ("1D4-"); an explicit
/// sign vector overrides the label's sign. For 1A_l the number of signs
/// fixes n = l + signs.size().
NormalFormEntry instantiate(const std::string& label, const std::vector<int>& signs = {}, int variant = 1);

struct EntryResult {
  NormalFormEntry entry;
  bool pc_nondegenerate = false;
  std::optional<stability::StabilityReport> report;
  std::string error;
  double seconds = 0.0;

  bool passed() const { return pc_nondegenerate && report && report->stable.value_or(false); }
};

struct CatalogReport {
  std::vector<EntryResult> results;
  double seconds = 0.0;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

/// Worker count from RETFRONT_THREADS, else hardware concurrency.
unsigned worker_count();

/// Runs P-C-non-degeneracy and generating-family stability on each entry.
CatalogReport verify_catalog(const std::vector<NormalFormEntry>& entries, unsigned threads = 0);
CatalogReport verify_catalog();

/// Verifies F (e.g. a mutated form) under the given entry's label.
EntryResult verify_polynomial(const NormalFormEntry& entry, const JetPoly& F);

struct Fingerprint {
  int r = 0;
  /// k minus the rank of the y-Hessian at 0.
  int corank = 0;
  /// Reticular K-codimension minus the y-Hessian rank.
  std::size_t codim = 0;
  /// Hilbert sequence with the y-Hessian rank removed from degree 1.
  std::vector<std::size_t> hilbert;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
  nlohmann::json to_json() const;
};

/// Throws PreconditionError when f0 is not determined within l_max.
Fingerprint fingerprint(const JetPoly& f0, int l_max = 12);

struct Recognition {
  bool classified = false;
  /// Type name ("B3", "C3+", "D4-", "D6"); empty when unclassified.
  std::string family;
  /// Catalog labels with this base type, restricted by n.
  std::vector<std::string> labels;
  /// Types sharing the fingerprint when the sign cannot be resolved.
  std::vector<std::string> candidates;
  Fingerprint fingerprint;
  std::string note;

  nlohmann::json to_json() const;
};

/// Matches f0 in M(r;k)^2 against the catalog base germs with entry.n <= n
/// (default: 4 for r = 0, 2 for r = 1).
Recognition recognize(const JetPoly& f0, std::optional<int> n = std::nullopt);

}  // namespace retfront::catalog

#endif  // RETFRONT_CATALOG_CATALOG_HPP
