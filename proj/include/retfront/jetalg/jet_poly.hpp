#ifndef RETFRONT_JETALG_JET_POLY_HPP
#define RETFRONT_JETALG_JET_POLY_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "retfront/jetalg/ring_context.hpp"

namespace retfront::jetalg {

using Rational = mpq_class;

/// Exponent vector indexed by the variables of a RingContext.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int num_vars) : exps_(num_vars, 0) {}
  explicit Monomial(std::vector<std::uint16_t> exps);

  static Monomial unit(int num_vars, int var, int power = 1);

  int num_vars() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  std::uint16_t operator[](int var) const { return exps_[var]; }
  const std::vector<std::uint16_t>& exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const;
  bool divisible_by(const Monomial& other) const;

  /// True when every variable with a nonzero exponent is in `vars`.
  bool supported_on(std::span<const int> vars) const;

  /// Graded lexicographic order, later variables more significant
  /// (x < y < t < u), lowest degree first.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

  std::string to_string(const RingContext& ctx) const;

 private:
  std::vector<std::uint16_t> exps_;
  int degree_ = 0;
};

/// Number of monomials of total degree <= order in `num_vars` variables,
/// saturating at UINT64_MAX.
std::uint64_t jet_space_dimension(int num_vars, int order);

/// The order-L jet of a germ: a polynomial over exact rationals with every
/// term of total degree > L discarded.
class JetPoly {
 public:
  using TermMap = std::map<Monomial, Rational>;

  JetPoly() = default;
  JetPoly(RingContext ctx, int truncation);

  static JetPoly constant(const RingContext& ctx, int truncation, const Rational& c);
  static JetPoly variable(const RingContext& ctx, int truncation, int var);
  static JetPoly monomial(const RingContext& ctx, int truncation, const Monomial& m,
                          const Rational& c = 1);

  const RingContext& context() const { return ctx_; }
  int truncation() const { return truncation_; }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(const Monomial& m) const;
  Rational constant_term() const;
  /// Lowest total degree present; -1 for the zero jet.
  int order() const;
  /// Highest total degree present; -1 for the zero jet.
  int degree() const;

  /// Adds c*m; terms above the truncation are dropped.
  void add_term(const Monomial& m, const Rational& c);

  JetPoly& operator+=(const JetPoly& other);
  JetPoly& operator-=(const JetPoly& other);
  JetPoly& operator*=(const Rational& c);
  friend JetPoly operator+(JetPoly a, const JetPoly& b) { return a += b; }
  friend JetPoly operator-(JetPoly a, const JetPoly& b) { return a -= b; }
  friend JetPoly operator*(JetPoly a, const Rational& c) { return a *= c; }
  friend JetPoly operator*(const Rational& c, JetPoly a) { return a *= c; }
  JetPoly operator-() const;

  /// Multiplies by a monomial, truncating.
  JetPoly shifted(const Monomial& m) const;

  /// Same jet read at another truncation order (terms above it dropped).
  JetPoly with_truncation(int truncation) const;

  /// Substitutes 0 for every variable in `vars` (context unchanged).
  JetPoly restrict_zero(std::span<const int> vars) const;

  /// Re-expresses the jet in `target`. var_map[i] is the target index of
  /// source variable i, or -1 when that variable must not occur.
  JetPoly embed(const RingContext& target, std::span<const int> var_map) const;

  /// f(images[0], ..., images[v-1]) truncated at the images' order.
  JetPoly compose(std::span<const JetPoly> images) const;

  double evaluate(std::span<const double> point) const;

  std::string to_string() const;

  friend bool operator==(const JetPoly& a, const JetPoly& b);

 private:
  RingContext ctx_;
  int truncation_ = 0;
  TermMap terms_;
};

/// Product with all terms of degree > L discarded.
JetPoly mul_truncated(const JetPoly& a, const JetPoly& b);

/// Formal partial derivative; the truncation order is kept.
JetPoly partial(const JetPoly& a, int var);

/// x_var * d/dx_var.
JetPoly euler_term(const JetPoly& a, int var);

/// Throws ContextMismatch unless both jets share context and truncation.
void require_compatible(const JetPoly& a, const JetPoly& b);

}  // namespace retfront::jetalg

#endif  // RETFRONT_JETALG_JET_POLY_HPP
