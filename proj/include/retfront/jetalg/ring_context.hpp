#ifndef RETFRONT_JETALG_RING_CONTEXT_HPP
#define RETFRONT_JETALG_RING_CONTEXT_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace retfront::jetalg {

/// Role of a variable in E(r; k+m+n).
enum class Role { X, Y, T, U };

/// Variable partition of the germ ring: r corner variables x, k internal
/// variables y, m time variables t and n parameters u. Variables are laid
/// out in that order; index i < r is x_{i+1}, and so on. A role with a
/// single variable uses the bare letter ("x", "t") as its name.
///
/// A generating-family context names its parameters q1..q_{n-1}, z instead
/// of u1..un, with z always the last parameter.
class RingContext {
 public:
  RingContext() = default;
  RingContext(int r, int k, int m, int n);

  /// Context for F(x, y, t, q, z): n_q parameters q plus one z, so n = n_q + 1.
  static RingContext generating_family(int r, int k, int m, int n_q);

  int r() const { return r_; }
  int k() const { return k_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int num_vars() const { return r_ + k_ + m_ + n_; }

  Role role(int var) const;
  const std::string& name(int var) const { return names_.at(var); }
  const std::vector<std::string>& names() const { return names_; }

  /// Resolves a variable name. Single-variable roles also answer to the
  /// indexed form ("x1" for x when r == 1).
  std::optional<int> find(std::string_view name) const;

  std::vector<int> vars(Role role) const;
  std::vector<int> all_vars() const;

  int first(Role role) const;

  bool has_z() const { return has_z_; }
  /// Index of z; only valid when has_z().
  int z_var() const;
  /// Parameter variables other than z (all u's when !has_z()).
  std::vector<int> q_vars() const;

  friend bool operator==(const RingContext& a, const RingContext& b) {
    return a.r_ == b.r_ && a.k_ == b.k_ && a.m_ == b.m_ && a.n_ == b.n_ && a.has_z_ == b.has_z_;
  }
  friend bool operator!=(const RingContext& a, const RingContext& b) { return !(a == b); }

  std::string describe() const;

 private:
  int r_ = 0;
  int k_ = 0;
  int m_ = 0;
  int n_ = 0;
  bool has_z_ = false;
  std::vector<std::string> names_;
};

}  // namespace retfront::jetalg

#endif  // RETFRONT_JETALG_RING_CONTEXT_HPP
