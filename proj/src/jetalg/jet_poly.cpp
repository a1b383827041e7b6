#include "retfront/jetalg/jet_poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "retfront/errors.hpp"

namespace retfront::jetalg {

Monomial::Monomial(std::vector<std::uint16_t> exps) : exps_(std::move(exps)) {
  degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
}

Monomial Monomial::unit(int num_vars, int var, int power) {
  Monomial m(num_vars);
  m.exps_.at(var) = static_cast<std::uint16_t>(power);
  m.degree_ = power;
  return m;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out(*this);
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] += other.exps_[i];
  out.degree_ += other.degree_;
  return out;
}

bool Monomial::divisible_by(const Monomial& other) const {
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] < other.exps_[i]) return false;
  }
  return true;
}

bool Monomial::supported_on(std::span<const int> vars) const {
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] != 0 && std::find(vars.begin(), vars.end(), static_cast<int>(i)) == vars.end()) {
      return false;
    }
  }
  return true;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
  for (std::size_t i = a.exps_.size(); i-- > 0;) {
    if (a.exps_[i] != b.exps_[i]) return a.exps_[i] <=> b.exps_[i];
  }
  return std::strong_ordering::equal;
}

std::string Monomial::to_string(const RingContext& ctx) const {
  std::string out;
  for (int i = 0; i < num_vars(); ++i) {
    if (exps_[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += ctx.name(i);
    if (exps_[i] > 1) out += '^' + std::to_string(exps_[i]);
  }
  return out.empty() ? "1" : out;
}

std::uint64_t jet_space_dimension(int num_vars, int order) {
  if (order < 0) return 0;
  // C(order + v, v) computed incrementally; each partial product is itself a binomial.
  unsigned __int128 acc = 1;
  for (int i = 1; i <= num_vars; ++i) {
    acc = acc * static_cast<unsigned>(order + i) / static_cast<unsigned>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

JetPoly::JetPoly(RingContext ctx, int truncation) : ctx_(std::move(ctx)), truncation_(truncation) {
  if (truncation < 0) throw PreconditionError("truncation order must be non-negative");
}

JetPoly JetPoly::constant(const RingContext& ctx, int truncation, const Rational& c) {
  JetPoly p(ctx, truncation);
  p.add_term(Monomial(ctx.num_vars()), c);
  return p;
}

JetPoly JetPoly::variable(const RingContext& ctx, int truncation, int var) {
  if (var < 0 || var >= ctx.num_vars()) throw PreconditionError("unknown variable index");
  JetPoly p(ctx, truncation);
  p.add_term(Monomial::unit(ctx.num_vars(), var), 1);
  return p;
}

JetPoly JetPoly::monomial(const RingContext& ctx, int truncation, const Monomial& m, const Rational& c) {
  if (m.num_vars() != ctx.num_vars()) throw ContextMismatch("monomial arity does not match context");
  JetPoly p(ctx, truncation);
  p.add_term(m, c);
  return p;
}

Rational JetPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational JetPoly::constant_term() const { return coefficient(Monomial(ctx_.num_vars())); }

int JetPoly::order() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }

int JetPoly::degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

void JetPoly::add_term(const Monomial& m, const Rational& c) {
  if (m.degree() > truncation_ || c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (inserted) {
    it->second.canonicalize();
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void require_compatible(const JetPoly& a, const JetPoly& b) {
  if (a.context() != b.context()) {
    throw ContextMismatch("jets live in different rings: " + a.context().describe() + " vs " +
                          b.context().describe());
  }
  if (a.truncation() != b.truncation()) {
    throw ContextMismatch("jets have different truncation orders: " + std::to_string(a.truncation()) +
                          " vs " + std::to_string(b.truncation()));
  }
}

JetPoly& JetPoly::operator+=(const JetPoly& other) {
  require_compatible(*this, other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

JetPoly& JetPoly::operator-=(const JetPoly& other) {
  require_compatible(*this, other);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

JetPoly& JetPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

JetPoly JetPoly::operator-() const {
  JetPoly out(*this);
  for (auto& [m, v] : out.terms_) v = -v;
  return out;
}

JetPoly JetPoly::shifted(const Monomial& m) const {
  JetPoly out(ctx_, truncation_);
  for (const auto& [mono, c] : terms_) out.add_term(mono * m, c);
  return out;
}

JetPoly JetPoly::with_truncation(int truncation) const {
  JetPoly out(ctx_, truncation);
  for (const auto& [m, c] : terms_) out.add_term(m, c);
  return out;
}

JetPoly JetPoly::restrict_zero(std::span<const int> vars) const {
  JetPoly out(ctx_, truncation_);
  for (const auto& [m, c] : terms_) {
    bool vanishes = false;
    for (int v : vars) vanishes = vanishes || m[v] != 0;
    if (!vanishes) out.terms_.emplace(m, c);
  }
  return out;
}

JetPoly JetPoly::embed(const RingContext& target, std::span<const int> var_map) const {
  if (static_cast<int>(var_map.size()) != ctx_.num_vars()) {
    throw ContextMismatch("variable map arity does not match source context");
  }
  JetPoly out(target, truncation_);
  for (const auto& [m, c] : terms_) {
    std::vector<std::uint16_t> e(target.num_vars(), 0);
    for (int i = 0; i < ctx_.num_vars(); ++i) {
      if (m[i] == 0) continue;
      if (var_map[i] < 0) {
        throw PreconditionError("variable " + ctx_.name(i) + " has no image in the target ring");
      }
      e.at(var_map[i]) += m[i];
    }
    out.add_term(Monomial(std::move(e)), c);
  }
  return out;
}

JetPoly JetPoly::compose(std::span<const JetPoly> images) const {
  if (static_cast<int>(images.size()) != ctx_.num_vars()) {
    throw ContextMismatch("compose needs one image per variable");
  }
  if (images.empty()) return *this;
  const JetPoly& ref = images.front();
  for (const auto& img : images) require_compatible(ref, img);

  // Cache powers per variable; reused across terms.
  std::vector<std::vector<JetPoly>> powers(images.size());
  auto power = [&](int var, int e) -> const JetPoly& {
    auto& list = powers[var];
    if (list.empty()) list.push_back(JetPoly::constant(ref.context(), ref.truncation(), 1));
    while (static_cast<int>(list.size()) <= e) list.push_back(mul_truncated(list.back(), images[var]));
    return list[e];
  };

  JetPoly out(ref.context(), ref.truncation());
  for (const auto& [m, c] : terms_) {
    JetPoly term = JetPoly::constant(ref.context(), ref.truncation(), c);
    for (int v = 0; v < m.num_vars() && !term.is_zero(); ++v) {
      if (m[v] != 0) term = mul_truncated(term, power(v, m[v]));
    }
    out += term;
  }
  return out;
}

double JetPoly::evaluate(std::span<const double> point) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = c.get_d();
    for (int i = 0; i < m.num_vars(); ++i) {
      for (int e = 0; e < m[i]; ++e) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

std::string JetPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    const bool negative = c < 0;
    Rational mag = negative ? Rational(-c) : c;
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    const bool is_one = m.degree() == 0;
    if (mag != 1 || is_one) {
      os << mag.get_str();
      if (!is_one) os << '*';
    }
    if (!is_one) os << m.to_string(ctx_);
  }
  return os.str();
}

bool operator==(const JetPoly& a, const JetPoly& b) {
  return a.ctx_ == b.ctx_ && a.truncation_ == b.truncation_ && a.terms_ == b.terms_;
}

JetPoly mul_truncated(const JetPoly& a, const JetPoly& b) {
  require_compatible(a, b);
  JetPoly out(a.context(), a.truncation());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      if (ma.degree() + mb.degree() > a.truncation()) continue;
      out.add_term(ma * mb, ca * cb);
    }
  }
  return out;
}

JetPoly partial(const JetPoly& a, int var) {
  if (var < 0 || var >= a.context().num_vars()) throw PreconditionError("unknown variable index");
  JetPoly out(a.context(), a.truncation());
  for (const auto& [m, c] : a.terms()) {
    if (m[var] == 0) continue;
    std::vector<std::uint16_t> e = m.exponents();
    const int power = e[var];
    e[var] -= 1;
    out.add_term(Monomial(std::move(e)), c * power);
  }
  return out;
}

JetPoly euler_term(const JetPoly& a, int var) {
  JetPoly out(a.context(), a.truncation());
  for (const auto& [m, c] : a.terms()) {
    if (m[var] != 0) out.add_term(m, c * m[var]);
  }
  return out;
}

}  // namespace retfront::jetalg
