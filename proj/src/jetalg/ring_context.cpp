#include "retfront/jetalg/ring_context.hpp"

#include <sstream>

#include "retfront/errors.hpp"

namespace retfront::jetalg {

namespace {

void append_names(std::vector<std::string>& out, const char* stem, int count) {
  if (count == 1) {
    out.emplace_back(stem);
    return;
  }
  for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
}

}  // namespace

RingContext::RingContext(int r, int k, int m, int n) : r_(r), k_(k), m_(m), n_(n) {
  if (r < 0 || k < 0 || m < 0 || n < 0) {
    throw PreconditionError("variable counts must be non-negative");
  }
  append_names(names_, "x", r);
  append_names(names_, "y", k);
  append_names(names_, "t", m);
  append_names(names_, "u", n);
}

RingContext RingContext::generating_family(int r, int k, int m, int n_q) {
  RingContext ctx(r, k, m, n_q + 1);
  ctx.has_z_ = true;
  for (int i = 0; i < n_q; ++i) ctx.names_[r + k + m + i] = "q" + std::to_string(i + 1);
  ctx.names_.back() = "z";
  return ctx;
}

Role RingContext::role(int var) const {
  if (var < 0 || var >= num_vars()) throw PreconditionError("variable index out of range");
  if (var < r_) return Role::X;
  if (var < r_ + k_) return Role::Y;
  if (var < r_ + k_ + m_) return Role::T;
  return Role::U;
}

std::optional<int> RingContext::find(std::string_view name) const {
  for (int i = 0; i < num_vars(); ++i) {
    if (names_[i] == name) return i;
  }
  if (name == "x1" && r_ == 1) return 0;
  if (name == "y1" && k_ == 1) return r_;
  if (name == "t1" && m_ == 1) return r_ + k_;
  if (name == "u1" && n_ == 1 && !has_z_) return r_ + k_ + m_;
  if (name == "q" && has_z_ && n_ == 2) return r_ + k_ + m_;
  return std::nullopt;
}

int RingContext::first(Role role) const {
  switch (role) {
    case Role::X: return 0;
    case Role::Y: return r_;
    case Role::T: return r_ + k_;
    case Role::U: return r_ + k_ + m_;
  }
  return 0;
}

std::vector<int> RingContext::vars(Role role) const {
  const int begin = first(role);
  int count = 0;
  switch (role) {
    case Role::X: count = r_; break;
    case Role::Y: count = k_; break;
    case Role::T: count = m_; break;
    case Role::U: count = n_; break;
  }
  std::vector<int> out(count);
  for (int i = 0; i < count; ++i) out[i] = begin + i;
  return out;
}

std::vector<int> RingContext::all_vars() const {
  std::vector<int> out(num_vars());
  for (int i = 0; i < num_vars(); ++i) out[i] = i;
  return out;
}

int RingContext::z_var() const {
  if (!has_z_) throw PreconditionError("context has no z variable");
  return num_vars() - 1;
}

std::vector<int> RingContext::q_vars() const {
  std::vector<int> out = vars(Role::U);
  if (has_z_) out.pop_back();
  return out;
}

std::string RingContext::describe() const {
  std::ostringstream os;
  os << "(r=" << r_ << ", k=" << k_ << ", m=" << m_ << ", n=" << n_ << (has_z_ ? ", z" : "") << ")";
  return os.str();
}

}  // namespace retfront::jetalg
