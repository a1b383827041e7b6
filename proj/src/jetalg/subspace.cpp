#include "retfront/jetalg/subspace.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <unordered_map>

#include "retfront/errors.hpp"

namespace retfront::jetalg {

namespace {

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto e : m.exponents()) {
      h ^= e;
      h *= 1099511628211ull;
    }
    return h;
  }
};

void enumerate(int num_vars, int degree, int var, std::vector<std::uint16_t>& cur,
               std::vector<Monomial>& out) {
  if (var == num_vars - 1) {
    cur[var] = static_cast<std::uint16_t>(degree);
    out.emplace_back(cur);
    cur[var] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[var] = static_cast<std::uint16_t>(e);
    enumerate(num_vars, degree - e, var + 1, cur, out);
  }
  cur[var] = 0;
}

/// Monomials in `vars` (embedded in `num_vars` variables) with degree in [lo, hi].
std::vector<Monomial> monomials_in(int num_vars, std::span<const int> vars, int lo, int hi) {
  std::vector<Monomial> out;
  if (hi < lo) return out;
  const int nv = static_cast<int>(vars.size());
  if (nv == 0) {
    if (lo <= 0) out.emplace_back(num_vars);
    return out;
  }
  std::vector<Monomial> local;
  std::vector<std::uint16_t> cur(nv, 0);
  for (int d = std::max(lo, 0); d <= hi; ++d) enumerate(nv, d, 0, cur, local);
  out.reserve(local.size());
  for (const auto& m : local) {
    std::vector<std::uint16_t> e(num_vars, 0);
    for (int i = 0; i < nv; ++i) e[vars[i]] = m[i];
    out.emplace_back(std::move(e));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct SparseRow {
  std::vector<std::uint32_t> cols;
  std::vector<Rational> vals;
  std::uint32_t lead() const { return cols.front(); }
};

}  // namespace

class MonomialTable {
 public:
  MonomialTable(int num_vars, int truncation, const JetLimits& limits) : truncation_(truncation) {
    const std::uint64_t dim = jet_space_dimension(num_vars, truncation);
    if (dim > limits.max_dimension) {
      throw DimensionCapExceeded("jet space J^" + std::to_string(truncation) + " in " +
                                 std::to_string(num_vars) + " variables has dimension " + std::to_string(dim) +
                                 " > cap " + std::to_string(limits.max_dimension));
    }
    monomials_ = all_monomials(num_vars, truncation);
    index_.reserve(monomials_.size() * 2);
    for (std::uint32_t i = 0; i < monomials_.size(); ++i) index_.emplace(monomials_[i], i);
  }

  std::size_t size() const { return monomials_.size(); }
  const Monomial& at(std::uint32_t i) const { return monomials_[i]; }
  std::uint32_t index_of(const Monomial& m) const { return index_.at(m); }
  int truncation() const { return truncation_; }

 private:
  int truncation_;
  std::vector<Monomial> monomials_;
  std::unordered_map<Monomial, std::uint32_t, MonomialHash> index_;
};

struct SubspaceBasis::Impl {
  RingContext ctx;
  int truncation = 0;
  std::shared_ptr<const MonomialTable> table;
  std::vector<SparseRow> rows;           // pivot ascending, RREF
  std::vector<std::int32_t> pivot_row;   // column -> row index or -1
};

namespace {

/// Dense accumulator with a min-heap of touched columns; reused across rows.
class Reducer {
 public:
  explicit Reducer(std::size_t ncols) : acc_(ncols), live_(ncols, 0) {}

  void load(const SparseRow& row, std::size_t from = 0) {
    for (std::size_t i = from; i < row.cols.size(); ++i) touch(row.cols[i]) = row.vals[i];
  }

  /// Eliminates pivot columns in ascending order. With stop_at_free the loop
  /// ends at the first column without a pivot and returns it as the new row.
  SparseRow reduce(const std::vector<SparseRow>& rows, const std::vector<std::int32_t>& pivot_row,
                   bool stop_at_free) {
    SparseRow out;
    while (!heap_.empty()) {
      const std::uint32_t c = heap_.top();
      heap_.pop();
      live_[c] = 0;
      if (mpq_sgn(acc_[c].get_mpq_t()) == 0) continue;
      const std::int32_t p = pivot_row[c];
      if (p < 0) {
        out.cols.push_back(c);
        out.vals.push_back(acc_[c]);
        acc_[c] = 0;
        if (stop_at_free) break;
        continue;
      }
      factor_ = acc_[c];
      acc_[c] = 0;
      const SparseRow& pr = rows[p];
      for (std::size_t i = 1; i < pr.cols.size(); ++i) {
        Rational& slot = touch(pr.cols[i]);
        mpq_mul(tmp_.get_mpq_t(), factor_.get_mpq_t(), pr.vals[i].get_mpq_t());
        mpq_sub(slot.get_mpq_t(), slot.get_mpq_t(), tmp_.get_mpq_t());
      }
    }
    if (stop_at_free) {
      // Remaining tail is copied unreduced.
      while (!heap_.empty()) {
        const std::uint32_t c = heap_.top();
        heap_.pop();
        live_[c] = 0;
        if (mpq_sgn(acc_[c].get_mpq_t()) != 0) {
          out.cols.push_back(c);
          out.vals.push_back(acc_[c]);
          acc_[c] = 0;
        }
      }
    }
    return out;
  }

 private:
  Rational& touch(std::uint32_t c) {
    if (!live_[c]) {
      live_[c] = 1;
      heap_.push(c);
    }
    return acc_[c];
  }

  std::vector<Rational> acc_;
  std::vector<char> live_;
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> heap_;
  Rational factor_;
  Rational tmp_;
};

void normalize(SparseRow& row) {
  if (row.vals.front() == 1) return;
  Rational inv = 1 / row.vals.front();
  for (auto& v : row.vals) v *= inv;
}

/// Incremental semi-echelon form; finish() produces the reduced form.
class EchelonBuilder {
 public:
  explicit EchelonBuilder(std::shared_ptr<const MonomialTable> table)
      : table_(std::move(table)), pivot_row_(table_->size(), -1), reducer_(table_->size()) {}

  bool full() const { return rows_.size() == table_->size(); }
  bool is_pivot(std::uint32_t c) const { return pivot_row_[c] >= 0; }

  void insert(SparseRow row) {
    if (row.cols.empty() || full()) return;
    if (row.cols.size() == 1 && is_pivot(row.lead())) return;
    reducer_.load(row);
    SparseRow out = reducer_.reduce(rows_, pivot_row_, /*stop_at_free=*/true);
    if (out.cols.empty()) return;
    normalize(out);
    pivot_row_[out.lead()] = static_cast<std::int32_t>(rows_.size());
    rows_.push_back(std::move(out));
  }

  std::shared_ptr<SubspaceBasis::Impl> finish(const RingContext& ctx, int truncation) {
    // Back-substitute from the highest pivot down; tails only ever meet
    // rows that are already reduced.
    std::vector<std::size_t> order(rows_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rows_[a].lead() > rows_[b].lead(); });
    for (std::size_t idx : order) {
      SparseRow& row = rows_[idx];
      bool needs = false;
      for (std::size_t i = 1; i < row.cols.size() && !needs; ++i) needs = is_pivot(row.cols[i]);
      if (!needs) continue;
      reducer_.load(row, 1);
      SparseRow tail = reducer_.reduce(rows_, pivot_row_, /*stop_at_free=*/false);
      SparseRow fixed;
      fixed.cols.reserve(tail.cols.size() + 1);
      fixed.vals.reserve(tail.cols.size() + 1);
      fixed.cols.push_back(row.lead());
      fixed.vals.emplace_back(1);
      fixed.cols.insert(fixed.cols.end(), tail.cols.begin(), tail.cols.end());
      for (auto& v : tail.vals) fixed.vals.push_back(std::move(v));
      row = std::move(fixed);
    }
    std::sort(rows_.begin(), rows_.end(), [](const SparseRow& a, const SparseRow& b) { return a.lead() < b.lead(); });
    auto impl = std::make_shared<SubspaceBasis::Impl>();
    impl->ctx = ctx;
    impl->truncation = truncation;
    impl->pivot_row.assign(table_->size(), -1);
    for (std::size_t i = 0; i < rows_.size(); ++i) impl->pivot_row[rows_[i].lead()] = static_cast<std::int32_t>(i);
    impl->rows = std::move(rows_);
    impl->table = table_;
    return impl;
  }

 private:
  std::shared_ptr<const MonomialTable> table_;
  std::vector<SparseRow> rows_;
  std::vector<std::int32_t> pivot_row_;
  Reducer reducer_;
};

JetPoly to_jet(const SubspaceBasis::Impl& impl, const SparseRow& row) {
  JetPoly p(impl.ctx, impl.truncation);
  for (std::size_t i = 0; i < row.cols.size(); ++i) p.add_term(impl.table->at(row.cols[i]), row.vals[i]);
  return p;
}

void check_generator(const RingContext& ctx, const JetPoly& g) {
  if (g.context() != ctx) {
    throw ContextMismatch("generator ring " + g.context().describe() + " differs from " + ctx.describe());
  }
}

/// One candidate row g * mu, materialized lazily.
struct Candidate {
  std::uint32_t lead;
  std::uint32_t nnz;
  std::uint32_t block;
  std::uint32_t generator;
  std::uint32_t multiplier;
};

}  // namespace

const RingContext& SubspaceBasis::context() const { return impl_->ctx; }
int SubspaceBasis::truncation() const { return impl_->truncation; }
std::size_t SubspaceBasis::rank() const { return impl_->rows.size(); }
std::size_t SubspaceBasis::ambient_dimension() const { return impl_->table->size(); }

std::vector<JetPoly> SubspaceBasis::rows() const {
  std::vector<JetPoly> out;
  out.reserve(impl_->rows.size());
  for (const auto& row : impl_->rows) out.push_back(to_jet(*impl_, row));
  return out;
}

std::vector<Monomial> SubspaceBasis::pivots() const {
  std::vector<Monomial> out;
  out.reserve(impl_->rows.size());
  for (const auto& row : impl_->rows) out.push_back(impl_->table->at(row.lead()));
  return out;
}

bool operator==(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.context() != b.context() || a.truncation() != b.truncation() || a.rank() != b.rank()) return false;
  const auto& ra = a.impl_->rows;
  const auto& rb = b.impl_->rows;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].cols != rb[i].cols || ra[i].vals != rb[i].vals) return false;
  }
  return true;
}

std::vector<Monomial> all_monomials(int num_vars, int truncation) {
  std::vector<int> vars(num_vars);
  for (int i = 0; i < num_vars; ++i) vars[i] = i;
  if (num_vars == 0) return {Monomial(0)};
  return monomials_in(num_vars, vars, 0, truncation);
}

SubspaceBasis span_of(const RingContext& ctx, int truncation, std::span<const ModuleBlock> blocks,
                      const JetLimits& limits) {
  if (truncation < 0) throw PreconditionError("truncation order must be non-negative");
  auto table = std::make_shared<const MonomialTable>(ctx.num_vars(), truncation, limits);

  // Re-truncate generators and enumerate multiplier monomials per block.
  std::vector<std::vector<JetPoly>> gens(blocks.size());
  std::vector<std::vector<Monomial>> mults(blocks.size());
  std::vector<Candidate> candidates;
  for (std::uint32_t b = 0; b < blocks.size(); ++b) {
    const ModuleBlock& block = blocks[b];
    for (int v : block.multiplier_vars) {
      if (v < 0 || v >= ctx.num_vars()) throw PreconditionError("multiplier variable out of range");
    }
    int lowest_order = truncation + 1;
    for (const auto& g : block.generators) {
      check_generator(ctx, g);
      JetPoly h = g.with_truncation(truncation);
      if (!h.is_zero()) lowest_order = std::min(lowest_order, h.order());
      gens[b].push_back(std::move(h));
    }
    if (lowest_order > truncation) continue;
    mults[b] = monomials_in(ctx.num_vars(), block.multiplier_vars, block.min_multiplier_degree,
                            truncation - lowest_order);
    for (std::uint32_t gi = 0; gi < gens[b].size(); ++gi) {
      const JetPoly& g = gens[b][gi];
      if (g.is_zero()) continue;
      const Monomial& low = g.terms().begin()->first;
      for (std::uint32_t mi = 0; mi < mults[b].size(); ++mi) {
        const Monomial& mu = mults[b][mi];
        if (low.degree() + mu.degree() > truncation) break;  // mults sorted by degree
        std::uint32_t nnz = 0;
        for (const auto& [m, c] : g.terms()) nnz += (m.degree() + mu.degree() <= truncation);
        candidates.push_back({table->index_of(low * mu), nnz, b, gi, mi});
      }
    }
  }

  // Monomial rows first (they never fill in), then by leading column.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    const bool am = a.nnz == 1;
    const bool bm = b.nnz == 1;
    if (am != bm) return am;
    if (a.lead != b.lead) return a.lead < b.lead;
    if (a.nnz != b.nnz) return a.nnz < b.nnz;
    if (a.block != b.block) return a.block < b.block;
    if (a.generator != b.generator) return a.generator < b.generator;
    return a.multiplier < b.multiplier;
  });

  EchelonBuilder builder(table);
  for (const Candidate& cand : candidates) {
    if (builder.full()) break;
    const JetPoly& g = gens[cand.block][cand.generator];
    const Monomial& mu = mults[cand.block][cand.multiplier];
    if (cand.nnz == 1 && builder.is_pivot(cand.lead)) continue;
    SparseRow row;
    row.cols.reserve(cand.nnz);
    row.vals.reserve(cand.nnz);
    for (const auto& [m, c] : g.terms()) {
      if (m.degree() + mu.degree() > truncation) break;
      row.cols.push_back(table->index_of(m * mu));
      row.vals.push_back(c);
    }
    // Multiplication preserves the order within a degree but a row may mix
    // degrees; keep columns sorted.
    std::vector<std::size_t> perm(row.cols.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](auto a, auto b) { return row.cols[a] < row.cols[b]; });
    SparseRow sorted;
    sorted.cols.reserve(perm.size());
    sorted.vals.reserve(perm.size());
    for (auto i : perm) {
      sorted.cols.push_back(row.cols[i]);
      sorted.vals.push_back(std::move(row.vals[i]));
    }
    builder.insert(std::move(sorted));
  }
  return SubspaceBasis(builder.finish(ctx, truncation));
}

SubspaceBasis module_span(const RingContext& ctx, int truncation, const ModuleBlock& block,
                          const JetLimits& limits) {
  return span_of(ctx, truncation, std::span<const ModuleBlock>(&block, 1), limits);
}

SubspaceBasis linear_span(const RingContext& ctx, int truncation, std::span<const JetPoly> rows,
                          const JetLimits& limits) {
  ModuleBlock block;
  block.generators.assign(rows.begin(), rows.end());
  return module_span(ctx, truncation, block, limits);
}

MembershipReport contains(const SubspaceBasis& basis, const JetPoly& p) {
  const auto& impl = *basis.impl_;
  if (p.context() != impl.ctx) {
    throw ContextMismatch("jet ring " + p.context().describe() + " differs from basis ring " + impl.ctx.describe());
  }
  if (p.truncation() != impl.truncation) {
    throw ContextMismatch("jet truncation " + std::to_string(p.truncation()) + " differs from basis truncation " +
                          std::to_string(impl.truncation));
  }
  // Sparse ordered accumulator; inputs are typically short.
  std::map<std::uint32_t, Rational> acc;
  for (const auto& [m, c] : p.terms()) acc.emplace(impl.table->index_of(m), c);
  JetPoly residue(impl.ctx, impl.truncation);
  while (!acc.empty()) {
    auto it = acc.begin();
    const std::uint32_t c = it->first;
    Rational factor = std::move(it->second);
    acc.erase(it);
    const std::int32_t pr = impl.pivot_row[c];
    if (pr < 0) {
      residue.add_term(impl.table->at(c), factor);
      continue;
    }
    const SparseRow& row = impl.rows[pr];
    for (std::size_t i = 1; i < row.cols.size(); ++i) {
      auto [slot, inserted] = acc.try_emplace(row.cols[i], 0);
      slot->second -= factor * row.vals[i];
      if (slot->second == 0) acc.erase(slot);
    }
  }
  MembershipReport report;
  report.contained = residue.is_zero();
  report.residue = std::move(residue);
  report.cobasis = quotient_cobasis(basis);
  return report;
}

std::vector<Monomial> quotient_cobasis(const SubspaceBasis& basis) {
  const auto& impl = *basis.impl_;
  std::vector<Monomial> out;
  out.reserve(impl.table->size() - impl.rows.size());
  for (std::uint32_t c = 0; c < impl.table->size(); ++c) {
    if (impl.pivot_row[c] < 0) out.push_back(impl.table->at(c));
  }
  return out;
}

}  // namespace retfront::jetalg
