#include "retfront/catalog/catalog.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <thread>

#include "retfront/errors.hpp"
#include "retfront/jetalg/poly_text.hpp"

namespace retfront::catalog {

using jetalg::Monomial;
using jetalg::Rational;
using jetalg::Role;

namespace {

const char* sign_char(int s) { return s > 0 ? "+" : "-"; }

std::string pm(int s) { return s > 0 ? " + " : " - "; }

std::string power(const std::string& var, int e) { return e == 1 ? var : var + "^" + std::to_string(e); }

/// Builds the entry for a base label. Throws PreconditionError on unknown
/// labels or a sign vector of the wrong length.
NormalFormEntry build(const std::string& base, const std::vector<int>& signs, int variant) {
  NormalFormEntry e;
  e.base_label = base;
  e.variant = variant;
  e.signs = signs;
  for (int s : signs) {
    if (s != 1 && s != -1) throw PreconditionError("signs must be +1 or -1");
  }
  auto need_signs = [&](std::size_t count) {
    if (signs.size() != count) {
      throw PreconditionError(base + " takes " + std::to_string(count) + " sign(s), got " +
                              std::to_string(signs.size()));
    }
  };
  auto need_variant = [&](int max_variant) {
    if (variant < 1 || variant > max_variant) {
      throw PreconditionError(base + " has " + std::to_string(max_variant) + " variant(s)");
    }
  };
  std::string& t = e.text;

  if (base == "0A2" || base == "0A3" || base == "0A4") {
    const int l = base[2] - '0';
    need_signs(0);
    need_variant(1);
    e.r = 0, e.k = 1, e.n = l, e.family = "A" + std::to_string(l);
    t = power("y", l + 1);
    for (int i = l; i >= 1; --i) t += " + q" + std::to_string(i) + "*" + power("y", i);
    t += " + z";
  } else if (base == "1A3" || base == "1A4") {
    const int l = base[2] - '0';
    need_variant(1);
    e.r = 0, e.k = 1, e.n = l + static_cast<int>(signs.size()), e.family = "A" + std::to_string(l);
    if (e.n > 4) throw PreconditionError(base + " supports at most " + std::to_string(4 - l) + " sign(s)");
    t = power("y", l + 1) + " + (t + q" + std::to_string(l) + "^2";
    for (std::size_t i = 0; i < signs.size(); ++i) t += pm(signs[i]) + "q" + std::to_string(l + 1 + i) + "^2";
    t += ")*" + power("y", l - 1);
    for (int i = l - 1; i >= 1; --i) t += " + q" + std::to_string(i) + "*" + power("y", i);
    t += " + z";
  } else if (base == "0D4") {
    need_signs(1);
    need_variant(1);
    e.r = 0, e.k = 2, e.n = 3, e.family = std::string("D4") + sign_char(signs[0]);
    t = "y1^2*y2" + pm(signs[0]) + "y2^3 + q1*y2^2 + q2*y2 + q3*y1 + z";
  } else if (base == "0D5") {
    need_signs(0);
    need_variant(1);
    e.r = 0, e.k = 2, e.n = 4, e.family = "D5";
    t = "y1^2*y2 + y2^4 + q1*y2^3 + q2*y2^2 + q3*y2 + q4*y1 + z";
  } else if (base == "1D4") {
    need_signs(1);
    need_variant(2);
    e.r = 0, e.k = 2, e.n = variant == 1 ? 2 : 3, e.family = std::string("D4") + sign_char(signs[0]);
    t = "y1^2*y2" + pm(signs[0]) + "y2^3 + " + (variant == 1 ? "t" : "(t + q3^2)") + "*y2^2 + q1*y2 + q2*y1 + z";
  } else if (base == "1D5") {
    need_signs(0);
    need_variant(2);
    e.r = 0, e.k = 2, e.n = variant == 1 ? 3 : 4, e.family = "D5";
    t = std::string("y1^2*y2 + y2^4 + ") + (variant == 1 ? "t" : "(t + q4^2)") +
        "*y2^3 + q1*y2^2 + q2*y2 + q3*y1 + z";
  } else if (base == "1D6") {
    need_signs(1);
    need_variant(1);
    e.r = 0, e.k = 2, e.n = 4, e.family = std::string("D6") + sign_char(signs[0]);
    t = "y1^2*y2" + pm(signs[0]) + "y2^5 + t*y2^4 + q1*y2^3 + q2*y2^2 + q3*y2 + q4*y1 + z";
  } else if (base == "1E6") {
    need_signs(0);
    need_variant(1);
    e.r = 0, e.k = 2, e.n = 4, e.family = "E6";
    t = "y1^3 + y2^4 + t*y1*y2^2 + q1*y1*y2 + q2*y2^2 + q3*y1 + q4*y2 + z";
  } else if (base == "0B2") {
    need_signs(0);
    need_variant(1);
    e.r = 1, e.k = 0, e.n = 1, e.family = "B2";
    t = "x^2 + q1*x + z";
  } else if (base == "0B3") {
    need_signs(0);
    need_variant(1);
    e.r = 1, e.k = 0, e.n = 2, e.family = "B3";
    t = "x^3 + q1*x^2 + q2*x + z";
  } else if (base == "0C3") {
    need_signs(1);
    need_variant(1);
    e.r = 1, e.k = 1, e.n = 2, e.family = std::string("C3") + sign_char(signs[0]);
    t = std::string(signs[0] > 0 ? "" : "-") + "x*y + y^3 + q1*y^2 + q2*y + z";
  } else if (base == "1B3") {
    need_signs(0);
    need_variant(2);
    e.r = 1, e.k = 0, e.n = variant, e.family = "B3";
    t = std::string("x^3 + ") + (variant == 1 ? "t" : "(t + q2^2)") + "*x^2 + q1*x + z";
  } else if (base == "1B4") {
    need_signs(0);
    need_variant(1);
    e.r = 1, e.k = 0, e.n = 2, e.family = "B4";
    t = "x^4 + t*x^3 + q1*x^2 + q2*x + z";
  } else if (base == "1C3") {
    need_signs(1);
    need_variant(2);
    e.r = 1, e.k = 1, e.n = variant, e.family = std::string("C3") + sign_char(signs[0]);
    t = std::string(signs[0] > 0 ? "" : "-") + "x*y + y^3 + " + (variant == 1 ? "t" : "(t + q2^2)") +
        "*y^2 + q1*y + z";
  } else if (base == "1C4") {
    need_signs(0);
    need_variant(1);
    e.r = 1, e.k = 1, e.n = 2, e.family = "C4";
    t = "x*y + y^4 + t*y^3 + q1*y^2 + q2*y + z";
  } else if (base == "1F4") {
    need_signs(0);
    need_variant(1);
    e.r = 1, e.k = 1, e.n = 2, e.family = "F4";
    t = "x^2 + y^3 + t*x*y + q1*x + q2*y + z";
  } else {
    throw PreconditionError("unknown catalog label '" + base + "'");
  }
  e.label = base;
  for (int s : signs) e.label += sign_char(s);
  return e;
}

/// (base label, sign count, variant count) in table order.
struct Row {
  const char* base;
  int signs;
  int variants;
};

const Row kRows0[] = {{"0A2", 0, 1}, {"0A3", 0, 1}, {"0A4", 0, 1}, {"0D4", 1, 1}, {"0D5", 0, 1},
                      {"1A3", -1, 1}, {"1A4", -1, 1}, {"1D4", 1, 2}, {"1D5", 0, 2}, {"1D6", 1, 1},
                      {"1E6", 0, 1}};
const Row kRows1[] = {{"0B2", 0, 1}, {"0B3", 0, 1}, {"0C3", 1, 1}, {"1B3", 0, 2},
                      {"1B4", 0, 1}, {"1C3", 1, 2}, {"1C4", 0, 1}, {"1F4", 0, 1}};

std::vector<std::vector<int>> sign_vectors(int count) {
  std::vector<std::vector<int>> out{{}};
  for (int i = 0; i < count; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& v : out) {
      for (int s : {1, -1}) {
        auto w = v;
        w.push_back(s);
        next.push_back(w);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<NormalFormEntry> enumerate(int r, int n) {
  std::vector<NormalFormEntry> out;
  auto keep = [&](NormalFormEntry e) {
    if (e.n <= n) out.push_back(std::move(e));
  };
  if (r == 0) {
    for (const Row& row : kRows0) {
      if (row.signs < 0) {
        const int l = row.base[2] - '0';
        for (int extra = 0; l + extra <= 4; ++extra) {
          for (const auto& s : sign_vectors(extra)) keep(build(row.base, s, 1));
        }
        continue;
      }
      for (const auto& s : sign_vectors(row.signs)) {
        for (int v = 1; v <= row.variants; ++v) keep(build(row.base, s, v));
      }
    }
  } else {
    for (const Row& row : kRows1) {
      for (const auto& s : sign_vectors(row.signs)) {
        for (int v = 1; v <= row.variants; ++v) keep(build(row.base, s, v));
      }
    }
  }
  return out;
}

// ---- recognition ----------------------------------------------------------

/// Rank and kernel of a small rational matrix.
struct KernelResult {
  std::size_t rank = 0;
  std::vector<std::vector<Rational>> kernel;
};

KernelResult kernel_of(std::vector<std::vector<Rational>> a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::vector<int> pivot_col;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < rows; ++c) {
    std::size_t p = row;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[row]);
    Rational inv = 1 / a[row][c];
    for (auto& v : a[row]) v *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[row][j];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++row;
  }
  KernelResult out;
  out.rank = row;
  for (std::size_t c = 0; c < cols; ++c) {
    if (std::find(pivot_col.begin(), pivot_col.end(), static_cast<int>(c)) != pivot_col.end()) continue;
    std::vector<Rational> v(cols);
    v[c] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -a[i][c];
    out.kernel.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<Rational>> y_hessian(const JetPoly& f0) {
  const auto& ctx = f0.context();
  const auto ys = ctx.vars(Role::Y);
  std::vector<std::vector<Rational>> h(ys.size(), std::vector<Rational>(ys.size()));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      Monomial m = Monomial::unit(ctx.num_vars(), ys[i]) * Monomial::unit(ctx.num_vars(), ys[j]);
      h[i][j] = f0.coefficient(m) * (i == j ? 2 : 1);
    }
  }
  return h;
}

/// f0 restricted to x unchanged, y = sum_i s_i v_i, in the ring (r; dim kernel).
JetPoly restrict_to_kernel(const JetPoly& f0, const std::vector<std::vector<Rational>>& kernel) {
  const auto& ctx = f0.context();
  RingContext target(ctx.r(), static_cast<int>(kernel.size()), 0, 0);
  const int L = f0.truncation();
  std::vector<JetPoly> images;
  for (int x : ctx.vars(Role::X)) images.push_back(JetPoly::variable(target, L, x));
  const auto ys = ctx.vars(Role::Y);
  for (std::size_t j = 0; j < ys.size(); ++j) {
    JetPoly img(target, L);
    for (std::size_t i = 0; i < kernel.size(); ++i) {
      img.add_term(Monomial::unit(target.num_vars(), ctx.r() + static_cast<int>(i)), kernel[i][j]);
    }
    images.push_back(img);
  }
  return f0.compose(images);
}

/// "+" or "-" for C3 (sign of c_xs * c_s^3) and D4 (discriminant of the
/// cubic part), empty when undecidable.
std::string resolve_sign(const JetPoly& f0, const std::string& stem) {
  const auto kr = kernel_of(y_hessian(f0));
  const JetPoly g = restrict_to_kernel(f0.with_truncation(3), kr.kernel);
  const int nv = g.context().num_vars();
  auto coef = [&](std::vector<std::uint16_t> e) { return g.coefficient(Monomial(std::move(e))); };
  if (stem == "C3" && nv == 2) {
    Rational s = coef({1, 1}) * coef({0, 3});
    if (s == 0) return "";
    return s > 0 ? "+" : "-";
  }
  if (stem == "D4" && nv == 2) {
    Rational a = coef({3, 0}), b = coef({2, 1}), c = coef({1, 2}), d = coef({0, 3});
    Rational disc = b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
    if (disc == 0) return "";
    return disc < 0 ? "+" : "-";
  }
  return "";
}

struct TypeRecord {
  std::string family;
  Fingerprint fingerprint;
  /// (base label, minimal n) per catalog entry of this type.
  std::map<std::string, int> labels;
};

const std::vector<TypeRecord>& type_table() {
  static const std::vector<TypeRecord> table = [] {
    std::vector<TypeRecord> out;
    for (const auto& e : all_entries()) {
      auto it = std::find_if(out.begin(), out.end(), [&](const TypeRecord& t) { return t.family == e.family; });
      if (it == out.end()) {
        out.push_back({e.family, fingerprint(e.base_germ()), {}});
        it = out.end() - 1;
      }
      auto [slot, inserted] = it->labels.try_emplace(e.base_label, e.n);
      if (!inserted) slot->second = std::min(slot->second, e.n);
    }
    return out;
  }();
  return table;
}

std::string stem_of(const std::string& family) {
  if (!family.empty() && (family.back() == '+' || family.back() == '-')) return family.substr(0, family.size() - 1);
  return family;
}

}  // namespace

JetPoly NormalFormEntry::polynomial() const { return jetalg::parse_jet(text, context(), kTemplateTruncation); }

JetPoly NormalFormEntry::base_germ() const {
  const JetPoly F = polynomial();
  const RingContext& ctx = F.context();
  std::vector<int> zero = ctx.vars(Role::T);
  for (int u : ctx.vars(Role::U)) zero.push_back(u);
  std::vector<int> map(ctx.num_vars(), -1);
  for (int v = 0; v < ctx.r() + ctx.k(); ++v) map[v] = v;
  return F.restrict_zero(zero).embed(RingContext(r, k, 0, 0), map);
}

std::string NormalFormEntry::describe() const {
  return label + " v" + std::to_string(variant) + " (n=" + std::to_string(n) + ")";
}

nlohmann::json NormalFormEntry::to_json() const {
  return {{"label", label}, {"base_label", base_label}, {"family", family}, {"r", r},       {"k", k},
          {"n", n},         {"variant", variant},       {"signs", signs},   {"polynomial", text}};
}

std::vector<NormalFormEntry> list_entries(int r, int n) {
  if (!((r == 0 && n >= 1 && n <= 4) || (r == 1 && n >= 1 && n <= 2))) {
    throw PreconditionError("catalog covers r = 0 with n <= 4 and r = 1 with n <= 2; got r = " + std::to_string(r) +
                            ", n = " + std::to_string(n));
  }
  return enumerate(r, n);
}

std::vector<NormalFormEntry> all_entries() {
  auto out = list_entries(0, 4);
  auto r1 = list_entries(1, 2);
  out.insert(out.end(), r1.begin(), r1.end());
  return out;
}

NormalFormEntry instantiate(const std::string& label, const std::vector<int>& signs, int variant) {
  std::string base = label;
  std::vector<int> label_signs;
  while (!base.empty() && (base.back() == '+' || base.back() == '-')) {
    label_signs.insert(label_signs.begin(), base.back() == '+' ? 1 : -1);
    base.pop_back();
  }
  return build(base, signs.empty() ? label_signs : signs, variant);
}

bool CatalogReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const EntryResult& r) { return r.passed(); });
}

nlohmann::json CatalogReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json j = r.entry.to_json();
    j["pc_nondegenerate"] = r.pc_nondegenerate;
    j["passed"] = r.passed();
    if (r.report) {
      j["stable"] = r.report->stable.value_or(false);
      j["truncation"] = r.report->truncation;
      j["cobasis"] = r.report->cobasis;
    }
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  return {{"all_passed", all_passed()}, {"entries", arr}};
}

unsigned worker_count() {
  if (const char* env = std::getenv("RETFRONT_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EntryResult verify_polynomial(const NormalFormEntry& entry, const JetPoly& F) {
  EntryResult out;
  out.entry = entry;
  const auto start = std::chrono::steady_clock::now();
  try {
    out.pc_nondegenerate = stability::is_PC_nondegenerate(F);
    if (out.pc_nondegenerate) {
      out.report = stability::check_generating_family_stable(F);
      out.report->label = entry.label;
    }
  } catch (const std::exception& ex) {
    out.error = ex.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

CatalogReport verify_catalog(const std::vector<NormalFormEntry>& entries, unsigned threads) {
  if (threads == 0) threads = worker_count();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(entries.size())));
  CatalogReport report;
  report.results.resize(entries.size());
  const auto start = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      report.results[i] = verify_polynomial(entries[i], entries[i].polynomial());
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

CatalogReport verify_catalog() { return verify_catalog(all_entries()); }

nlohmann::json Fingerprint::to_json() const {
  return {{"r", r}, {"corank", corank}, {"codim", codim}, {"hilbert", hilbert}};
}

Fingerprint fingerprint(const JetPoly& f0, int l_max) {
  auto det = equivalence::determinacy_order(f0, l_max);
  if (!det.determined()) throw PreconditionError("germ is not determined within order " + std::to_string(l_max));
  const int L = det.order_tested + 1;
  auto kc = equivalence::K_codimension(f0.with_truncation(L), L);
  const std::size_t rank = kernel_of(y_hessian(f0)).rank;
  Fingerprint fp;
  fp.r = f0.context().r();
  fp.corank = f0.context().k() - static_cast<int>(rank);
  fp.codim = kc.dim - rank;
  fp.hilbert = kc.hilbert;
  if (fp.hilbert.size() > 1) fp.hilbert[1] -= rank;
  return fp;
}

nlohmann::json Recognition::to_json() const {
  nlohmann::json j{{"classified", classified}, {"fingerprint", fingerprint.to_json()}};
  if (classified) {
    j["family"] = family;
    j["labels"] = labels;
  }
  if (!candidates.empty()) j["candidates"] = candidates;
  if (!note.empty()) j["note"] = note;
  return j;
}

Recognition recognize(const JetPoly& f0, std::optional<int> n) {
  Recognition out;
  const int r = f0.context().r();
  const int n_max = n.value_or(r == 0 ? 4 : 2);
  try {
    out.fingerprint = fingerprint(f0);
  } catch (const PreconditionError& ex) {
    out.note = ex.what();
    return out;
  }
  std::vector<const TypeRecord*> hits;
  for (const auto& rec : type_table()) {
    if (!(rec.fingerprint == out.fingerprint)) continue;
    bool reachable = false;
    for (const auto& [label, min_n] : rec.labels) reachable = reachable || min_n <= n_max;
    if (reachable) hits.push_back(&rec);
  }
  if (hits.empty()) {
    out.note = "no catalog type with n <= " + std::to_string(n_max) + " has this fingerprint";
    return out;
  }
  for (const auto* h : hits) out.candidates.push_back(h->family);
  const std::string stem = stem_of(hits.front()->family);
  bool same_stem = true;
  for (const auto* h : hits) same_stem = same_stem && stem_of(h->family) == stem;
  if (!same_stem) {
    out.note = "fingerprint matches several catalog types";
    return out;
  }
  const TypeRecord* chosen = nullptr;
  if (hits.size() == 1) {
    chosen = hits.front();
  } else {
    const std::string sign = resolve_sign(f0, stem);
    for (const auto* h : hits) {
      if (!sign.empty() && h->family == stem + sign) chosen = h;
    }
  }
  out.classified = true;
  if (chosen) {
    out.family = chosen->family;
    out.candidates.clear();
  } else {
    out.family = stem;
    out.note = "sign variants share the fingerprint; both returned";
  }
  for (const auto* h : hits) {
    if (chosen && h != chosen) continue;
    for (const auto& [label, min_n] : h->labels) {
      if (min_n > n_max) continue;
      std::string full = label;
      if (h->family.back() == '+' || h->family.back() == '-') full += h->family.back();
      if (std::find(out.labels.begin(), out.labels.end(), full) == out.labels.end()) out.labels.push_back(full);
    }
  }
  return out;
}

}  // namespace retfront::catalog
