#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "../support/random_changes.hpp"
#include "retfront/catalog/catalog.hpp"
#include "retfront/errors.hpp"
#include "retfront/jetalg/poly_text.hpp"

using namespace retfront;
using namespace retfront::catalog;
using jetalg::parse_jet;

namespace {

std::vector<std::string> labels_of(const std::vector<NormalFormEntry>& es) {
  std::vector<std::string> out;
  for (const auto& e : es) out.push_back(e.label + "/" + std::to_string(e.variant));
  return out;
}

JetPoly germ(const char* text, int r, int k, int L = 10) {
  return parse_jet(text, jetalg::RingContext(r, k, 0, 0), L);
}

}  // namespace

TEST_CASE("catalog listings") {
  CHECK(list_entries(1, 2).size() == 13);
  CHECK(list_entries(0, 4).size() == 19);
  CHECK(labels_of(list_entries(1, 1)) == std::vector<std::string>{"0B2/1", "1B3/1", "1C3+/1", "1C3-/1"});
  CHECK(labels_of(list_entries(0, 2)) == std::vector<std::string>{"0A2/1", "1D4+/1", "1D4-/1"});
  CHECK(labels_of(list_entries(0, 3)) ==
        std::vector<std::string>{"0A2/1", "0A3/1", "0D4+/1", "0D4-/1", "1A3/1", "1D4+/1", "1D4+/2", "1D4-/1",
                                 "1D4-/2", "1D5/1"});
  CHECK_THROWS_AS(list_entries(2, 1), PreconditionError);
  CHECK_THROWS_AS(list_entries(1, 3), PreconditionError);
  CHECK_THROWS_AS(list_entries(0, 5), PreconditionError);
  for (const auto& e : all_entries()) {
    CAPTURE(e.describe());
    CHECK(stability::is_PC_nondegenerate(e.polynomial()));
    CHECK(e.r <= 1);
    CHECK(e.n <= (e.r == 0 ? 4 : 2));
  }
}

TEST_CASE("instantiate") {
  auto c3 = instantiate("0C3", {-1});
  CHECK(c3.polynomial() == parse_jet("-x*y + y^3 + q1*y^2 + q2*y + z", c3.context(), kTemplateTruncation));
  CHECK(instantiate("0C3-").text == c3.text);
  auto b4 = instantiate("1B4");
  CHECK(b4.polynomial() == parse_jet("x^4 + t*x^3 + q1*x^2 + q2*x + z", b4.context(), kTemplateTruncation));
  auto e6 = instantiate("1E6");
  CHECK(e6.polynomial() == parse_jet("y1^3+y2^4+t*y1*y2^2+q1*y1*y2+q2*y2^2+q3*y1+q4*y2+z", e6.context(),
                                     kTemplateTruncation));
  auto b3v2 = instantiate("1B3", {}, 2);
  CHECK(b3v2.n == 2);
  CHECK(b3v2.text == "x^3 + (t + q2^2)*x^2 + q1*x + z");
  auto a3 = instantiate("1A3", {-1});
  CHECK(a3.n == 4);
  CHECK(a3.label == "1A3-");
  CHECK(a3.base_germ().to_string() == "y^4");
  CHECK_THROWS_AS(instantiate("9Z9"), PreconditionError);
  CHECK_THROWS_AS(instantiate("0C3"), PreconditionError);
  CHECK_THROWS_AS(instantiate("1B4", {1}), PreconditionError);
  CHECK_THROWS_AS(instantiate("1B4", {}, 2), PreconditionError);
  CHECK_THROWS_AS(instantiate("1A4", {1}), PreconditionError);
}

TEST_CASE("catalog verification (r = 1)") {
  auto report = verify_catalog(list_entries(1, 2), 1);
  CHECK(report.results.size() == 13);
  for (const auto& r : report.results) {
    CAPTURE(r.entry.describe());
    CHECK(r.passed());
  }
  CHECK(report.to_json()["all_passed"] == true);
}

TEST_CASE("mutated entries fail with a witness") {
  auto b3 = instantiate("1B3");
  auto mutated = verify_polynomial(b3, parse_jet("x^3 + q1*x + z", b3.context(), kTemplateTruncation));
  CHECK_FALSE(mutated.passed());
  REQUIRE(mutated.report);
  CHECK_FALSE(mutated.report->cobasis.empty());

  // The paper's printed time term for 1D6 does not give a stable family.
  auto d6 = instantiate("1D6+");
  auto literal = verify_polynomial(
      d6, parse_jet("y1^2*y2 + y2^5 + t*y2^6 + q1*y2^3 + q2*y2^2 + q3*y2 + q4*y1 + z", d6.context(),
                    kTemplateTruncation));
  REQUIRE(literal.report);
  CHECK_FALSE(*literal.report->stable);
}

TEST_CASE("recognizer") {
  auto b3 = recognize(germ("x^3", 1, 0));
  CHECK(b3.classified);
  CHECK(b3.family == "B3");
  CHECK(b3.labels == std::vector<std::string>{"0B3", "1B3"});

  auto d4m = recognize(germ("y1^2*y2 - y2^3", 0, 2));
  CHECK(d4m.family == "D4-");
  CHECK(recognize(germ("y1^2*y2 + y2^3", 0, 2)).family == "D4+");
  CHECK(recognize(germ("x*y + y^3", 1, 1)).family == "C3+");
  CHECK(recognize(germ("-x*y + y^3", 1, 1)).family == "C3-");
  CHECK(recognize(germ("x*y - y^3", 1, 1)).family == "C3-");

  auto y5 = recognize(germ("y^5", 0, 1), 3);
  CHECK_FALSE(y5.classified);
  CHECK(y5.fingerprint.codim == 5);
  CHECK(recognize(germ("y^5", 0, 1)).family == "A4");

  auto d6 = recognize(germ("y1^2*y2 + y2^5", 0, 2));
  CHECK(d6.classified);
  CHECK(d6.family == "D6");
  CHECK(d6.candidates == std::vector<std::string>{"D6+", "D6-"});

  // Extra Morse variables are absorbed.
  CHECK(recognize(germ("y1^4 + y2^2", 0, 2)).family == "A3");
  CHECK(recognize(germ("x*y1 + y1^3 + y2^2", 1, 2)).family == "C3+");

  CHECK_FALSE(recognize(germ("y1^3", 0, 2)).classified);
  CHECK_FALSE(recognize(germ("x^5", 1, 0)).classified);
}

TEST_CASE("property: fingerprints collide only within sign pairs") {
  std::set<std::string> stems;
  std::vector<std::pair<std::string, Fingerprint>> seen;
  for (const auto& e : all_entries()) {
    auto fp = fingerprint(e.base_germ());
    for (const auto& [fam, other] : seen) {
      if (fam == e.family || !(fp == other)) continue;
      std::string a = fam.substr(0, fam.size() - 1), b = e.family.substr(0, e.family.size() - 1);
      CAPTURE(fam);
      CAPTURE(e.family);
      CHECK(a == b);
      stems.insert(a);
    }
    seen.emplace_back(e.family, fp);
  }
  CHECK(stems == std::set<std::string>{"C3", "D4", "D6"});
}

TEST_CASE("property: recognition round trip") {
  for (const auto& e : all_entries()) {
    CAPTURE(e.describe());
    auto rec = recognize(e.base_germ());
    REQUIRE(rec.classified);
    if (e.family.rfind("D6", 0) == 0) {
      CHECK(rec.family == "D6");
    } else {
      CHECK(rec.family == e.family);
    }
    std::string label = e.base_label;
    if (e.family.back() == '+' || e.family.back() == '-') label += e.family.back();
    CHECK(std::find(rec.labels.begin(), rec.labels.end(), label) != rec.labels.end());
  }
}

TEST_CASE("property: recognition is invariant under 20 random B(r;k) changes and units") {
  std::mt19937 rng(99);
  std::set<std::string> done;
  for (const auto& e : all_entries()) {
    if (!done.insert(e.family).second) continue;
    CAPTURE(e.family);
    const JetPoly f = e.base_germ().with_truncation(7);
    const auto ref = recognize(f);
    for (int trial = 0; trial < 20; ++trial) {
      auto rec = recognize(support::random_equivalent(f, rng));
      CHECK(rec.family == ref.family);
      CHECK(rec.fingerprint == ref.fingerprint);
    }
  }
}

TEST_CASE("JSON export") {
  auto j = instantiate("1F4").to_json();
  CHECK(j["label"] == "1F4");
  CHECK(j["polynomial"] == "x^2 + y^3 + t*x*y + q1*x + q2*y + z");
  CHECK(j["n"] == 2);
}
