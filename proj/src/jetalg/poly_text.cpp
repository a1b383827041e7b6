#include "retfront/jetalg/poly_text.hpp"

#include <cctype>
#include <string>

#include "retfront/errors.hpp"

namespace retfront::jetalg {

namespace {

constexpr int kMaxPower = 64;

class Parser {
 public:
  Parser(std::string_view text, const RingContext& ctx, int truncation)
      : text_(text), ctx_(ctx), truncation_(truncation) {}

  JetPoly run() {
    skip_space();
    if (at_end()) fail("empty polynomial");
    JetPoly p = expr();
    skip_space();
    if (!at_end()) fail("unexpected character '" + std::string(1, peek()) + "'");
    return p;
  }

 private:
  JetPoly expr() {
    JetPoly sum(ctx_, truncation_);
    skip_space();
    bool negate = false;
    if (peek() == '+' || peek() == '-') {
      negate = peek() == '-';
      ++pos_;
    }
    JetPoly t = term();
    sum += negate ? -t : t;
    for (;;) {
      skip_space();
      if (at_end() || (peek() != '+' && peek() != '-')) break;
      negate = peek() == '-';
      ++pos_;
      t = term();
      sum += negate ? -t : t;
    }
    return sum;
  }

  JetPoly term() {
    JetPoly prod = factor();
    for (;;) {
      skip_space();
      if (at_end()) break;
      const char c = peek();
      if (c == '*') {
        ++pos_;
        prod = mul_truncated(prod, factor());
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '.') {
        prod = mul_truncated(prod, factor());
      } else {
        break;
      }
    }
    return prod;
  }

  JetPoly factor() {
    skip_space();
    if (at_end()) fail("expected a factor");
    const char c = peek();
    JetPoly base(ctx_, truncation_);
    if (c == '(') {
      ++pos_;
      base = expr();
      skip_space();
      if (at_end() || peek() != ')') fail("missing ')'");
      ++pos_;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      Rational value = number();
      skip_space();
      if (!at_end() && peek() == '/') {
        ++pos_;
        skip_space();
        Rational den = number();
        if (den == 0) fail("division by zero");
        value /= den;
      }
      return JetPoly::constant(ctx_, truncation_, value);
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (!at_end() && std::isalnum(static_cast<unsigned char>(peek()))) ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      auto var = ctx_.find(name);
      if (!var) fail("unknown variable '" + name + "' for ring " + ctx_.describe());
      base = JetPoly::variable(ctx_, truncation_, *var);
    } else {
      fail("unexpected character '" + std::string(1, c) + "'");
    }
    skip_space();
    if (!at_end() && peek() == '^') {
      ++pos_;
      skip_space();
      const std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (start == pos_) fail("expected an integer exponent");
      if (pos_ - start > 3) fail("exponent too large");
      const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
      if (e > kMaxPower) fail("exponent too large");
      JetPoly acc = JetPoly::constant(ctx_, truncation_, 1);
      for (int i = 0; i < e; ++i) acc = mul_truncated(acc, base);
      return acc;
    }
    return base;
  }

  Rational number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
    return parse_rational(text_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("polynomial parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  const RingContext& ctx_;
  int truncation_;
  std::size_t pos_ = 0;
};

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw ParseError("empty number");
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw ParseError("division by zero");
    return num / den;
  }
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  std::string digits(text.substr(0, dot));
  std::string frac = dot == std::string_view::npos ? std::string() : std::string(text.substr(dot + 1));
  if (digits.empty() && frac.empty()) throw ParseError("malformed number");
  for (char c : digits + frac) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("malformed number '" + std::string(text) + "'");
  }
  mpz_class num(digits + frac, 10);
  mpz_class den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  Rational out(num, den);
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

JetPoly parse_jet(std::string_view text, const RingContext& ctx, int truncation) {
  if (truncation < 0) throw PreconditionError("truncation order must be non-negative");
  return Parser(text, ctx, truncation).run();
}

}  // namespace retfront::jetalg
