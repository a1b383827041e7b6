#ifndef RETFRONT_JETALG_POLY_TEXT_HPP
#define RETFRONT_JETALG_POLY_TEXT_HPP

#include <string_view>

#include "retfront/jetalg/jet_poly.hpp"

namespace retfront::jetalg {

/// Parses the plain-text polynomial grammar
///
///   expr   := [+|-] term { (+|-) term }
///   term   := factor { [*] factor }         juxtaposition multiplies
///   factor := number [/ number] | name [^ int] | ( expr ) [^ int]
///
/// Numbers are exact: integers, p/q, or decimals such as 0.25. Variable
/// names are resolved by `ctx` (x1, y2, t1, u3, q1, z, or bare x/y/t when
/// the role has a single variable). Throws ParseError on malformed text.
JetPoly parse_jet(std::string_view text, const RingContext& ctx, int truncation);

/// Exact rational from "p", "p/q" or a decimal literal.
Rational parse_rational(std::string_view text);

}  // namespace retfront::jetalg

#endif  // RETFRONT_JETALG_POLY_TEXT_HPP
