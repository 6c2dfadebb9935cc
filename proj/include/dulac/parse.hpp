#pragma once

// Text formats: transseries literals and germ definition files.
//
// Transseries grammar (whitespace-insensitive):
//   series   := [sign] term (('+'|'-') term)*
//   term     := factor ('*' factor)*
//   factor   := coeff | 'z' ['^' ratexp] | 'l' ['^' intexp] | 'l2' ['^' intexp]
//   coeff    := rational | decimal | '(' rational [('+'|'-') rational 'i'] ')'
//   ratexp   := ['-'] digits ['/' digits] | '(' ... ')'
// Decimal coefficients are scaled integers, so everything stays exact.

#include <string>

#include "dulac/series.hpp"

namespace dulac {

TS parse_series(const std::string& text, const Basis& basis, const Budget& budget);

std::string serialize(const TS& s);

// Round-trip helper for single rationals rendered by serialize().
std::string monomial_str(const Rat& zexp, int lexp, int l2exp);

}  // namespace dulac
