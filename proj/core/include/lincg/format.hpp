#ifndef LINCG_FORMAT_HPP
#define LINCG_FORMAT_HPP

#include <string>
#include <string_view>

namespace lincg {

/// Decimal with 17 significant digits, enough for any double to round-trip exactly.
std::string format_scalar(double v);

/// Parses a whole token as a double; "inf"/"nan" are rejected. Throws InvalidArgument.
double parse_scalar(std::string_view token);

}  // namespace lincg

#endif  // LINCG_FORMAT_HPP
