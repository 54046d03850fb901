#include "lincg/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "lincg/errors.hpp"

namespace lincg {

std::string format_scalar(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

double parse_scalar(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || end != token.data() + token.size() || token.empty())
    throw InvalidArgument("not a decimal number: '" + std::string(token) + "'");
  if (!std::isfinite(v)) throw InvalidArgument("non-finite value: '" + std::string(token) + "'");
  return v;
}

}  // namespace lincg
