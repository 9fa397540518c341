#include "cdr/monotone_map.hpp"

#include "cdr/error.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace cdr {

namespace {

std::vector<double> parse_arguments(const std::string& text, std::size_t open) {
  const std::size_t close = text.rfind(')');
  if (close == std::string::npos || close < open)
    throw Error(ErrorKind::ScenarioFormat, "unbalanced parentheses in map \"" + text + "\"");
  std::vector<double> args;
  std::stringstream in(text.substr(open + 1, close - open - 1));
  std::string token;
  while (std::getline(in, token, ',')) {
    std::size_t used = 0;
    try {
      args.push_back(std::stod(token, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || token.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error(ErrorKind::ScenarioFormat, "bad numeric argument \"" + token + "\" in map \"" + text + "\"");
    }
  }
  return args;
}

std::string format_number(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

MonotoneMap MonotoneMap::identity() {
  return {"identity", [](double u) { return u; }};
}

MonotoneMap MonotoneMap::square() {
  return {"square", [](double u) { return u * u; }};
}

MonotoneMap MonotoneMap::affine(double slope, double intercept) {
  return {"affine(" + format_number(slope) + "," + format_number(intercept) + ")",
          [slope, intercept](double u) { return slope * u + intercept; }};
}

MonotoneMap MonotoneMap::lr_scale(double ratio) {
  require(ratio > 0.0 && std::isfinite(ratio), ErrorKind::InvalidArgument, "lr_scale needs a positive ratio");
  return {"lr_scale(" + format_number(ratio) + ")", [ratio](double u) {
            const double num = ratio * u;
            const double den = num + (1.0 - u);
            return den > 0.0 ? num / den : 1.0;
          }};
}

MonotoneMap MonotoneMap::parse(const std::string& text) {
  if (text == "identity") return identity();
  if (text == "square") return square();
  const std::size_t open = text.find('(');
  if (open != std::string::npos) {
    const std::string head = text.substr(0, open);
    const auto args = parse_arguments(text, open);
    if (head == "affine" && args.size() == 2) return affine(args[0], args[1]);
    if (head == "lr_scale" && args.size() == 1) return lr_scale(args[0]);
  }
  throw Error(ErrorKind::ScenarioFormat, "unknown monotone map \"" + text + "\"");
}

double MonotoneMap::inverse(double value, double tolerance) const {
  double lo = 0.0, hi = 1.0;
  if (value <= (*this)(lo)) return lo;
  if (value >= (*this)(hi)) return hi;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < value) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

MonotoneMap then(const MonotoneMap& first, const MonotoneMap& second) {
  return {second.name() + " o " + first.name(), [first, second](double u) { return second(first(u)); }};
}

void validate_strictly_increasing(const MonotoneMap& map) {
  double previous = map(0.0);
  if (!(previous >= 0.0 && previous <= 1.0))
    throw Error(ErrorKind::NonMonotoneMap, map.name() + " leaves [0,1] at u=0");
  for (int i = 1; i < kMonotoneGridPoints; ++i) {
    const double u = static_cast<double>(i) / (kMonotoneGridPoints - 1);
    const double value = map(u);
    if (!(value >= 0.0 && value <= 1.0))
      throw Error(ErrorKind::NonMonotoneMap, map.name() + " leaves [0,1] at u=" + format_number(u));
    if (!(value > previous))
      throw Error(ErrorKind::NonMonotoneMap, map.name() + " is not strictly increasing at u=" + format_number(u));
    previous = value;
  }
}

void validate_noise_rate_map(const MonotoneMap& map) {
  double previous = map(0.0);
  for (int i = 0; i < kMonotoneGridPoints; ++i) {
    const double u = static_cast<double>(i) / (kMonotoneGridPoints - 1);
    const double value = map(u);
    if (!(value >= 0.0 && value < 1.0))
      throw Error(ErrorKind::NonMonotoneMap, map.name() + " leaves [0,1) at u=" + format_number(u));
    if (value < previous)
      throw Error(ErrorKind::NonMonotoneMap, map.name() + " decreases at u=" + format_number(u));
    previous = value;
  }
}

}  // namespace cdr
