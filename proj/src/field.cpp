#include "ssw/field.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include "ssw/errors.hpp"

namespace ssw {

FieldSpec::FieldSpec(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 3 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.size() < 3) coeffs_.resize(3, 0.0);
  if (coeffs_[0] != 0.0 || coeffs_[1] != 0.0)
    throw ConfigParse("F must satisfy F(0) = F'(0) = 0 (no constant or linear term)");
}

FieldSpec FieldSpec::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ConfigParse("empty nonlinearity");
  static const std::regex term(R"(([+-]?)(\d*\.?\d*(?:[eE][+-]?\d+)?)\*?(z(?:\^(\d+))?)?)");
  std::vector<double> c(3, 0.0);
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::smatch m;
    auto begin = s.cbegin() + static_cast<std::ptrdiff_t>(pos);
    if (!std::regex_search(begin, s.cend(), m, term, std::regex_constants::match_continuous) || m.length(0) == 0)
      throw ConfigParse("cannot parse nonlinearity '" + text + "' near position " + std::to_string(pos));
    const bool has_z = m[3].matched && m[3].length() > 0;
    const std::string num = m[2].str();
    if (!has_z && num.empty()) throw ConfigParse("dangling sign in '" + text + "'");
    double value = num.empty() ? 1.0 : std::stod(num);
    if (m[1].str() == "-") value = -value;
    int power = 0;
    if (has_z) power = m[4].matched ? std::stoi(m[4].str()) : 1;
    if (static_cast<int>(c.size()) <= power) c.resize(power + 1, 0.0);
    c[power] += value;
    pos += static_cast<std::size_t>(m.length(0));
  }
  return FieldSpec(c);
}

double FieldSpec::derivative(double z, int k) const {
  double acc = 0.0;
  for (int p = degree(); p >= k; --p) {
    double fall = 1.0;
    for (int j = 0; j < k; ++j) fall *= (p - j);
    acc = acc * z + coeffs_[p] * fall;
  }
  return acc;
}

double FieldSpec::ratio(double z) const {
  double acc = 0.0;
  for (int p = degree(); p >= 1; --p) acc = acc * z + coeffs_[p];
  return acc;
}

double FieldSpec::ratio_derivative(double z) const {
  double acc = 0.0;
  for (int p = degree(); p >= 2; --p) acc = acc * z + coeffs_[p] * (p - 1);
  return acc;
}

std::string FieldSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (int p = 2; p <= degree(); ++p) {
    const double c = coeffs_[p];
    if (c == 0.0) continue;
    if (!first) os << (c < 0 ? "-" : "+");
    else if (c < 0) os << "-";
    if (std::abs(c) != 1.0) os << std::abs(c) << "*";
    os << "z^" << p;
    first = false;
  }
  return first ? "0" : os.str();
}

}  // namespace ssw
