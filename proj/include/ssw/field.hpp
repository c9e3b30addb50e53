#pragma once

#include <string>
#include <vector>

namespace ssw {

// Polynomial nonlinearity F(z) = sum_k c_k z^k with c_0 = c_1 = 0.
class FieldSpec {
 public:
  FieldSpec() = default;
  explicit FieldSpec(std::vector<double> coeffs);

  // Accepts forms such as "z^2", "z^2-z^3", "2*z^2 + 0.5 z^3".
  static FieldSpec parse(const std::string& text);
  static FieldSpec cubic() { return FieldSpec({0, 0, 1}); }
  static FieldSpec quintic() { return FieldSpec({0, 0, 0, 1}); }
  static FieldSpec cubic_quintic(double sigma) { return FieldSpec({0, 0, 1, sigma}); }

  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double L() const { return coeffs_.size() > 2 ? 2.0 * coeffs_[2] : 0.0; }

  double F(double z) const { return derivative(z, 0); }
  // k-th derivative of F at z.
  double derivative(double z, int k) const;
  // F(z)/z as a polynomial.
  double ratio(double z) const;
  double ratio_derivative(double z) const;

  std::string to_string() const;

 private:
  std::vector<double> coeffs_{0, 0, 1};
};

}  // namespace ssw
