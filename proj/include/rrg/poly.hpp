#pragma once

#include <gmpxx.h>

#include <map>
#include <string>

#include <json.hpp>

namespace rrg {

// Sum_k c_k x^k with exact rational coefficients; zero coefficients are not stored.
class PolynomialInX {
 public:
  PolynomialInX() = default;

  void add_term(int k, const mpq_class& c);
  mpq_class coeff(int k) const;
  int degree() const;  // -1 for the zero polynomial
  bool is_zero() const { return c_.empty(); }
  const std::map<int, mpq_class>& terms() const { return c_; }

  mpq_class evaluate(const mpq_class& x) const;
  // Log of the value at x > 0; safe when coefficients overflow a double.
  double log_evaluate(double x) const;
  double evaluate(double x) const;

  PolynomialInX& operator+=(const PolynomialInX& o);
  PolynomialInX& operator*=(const mpq_class& s);
  friend PolynomialInX operator*(const PolynomialInX& a, const PolynomialInX& b);
  friend bool operator==(const PolynomialInX& a, const PolynomialInX& b) { return a.c_ == b.c_; }

  // {"k": ["num", "den"], ...}; numerators kept as strings so big values survive.
  nlohmann::json to_json() const;
  static PolynomialInX from_json(const nlohmann::json& j);
  std::string to_string() const;

 private:
  std::map<int, mpq_class> c_;
};

// log of a positive big integer / rational as a double.
double log_mpz(const mpz_class& z);
double log_mpq(const mpq_class& q);

}  // namespace rrg
