#include "rrg/poly.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "rrg/errors.hpp"

namespace rrg {

double log_mpz(const mpz_class& z) {
  if (sgn(z) <= 0) throw domain_error("log of non-positive integer");
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

double log_mpq(const mpq_class& q) {
  return log_mpz(q.get_num()) - log_mpz(q.get_den());
}

void PolynomialInX::add_term(int k, const mpq_class& c) {
  if (k < 0) throw domain_error("negative exponent");
  if (sgn(c) == 0) return;
  auto it = c_.find(k);
  if (it == c_.end()) {
    c_.emplace(k, c);
    return;
  }
  it->second += c;
  if (sgn(it->second) == 0) c_.erase(it);
}

mpq_class PolynomialInX::coeff(int k) const {
  auto it = c_.find(k);
  return it == c_.end() ? mpq_class(0) : it->second;
}

int PolynomialInX::degree() const { return c_.empty() ? -1 : c_.rbegin()->first; }

mpq_class PolynomialInX::evaluate(const mpq_class& x) const {
  mpq_class acc = 0;
  int k = degree();
  // Horner from the top exponent.
  for (; k >= 0; --k) {
    acc *= x;
    auto it = c_.find(k);
    if (it != c_.end()) acc += it->second;
  }
  return acc;
}

double PolynomialInX::log_evaluate(double x) const {
  if (!(x > 0)) throw domain_error("log_evaluate needs x > 0");
  const double lx = std::log(x);
  std::vector<double> pos, neg;
  for (const auto& [k, c] : c_) {
    if (sgn(c) > 0)
      pos.push_back(log_mpq(c) + k * lx);
    else
      neg.push_back(log_mpq(-c) + k * lx);
  }
  auto lse = [](const std::vector<double>& v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double m = v[0];
    for (double t : v) m = std::max(m, t);
    double s = 0;
    for (double t : v) s += std::exp(t - m);
    return m + std::log(s);
  };
  double lp = lse(pos), ln = lse(neg);
  if (!(lp > ln)) throw domain_error("polynomial value not positive");
  return lp + std::log1p(-std::exp(ln - lp));
}

double PolynomialInX::evaluate(double x) const {
  double acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    int k = it->first;
    auto nx = std::next(it);
    int next = nx == c_.rend() ? 0 : nx->first;
    acc = (acc + it->second.get_d()) * std::pow(x, k - next);
  }
  return acc;
}

PolynomialInX& PolynomialInX::operator+=(const PolynomialInX& o) {
  for (const auto& [k, c] : o.c_) add_term(k, c);
  return *this;
}

PolynomialInX& PolynomialInX::operator*=(const mpq_class& s) {
  if (sgn(s) == 0) {
    c_.clear();
    return *this;
  }
  for (auto& kv : c_) kv.second *= s;
  return *this;
}

PolynomialInX operator*(const PolynomialInX& a, const PolynomialInX& b) {
  PolynomialInX r;
  for (const auto& [i, ci] : a.c_)
    for (const auto& [j, cj] : b.c_) r.add_term(i + j, ci * cj);
  return r;
}

nlohmann::json PolynomialInX::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, c] : c_) j[std::to_string(k)] = {c.get_num().get_str(), c.get_den().get_str()};
  return j;
}

PolynomialInX PolynomialInX::from_json(const nlohmann::json& j) {
  PolynomialInX p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    auto field = [](const nlohmann::json& e) {
      return e.is_string() ? e.get<std::string>() : std::to_string(e.get<long long>());
    };
    mpq_class q(mpz_class(field(v.at(0))), mpz_class(field(v.at(1))));
    q.canonicalize();
    p.add_term(std::stoi(it.key()), q);
  }
  return p;
}

std::string PolynomialInX::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << it->second.get_str();
    if (it->first > 0) os << "*x^" << it->first;
  }
  return os.str();
}

}  // namespace rrg
