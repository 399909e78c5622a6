#include "cmnet/finner.hpp"

#include "cmnet/errors.hpp"

#include <cmath>
#include <map>

namespace cmnet {
namespace {

Rational power(const Rational& base, const BigInt& exp) {
  Rational r = 1;
  for (BigInt e = 0; e < exp; ++e) r *= base;
  return r;
}

}  // namespace

FinnerReport finner_check(const Network& net, const Distribution& d, const FinnerWeights& w, double tol) {
  if (const auto issues = validate_weights(net, w); !issues.empty()) {
    throw PreconditionError("invalid Finner weights: " + issues.front());
  }
  if (d.parties() != net.party_names()) {
    throw PreconditionError("distribution parties do not match the network");
  }
  d.check();
  const std::size_t n = d.parties().size();
  std::vector<Rational> weight;
  for (const auto& name : d.parties()) weight.push_back(w.at(name));

  // Single-party marginals.
  std::vector<Distribution> marg;
  for (const auto& name : d.parties()) marg.push_back(marginal(d, {name}));

  FinnerReport report;
  report.exact = d.exact();

  BigInt q = 1;
  for (const auto& x : weight) {
    const BigInt den = boost::multiprecision::denominator(x);
    q = q / boost::multiprecision::gcd(q, den) * den;
  }

  for (const auto& o : d.support()) {
    const double p = d.probability(o);
    double log_rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double m = marg[j].probability({o[j]});
      log_rhs += to_double(weight[j]) * std::log(m);
    }
    const double rhs = std::exp(log_rhs);
    const double ratio = p / rhs;
    report.max_ratio = std::max(report.max_ratio, ratio);

    if (d.exact()) {
      const Rational lhs_pow = power(d.exact_probability(o), q);
      Rational rhs_pow = 1;
      for (std::size_t j = 0; j < n; ++j) {
        const BigInt pj = boost::multiprecision::numerator(weight[j]) * (q / boost::multiprecision::denominator(weight[j]));
        rhs_pow *= power(marg[j].exact_probability({o[j]}), pj);
      }
      if (lhs_pow > rhs_pow) {
        report.violations.push_back({o, p, rhs});
      } else if (lhs_pow == rhs_pow) {
        report.equalities.push_back(o);
      }
    } else {
      if (ratio > 1.0 + tol) {
        report.violations.push_back({o, p, rhs});
      } else if (std::abs(ratio - 1.0) <= tol) {
        report.equalities.push_back(o);
      }
    }
  }
  return report;
}

}  // namespace cmnet
