#ifndef ECOC_BOUNDS_HPP
#define ECOC_BOUNDS_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "ecoc/error.hpp"
#include "ecoc/prob_engine.hpp"

namespace ecoc {

/// Four times the mean bit error rate. Holds for any dependence structure; may exceed 1.
inline double gs_bound(double e_bar) {
  if (!(e_bar >= 0.0)) throw DomainError("gs_bound: negative error rate");
  return 4.0 * e_bar;
}

inline double gs_bound(const ErrorProfile& profile) { return gs_bound(profile.mean()); }

/// m(1-e)/(m-ne)^2, valid only for m > n e.
inline double feller_bound(std::size_t n, std::size_t m, double e) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  if (!(e >= 0.0 && e <= 1.0)) throw DomainError("feller_bound: error rate outside [0,1]");
  if (!(mm > nn * e)) throw DomainError("feller_bound: requires m > n*e");
  const double gap = mm - nn * e;
  return mm * (1.0 - e) / (gap * gap);
}

/// e^(m-mu) (mu/m)^m for mu = sum of the error rates, 0 < mu < m.
inline double chernoff_mu_bound(double mu, std::size_t m) {
  const double mm = static_cast<double>(m);
  if (!(mu > 0.0) || !(mu < mm)) throw DomainError("chernoff_mu_bound: requires 0 < mu < m");
  return std::exp(mm - mu + mm * std::log(mu / mm));
}

/// Per-classifier decay factor lambda = e^(r-e) / (r/e)^r; the bound is lambda^n.
/// lambda(r, 0) = 0 by continuity.
inline double chernoff_lambda(double r, double e) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("chernoff_lambda: ratio r must lie in (0,1)");
  if (!(e >= 0.0 && e <= 1.0)) throw DomainError("chernoff_lambda: error rate outside [0,1]");
  if (e == 0.0) return 0.0;
  return std::exp(r - e + r * std::log(e / r));
}

/// omega = (e/r)^r ((1-e)/(1-r))^(1-r); < 1 whenever e != r.
inline double chernoff_omega(double r, double e) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("chernoff_omega: ratio r must lie in (0,1)");
  if (!(e >= 0.0 && e <= 1.0)) throw DomainError("chernoff_omega: error rate outside [0,1]");
  return std::pow(e / r, r) * std::pow((1.0 - e) / (1.0 - r), 1.0 - r);
}

/// lambda^n + 0.5 c n (n-1) ((m-1)/(n-1) - e) omega^n with no precondition checks.
inline double kz_formula(std::size_t n, std::size_t m, double e, double c) {
  if (n < 2 || m == 0 || m >= n) throw DomainError("kz_formula: requires n >= 2 and 0 < m < n");
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  const double r = mm / nn;
  return std::pow(chernoff_lambda(r, e), nn) +
         0.5 * c * nn * (nn - 1.0) * ((mm - 1.0) / (nn - 1.0) - e) * std::pow(chernoff_omega(r, e), nn);
}

/// Reason the checked KZ bound does not apply, or nullopt when it does.
inline std::optional<std::string> kz_inapplicable_reason(std::size_t n, std::size_t m, double e, double c) {
  if (n < 2 || m == 0 || m >= n) return "requires n >= 2 and 0 < m < n";
  if (!(e > 0.0 && e < 1.0)) return "mean bit error must lie in (0,1)";
  const double limit = (static_cast<double>(m) - 1.0) / (static_cast<double>(n) - 1.0);
  if (e > limit) return "mean bit error " + std::to_string(e) + " exceeds (m-1)/(n-1)=" + std::to_string(limit);
  if (c < 0.0) return "negative correlation " + std::to_string(c);
  if (c > bahadur_range(n, e).hi) return "correlation " + std::to_string(c) + " above the Bahadur range";
  return std::nullopt;
}

/// Upper bound on the exchangeable tail for c >= 0 and e <= (m-1)/(n-1).
inline double kz_bound(std::size_t n, std::size_t m, double e, double c) {
  if (auto why = kz_inapplicable_reason(n, m, e, c)) throw DomainError("kz_bound: " + *why);
  return kz_formula(n, m, e, c);
}

struct BoundInputs {
  std::size_t n = 0;
  std::size_t m = 0;
  double e_bar = 0.0;
  std::optional<double> c;
  /// Sum of per-classifier rates; defaults to n * e_bar.
  std::optional<double> mu;
};

struct BoundReport {
  double gs = 0.0;
  std::optional<double> feller;
  std::optional<double> chernoff_mu;
  double chernoff_lambda = 0.0;  ///< lambda^n
  std::optional<double> kz;      ///< present only where the KZ preconditions hold
  std::optional<double> kz_formula;
  std::string kz_reason;
  double lambda = 0.0;
  double omega = 0.0;
};

/// Evaluates every bound that applies. Values are never clipped to 1.
inline BoundReport evaluate_bounds(const BoundInputs& in) {
  if (in.n == 0 || in.m == 0 || in.m > in.n) throw DomainError("evaluate_bounds: requires 1 <= m <= n");
  if (!(in.e_bar >= 0.0 && in.e_bar <= 1.0)) throw DomainError("evaluate_bounds: mean bit error outside [0,1]");
  const double nn = static_cast<double>(in.n), mm = static_cast<double>(in.m);
  const double r = mm / nn;

  BoundReport rep;
  rep.gs = gs_bound(in.e_bar);
  if (mm > nn * in.e_bar) rep.feller = feller_bound(in.n, in.m, in.e_bar);
  const double mu = in.mu.value_or(nn * in.e_bar);
  if (mu > 0.0 && mu < mm) rep.chernoff_mu = chernoff_mu_bound(mu, in.m);
  if (in.m == in.n) {
    rep.kz_reason = "m = n leaves r = 1";
    rep.lambda = 1.0;
    rep.chernoff_lambda = 1.0;
    return rep;
  }
  rep.lambda = chernoff_lambda(r, in.e_bar);
  rep.omega = chernoff_omega(r, in.e_bar);
  rep.chernoff_lambda = std::pow(rep.lambda, nn);
  if (in.c) {
    if (in.n >= 2) rep.kz_formula = kz_formula(in.n, in.m, in.e_bar, *in.c);
    if (auto why = kz_inapplicable_reason(in.n, in.m, in.e_bar, *in.c))
      rep.kz_reason = *why;
    else
      rep.kz = rep.kz_formula;
  } else {
    rep.kz_reason = "no correlation supplied";
  }
  return rep;
}

}  // namespace ecoc

#endif  // ECOC_BOUNDS_HPP
