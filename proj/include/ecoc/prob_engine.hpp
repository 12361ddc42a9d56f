#ifndef ECOC_PROB_ENGINE_HPP
#define ECOC_PROB_ENGINE_HPP

// Exact distributions of the number of erring binary classifiers under the
// independent, pair-correlated and exchangeable (second-order Bahadur) models.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ecoc/error.hpp"

namespace ecoc {

namespace detail {

inline void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError(std::string(what) + ": probability " + std::to_string(p) + " outside [0,1]");
}

inline void require_count_range(std::size_t k, std::size_t n, const char* what) {
  if (k > n) throw ArgumentError(std::string(what) + ": count " + std::to_string(k) + " exceeds n=" + std::to_string(n));
}

/// Exact in double for n <= 50 (largest value C(50,25) ~ 1.3e14 < 2^53).
inline double binomial_coefficient_small(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

}  // namespace detail

inline double log_binomial_coefficient(std::size_t n, std::size_t k) {
  detail::require_count_range(k, n, "log_binomial_coefficient");
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

/// C(n,k) e^k (1-e)^(n-k); log-space evaluation above n = 50.
inline double binomial_pmf(std::size_t n, std::size_t k, double e) {
  detail::require_count_range(k, n, "binomial_pmf");
  detail::require_probability(e, "binomial_pmf");
  if (e == 0.0) return k == 0 ? 1.0 : 0.0;
  if (e == 1.0) return k == n ? 1.0 : 0.0;
  const auto kk = static_cast<double>(k);
  const auto rest = static_cast<double>(n - k);
  if (n <= 50) return detail::binomial_coefficient_small(n, k) * std::pow(e, kk) * std::pow(1.0 - e, rest);
  return std::exp(log_binomial_coefficient(n, k) + kk * std::log(e) + rest * std::log1p(-e));
}

/// Upper binomial tail sum_{k>=m} p(n,k,e). m = 0 is accepted and yields 1.
inline double tail_iid(std::size_t n, std::size_t m, double e) {
  detail::require_count_range(m, n, "tail_iid");
  detail::require_probability(e, "tail_iid");
  if (m == 0) return 1.0;
  double s = 0.0;
  // smallest terms first
  for (std::size_t k = n + 1; k-- > m;) s += binomial_pmf(n, k, e);
  return std::min(s, 1.0);
}

/// Per-classifier bit error rates e_1..e_n.
class ErrorProfile {
 public:
  ErrorProfile() = default;
  explicit ErrorProfile(std::vector<double> rates) : rates_(std::move(rates)) {
    if (rates_.empty()) throw ArgumentError("ErrorProfile: need at least one classifier");
    for (double e : rates_) detail::require_probability(e, "ErrorProfile");
  }
  static ErrorProfile iid(std::size_t n, double e) { return ErrorProfile(std::vector<double>(n, e)); }

  std::size_t size() const noexcept { return rates_.size(); }
  std::span<const double> rates() const noexcept { return rates_; }
  double operator[](std::size_t i) const { return rates_[i]; }
  double sum() const { return std::accumulate(rates_.begin(), rates_.end(), 0.0); }
  double mean() const { return sum() / static_cast<double>(rates_.size()); }
  double max() const { return *std::max_element(rates_.begin(), rates_.end()); }

 private:
  std::vector<double> rates_;
};

/// Full Poisson-binomial distribution of k = number of errors, by the O(n^2) convolution DP.
inline std::vector<double> poisson_binomial_distribution(std::span<const double> rates) {
  std::vector<double> dist(rates.size() + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double e = rates[i];
    for (std::size_t j = i + 1; j > 0; --j) dist[j] = dist[j] * (1.0 - e) + dist[j - 1] * e;
    dist[0] *= 1.0 - e;
  }
  return dist;
}

inline std::vector<double> poisson_binomial_distribution(const ErrorProfile& profile) {
  return poisson_binomial_distribution(profile.rates());
}

inline double poisson_binomial_pmf(const ErrorProfile& profile, std::size_t k) {
  detail::require_count_range(k, profile.size(), "poisson_binomial_pmf");
  return poisson_binomial_distribution(profile)[k];
}

/// P(at least m of the independent classifiers err).
inline double tail_independent(const ErrorProfile& profile, std::size_t m) {
  detail::require_count_range(m, profile.size(), "tail_independent");
  if (m == 0) return 1.0;
  const auto dist = poisson_binomial_distribution(profile);
  double s = 0.0;
  for (std::size_t k = dist.size(); k-- > m;) s += dist[k];
  return std::min(s, 1.0);
}

/// Independent classifiers except the last two, whose joint error probability is f.
class PairModel {
 public:
  PairModel(ErrorProfile profile, double f) : profile_(std::move(profile)), f_(f) {
    if (profile_.size() < 2) throw ModelError("PairModel: need at least 2 classifiers");
    const double a = e_prev(), b = e_last();
    const double lo = std::max(0.0, a + b - 1.0), hi = std::min(a, b);
    if (!(f >= lo && f <= hi))
      throw ModelError("PairModel: joint probability f=" + std::to_string(f) + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }

  const ErrorProfile& profile() const noexcept { return profile_; }
  std::size_t size() const noexcept { return profile_.size(); }
  double f() const noexcept { return f_; }
  double e_prev() const { return profile_[profile_.size() - 2]; }
  double e_last() const { return profile_[profile_.size() - 1]; }
  /// Mean error rate of the correlated pair.
  double pair_mean() const { return 0.5 * (e_prev() + e_last()); }

  /// Joint table of the pair, indexed [bit of L_{n-1}][bit of L_n].
  double cell(int prev_bit, int last_bit) const {
    if (prev_bit && last_bit) return f_;
    if (prev_bit) return e_prev() - f_;
    if (last_bit) return e_last() - f_;
    return 1.0 - e_prev() - e_last() + f_;
  }

  /// Pearson correlation of the pair's error indicators (0 when either rate is degenerate).
  double correlation() const {
    const double a = e_prev(), b = e_last();
    const double v = a * (1 - a) * b * (1 - b);
    return v > 0 ? (f_ - a * b) / std::sqrt(v) : 0.0;
  }

 private:
  ErrorProfile profile_;
  double f_;
};

/// Valid f interval for an identically distributed pair with error rate e.
struct Interval {
  double lo;
  double hi;
};

inline Interval pair_f_interval(double e) {
  detail::require_probability(e, "pair_f_interval");
  return {std::max(0.0, 2.0 * e - 1.0), e};
}

/// p_{E_n}(n,k,f): condition on the state of the correlated pair and convolve with
/// the Poisson binomial of the remaining n-2 classifiers.
inline double pair_correlated_pmf(const PairModel& model, std::size_t k) {
  const std::size_t n = model.size();
  detail::require_count_range(k, n, "pair_correlated_pmf");
  const auto rest = poisson_binomial_distribution(model.profile().rates().first(n - 2));
  const auto q = [&](std::ptrdiff_t j) -> double {
    return (j < 0 || j > static_cast<std::ptrdiff_t>(n - 2)) ? 0.0 : rest[static_cast<std::size_t>(j)];
  };
  const double f = model.f(), mean = model.pair_mean();
  const auto kk = static_cast<std::ptrdiff_t>(k);
  const auto nn = static_cast<std::ptrdiff_t>(n);
  if (kk <= nn - 2) return f * q(kk - 2) + 2.0 * (mean - f) * q(kk - 1) + (1.0 - 2.0 * mean + f) * q(kk);
  if (kk == nn - 1) return f * q(nn - 3) + 2.0 * (mean - f) * q(nn - 2);
  return f * q(nn - 2);
}

inline std::vector<double> pair_correlated_distribution(const PairModel& model) {
  std::vector<double> out(model.size() + 1);
  for (std::size_t k = 0; k <= model.size(); ++k) out[k] = pair_correlated_pmf(model, k);
  return out;
}

/// Tail of a heterogeneous pair model by summing the pmf.
inline double pair_correlated_tail(const PairModel& model, std::size_t m) {
  detail::require_count_range(m, model.size(), "pair_correlated_tail");
  if (m == 0) return 1.0;
  const auto dist = pair_correlated_distribution(model);
  double s = 0.0;
  for (std::size_t k = dist.size(); k-- > m;) s += dist[k];
  return s;
}

namespace detail {

/// Binomial tail with m allowed outside [1, n]: 1 for m <= 0, 0 for m > n.
inline double tail_iid_extended(std::size_t n, std::ptrdiff_t m, double e) {
  if (m <= 0) return 1.0;
  if (m > static_cast<std::ptrdiff_t>(n)) return 0.0;
  return tail_iid(n, static_cast<std::size_t>(m), e);
}

}  // namespace detail

/// eps(n,m,e,f) = f eps(n-2,m-2,e) + 2(e-f) eps(n-2,m-1,e) + (1-2e+f) eps(n-2,m,e).
inline double pair_correlated_tail(std::size_t n, std::size_t m, double e, double f) {
  if (n < 2) throw ModelError("pair_correlated_tail: need n >= 2");
  detail::require_count_range(m, n, "pair_correlated_tail");
  detail::require_probability(e, "pair_correlated_tail");
  const Interval fi = pair_f_interval(e);
  if (!(f >= fi.lo && f <= fi.hi)) throw ModelError("pair_correlated_tail: f=" + std::to_string(f) + " outside its valid interval");
  if (m == 0) return 1.0;
  const auto mm = static_cast<std::ptrdiff_t>(m);
  return f * detail::tail_iid_extended(n - 2, mm - 2, e) + 2.0 * (e - f) * detail::tail_iid_extended(n - 2, mm - 1, e) +
         (1.0 - 2.0 * e + f) * detail::tail_iid_extended(n - 2, mm, e);
}

/// Correlation coefficients c for which the exchangeable second-order Bahadur law is a
/// probability distribution.
///
/// hi = 2e(1-e)/((n-1)e(1-e) + 0.25 - gamma), gamma = min_k [k - (n-1)e - 0.5]^2.
/// lo = -2/(n(n-1)) min(e/(1-e), (1-e)/e): the k=0 and k=n weights.
inline Interval bahadur_range(std::size_t n, double e) {
  if (n < 2) throw ModelError("bahadur_range: need n >= 2");
  if (!(e > 0.0 && e < 1.0)) throw ModelError("bahadur_range: mean error rate must lie in (0,1)");
  const double nn = static_cast<double>(n);
  double gamma = 0.25;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) - (nn - 1.0) * e - 0.5;
    gamma = std::min(gamma, t * t);
  }
  const double lo = -2.0 / (nn * (nn - 1.0)) * std::min(e / (1.0 - e), (1.0 - e) / e);
  const double hi = 2.0 * e * (1.0 - e) / ((nn - 1.0) * e * (1.0 - e) + 0.25 - gamma);
  return {lo, hi};
}

/// Ratio pi_A / P(A) for any outcome with k errors:
/// 1 + c/(2e(1-e)) (k^2 - k + e(n-1)(ne - 2k)). Unchecked.
inline double exchangeable_weight(std::size_t n, std::size_t k, double e, double c) {
  const double kk = static_cast<double>(k), nn = static_cast<double>(n);
  return 1.0 + c / (2.0 * e * (1.0 - e)) * (kk * kk - kk + e * (nn - 1.0) * (nn * e - 2.0 * kk));
}

inline constexpr double kWeightSlack = 1e-12;

/// n exchangeable classifiers with common error rate e_bar and pairwise correlation c.
class ExchangeableModel {
 public:
  ExchangeableModel(std::size_t n, double e_bar, double c) : n_(n), e_bar_(e_bar), c_(c) {
    if (n < 2) throw ModelError("ExchangeableModel: need n >= 2");
    if (!(e_bar > 0.0 && e_bar < 1.0)) throw ModelError("ExchangeableModel: mean error rate must lie in (0,1)");
    weights_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      double w = exchangeable_weight(n, k, e_bar, c);
      if (w < -kWeightSlack)
        throw ModelError("ExchangeableModel: c=" + std::to_string(c) + " gives negative probability for k=" + std::to_string(k));
      weights_[k] = std::max(w, 0.0);
    }
  }

  std::size_t size() const noexcept { return n_; }
  double e_bar() const noexcept { return e_bar_; }
  double c() const noexcept { return c_; }
  /// Clamped weight pi_A / P(A) for |A| = k.
  double weight(std::size_t k) const { return weights_.at(k); }

 private:
  std::size_t n_;
  double e_bar_;
  double c_;
  std::vector<double> weights_;
};

inline double exchangeable_pmf(const ExchangeableModel& model, std::size_t k) {
  detail::require_count_range(k, model.size(), "exchangeable_pmf");
  return binomial_pmf(model.size(), k, model.e_bar()) * model.weight(k);
}

inline double exchangeable_pmf(std::size_t n, std::size_t k, double e, double c) {
  return exchangeable_pmf(ExchangeableModel(n, e, c), k);
}

/// Closed form eps(n,m,e) + 0.5 c n (n-1) ((m-1)/(n-1) - e) p(n-1,m-1,e).
inline double exchangeable_tail(std::size_t n, std::size_t m, double e, double c) {
  const ExchangeableModel model(n, e, c);  // validates c
  detail::require_count_range(m, n, "exchangeable_tail");
  if (m == 0) return 1.0;
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return tail_iid(n, m, e) + 0.5 * c * nn * (nn - 1.0) * ((mm - 1.0) / (nn - 1.0) - e) * binomial_pmf(n - 1, m - 1, e);
}

using DependenceModel = std::variant<ErrorProfile, PairModel, ExchangeableModel>;

inline std::size_t model_size(const DependenceModel& model) {
  return std::visit([](const auto& m) { return m.size(); }, model);
}

/// Distribution of k through each model's analytic route.
inline std::vector<double> error_count_distribution(const DependenceModel& model) {
  struct Visitor {
    std::vector<double> operator()(const ErrorProfile& p) const { return poisson_binomial_distribution(p); }
    std::vector<double> operator()(const PairModel& p) const { return pair_correlated_distribution(p); }
    std::vector<double> operator()(const ExchangeableModel& p) const {
      std::vector<double> out(p.size() + 1);
      for (std::size_t k = 0; k <= p.size(); ++k) out[k] = exchangeable_pmf(p, k);
      return out;
    }
  };
  return std::visit(Visitor{}, model);
}

/// P(k >= m) through each model's analytic route (closed forms where they exist).
inline double error_tail(const DependenceModel& model, std::size_t m) {
  struct Visitor {
    std::size_t m;
    double operator()(const ErrorProfile& p) const { return tail_independent(p, m); }
    double operator()(const PairModel& p) const { return pair_correlated_tail(p, m); }
    double operator()(const ExchangeableModel& p) const { return exchangeable_tail(p.size(), m, p.e_bar(), p.c()); }
  };
  return std::visit(Visitor{m}, model);
}

inline constexpr std::size_t kMaxEnumerationSize = 20;

/// Probability of the single outcome L = bits (bit i of `mask` is L_{i+1}) under the model's joint law.
inline double outcome_probability(const DependenceModel& model, std::uint32_t mask) {
  struct Visitor {
    std::uint32_t mask;
    bool bit(std::size_t i) const { return (mask >> i) & 1u; }
    double operator()(const ErrorProfile& p) const {
      double prob = 1.0;
      for (std::size_t i = 0; i < p.size(); ++i) prob *= bit(i) ? p[i] : 1.0 - p[i];
      return prob;
    }
    double operator()(const PairModel& p) const {
      const std::size_t n = p.size();
      double prob = 1.0;
      for (std::size_t i = 0; i + 2 < n; ++i) prob *= bit(i) ? p.profile()[i] : 1.0 - p.profile()[i];
      return prob * p.cell(bit(n - 2), bit(n - 1));
    }
    // Second-order Bahadur expansion summed pair by pair.
    double operator()(const ExchangeableModel& p) const {
      const double e = p.e_bar();
      const double sd = std::sqrt(e * (1.0 - e));
      double base = 1.0, pair_sum = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        base *= bit(i) ? e : 1.0 - e;
        const double zi = ((bit(i) ? 1.0 : 0.0) - e) / sd;
        for (std::size_t j = i + 1; j < p.size(); ++j) pair_sum += zi * ((bit(j) ? 1.0 : 0.0) - e) / sd;
      }
      return base * (1.0 + p.c() * pair_sum);
    }
  };
  return std::visit(Visitor{mask}, model);
}

/// Brute-force distribution of k over all 2^n outcomes. Test oracle; n <= 20.
inline std::vector<double> enumerate_outcomes(const DependenceModel& model) {
  const std::size_t n = model_size(model);
  if (n > kMaxEnumerationSize) throw SizeError("enumerate_outcomes: n=" + std::to_string(n) + " above cap 20");
  std::vector<double> dist(n + 1, 0.0);
  const std::uint32_t end = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < end; ++mask)
    dist[static_cast<std::size_t>(std::popcount(mask))] += outcome_probability(model, mask);
  return dist;
}

}  // namespace ecoc

#endif  // ECOC_PROB_ENGINE_HPP
