#ifndef ECOC_FIGURES_HPP
#define ECOC_FIGURES_HPP

// Plot data (CSV) for bound-vs-mean-bit-error figures. No plotting here.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ecoc/bounds.hpp"
#include "ecoc/experiment_io.hpp"

namespace ecoc {

struct GsChernoffPoint {
  std::size_t n;
  double e_bar;
  double gs;
  double chernoff;
};

/// GS and Chernoff (lambda^n) on the open grid step, 2*step, ... < r, for each n at fixed r.
inline std::vector<GsChernoffPoint> gs_vs_chernoff_curves(std::span<const std::size_t> ns, double r, double step) {
  if (!(step > 0.0) || !(r > 0.0 && r < 1.0)) throw ArgumentError("gs_vs_chernoff_curves: need step > 0 and r in (0,1)");
  std::vector<GsChernoffPoint> out;
  for (std::size_t n : ns) {
    for (std::size_t i = 1;; ++i) {
      const double e = static_cast<double>(i) * step;
      if (e >= r - 1e-12) break;
      out.push_back({n, e, gs_bound(e), std::pow(chernoff_lambda(r, e), static_cast<double>(n))});
    }
  }
  return out;
}

/// Sign changes of (chernoff - gs) along one curve, in grid order.
inline std::size_t crossing_count(std::span<const GsChernoffPoint> curve) {
  std::size_t changes = 0;
  int prev = 0;
  for (const auto& p : curve) {
    const double d = p.chernoff - p.gs;
    const int sign = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (sign == 0) continue;
    if (prev != 0 && sign != prev) ++changes;
    prev = sign;
  }
  return changes;
}

inline std::string gs_vs_chernoff_csv(std::span<const GsChernoffPoint> pts) {
  std::ostringstream os;
  os << "n,e_bar,gs,chernoff\n";
  for (const auto& p : pts)
    os << p.n << ',' << format_double(p.e_bar) << ',' << format_double(p.gs) << ',' << format_double(p.chernoff) << '\n';
  return os.str();
}

/// Fold scatter (experimental error and each fold's bounds at its own e_bar) plus GS,
/// Chernoff and KZ curves over the folds' e_bar range, KZ using the mean fold correlation.
/// Columns: kind,series,fold,e_bar,value.
inline std::string scatter_csv(const AggregateReport& rep, std::size_t curve_points = 101) {
  std::ostringstream os;
  os << "kind,series,fold,e_bar,value\n";
  double lo = std::numeric_limits<double>::max(), hi = 0.0;
  for (const auto& f : rep.folds) {
    const auto& s = f.summary;
    const std::string e = format_double(s.mean_bit_error);
    os << "point,experimental," << s.fold_id << ',' << e << ','
       << (s.ecoc_error_text.empty() ? format_double(s.ecoc_error) : s.ecoc_error_text) << '\n';
    os << "point,gs," << s.fold_id << ',' << e << ',' << format_double(f.bounds.gs) << '\n';
    os << "point,chernoff," << s.fold_id << ',' << e << ',' << format_double(f.bounds.chernoff_lambda) << '\n';
    if (f.bounds.kz_formula) os << "point,kz," << s.fold_id << ',' << e << ',' << format_double(*f.bounds.kz_formula) << '\n';
    lo = std::min(lo, s.mean_bit_error);
    hi = std::max(hi, s.mean_bit_error);
  }
  lo *= 0.8;
  hi = std::min(hi * 1.2, 1.0);
  if (curve_points < 2 || rep.m == 0 || rep.m >= rep.n) return os.str();
  const double c = rep.mean_correlation.mean;
  for (std::size_t i = 0; i < curve_points; ++i) {
    const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(curve_points - 1);
    if (e <= 0.0) continue;
    FoldSummary s;
    s.mean_bit_error = e;
    s.mean_correlation = c;
    const BoundReport b = bound_report(s, rep.n, rep.m);
    const std::string es = format_double(e);
    os << "curve,gs,," << es << ',' << format_double(b.gs) << '\n';
    os << "curve,chernoff,," << es << ',' << format_double(b.chernoff_lambda) << '\n';
    if (b.kz_formula) os << "curve,kz,," << es << ',' << format_double(*b.kz_formula) << '\n';
  }
  return os.str();
}

}  // namespace ecoc

#endif  // ECOC_FIGURES_HPP
