// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "ecoc/ecoc.hpp"
#include "grids.hpp"
#include "reference_rows.hpp"

using namespace ecoc;
using ecoc::test::ebar_grid;
using ecoc::test::linspace;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double tail_of(const std::vector<double>& dist, std::size_t m) {
  double s = 0.0;
  for (std::size_t k = m; k < dist.size(); ++k) s += dist[k];
  return s;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome oracle_independent() {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + gen() % 12;
    std::vector<double> r(n);
    for (double& x : r) x = u(gen);
    const ErrorProfile p(r);
    const auto oracle = enumerate_outcomes(p);
    for (std::size_t k = 0; k <= n; ++k) {
      worst = std::max(worst, std::abs(poisson_binomial_pmf(p, k) - oracle[k]));
      worst = std::max(worst, std::abs(tail_independent(p, k) - tail_of(oracle, k)));
    }
  }
  return {worst <= 1e-12, "200 profiles, max abs diff " + fmt("%.3g", worst)};
}

Outcome oracle_pair() {
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::size_t n = 2; n <= 10; ++n)
    for (double e : ebar_grid()) {
      const Interval fi = pair_f_interval(e);
      for (double f : linspace(fi.lo, fi.hi, 9)) {
        const PairModel model(ErrorProfile::iid(n, e), f);
        const auto oracle = enumerate_outcomes(model);
        for (std::size_t k = 0; k <= n; ++k) {
          worst = std::max(worst, std::abs(pair_correlated_pmf(model, k) - oracle[k]));
          worst = std::max(worst, std::abs(pair_correlated_tail(n, k, e, f) - tail_of(oracle, k)));
        }
        ++cases;
      }
    }
  return {worst <= 1e-10, std::to_string(cases) + " (n,e,f) cases, max abs diff " + fmt("%.3g", worst)};
}

Outcome oracle_exchangeable() {
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::size_t n = 2; n <= 12; ++n)
    for (double e : ebar_grid()) {
      const Interval b = bahadur_range(n, e);
      for (double c : linspace(b.lo, b.hi, 5)) {
        const ExchangeableModel model(n, e, c);
        const auto oracle = enumerate_outcomes(model);
        std::vector<double> pmf(n + 1);
        for (std::size_t k = 0; k <= n; ++k) pmf[k] = exchangeable_pmf(model, k);
        for (std::size_t m = 0; m <= n; ++m) {
          const double closed = exchangeable_tail(n, m, e, c);
          worst = std::max(worst, std::abs(closed - tail_of(pmf, m)));
          worst = std::max(worst, std::abs(closed - tail_of(oracle, m)));
        }
        ++cases;
      }
    }
  return {worst <= 1e-10, std::to_string(cases) + " (n,e,c) cases, max abs diff " + fmt("%.3g", worst)};
}

Outcome dominance() {
  std::size_t checks = 0, violations = 0, kz_checks = 0, kz_violations = 0;
  double worst = 0.0;
  std::string first;
  for (std::size_t n : {8u, 10u, 12u, 16u, 26u}) {
    const CodeMatrix code = build_code_matrix(n);
    const std::size_t m = code.m();
    const double r = code.r();
    const double pivot = (static_cast<double>(m) - 1.0) / (static_cast<double>(n) - 1.0);
    for (double e : linspace(0.0, r, 202)) {
      if (e <= 0.0 || e >= r) continue;
      const double exact = tail_iid(n, m, e);
      violations += exact > feller_bound(n, m, e) + 1e-12;
      violations += exact > std::pow(chernoff_lambda(r, e), static_cast<double>(n)) + 1e-12;
      checks += 2;
      if (e > pivot) continue;
      for (double c : linspace(0.0, bahadur_range(n, e).hi, 11)) {
        const double gap = exchangeable_tail(n, m, e, c) - kz_bound(n, m, e, c);
        ++kz_checks;
        if (gap <= 1e-12) continue;
        ++kz_violations;
        if (gap > worst) {
          worst = gap;
          char buf[160];
          std::snprintf(buf, sizeof buf, "n=%zu m=%zu e=%.4g c=%.4g: tail %.4g > kz %.4g", n, m, e, c, exchangeable_tail(n, m, e, c),
                        kz_bound(n, m, e, c));
          first = buf;
        }
      }
    }
  }
  std::string detail = "feller/chernoff " + std::to_string(checks) + " inequalities, " + std::to_string(violations) +
                       " violations; kz " + std::to_string(kz_checks) + " inequalities, " + std::to_string(kz_violations) +
                       " violations";
  if (kz_violations) detail += " (worst " + first + ")";
  return {violations == 0 && kz_violations == 0, detail};
}

Outcome monotonicity() {
  std::size_t checks = 0, violations = 0;
  for (std::size_t n = 3; n <= 26; ++n)
    for (std::size_t m = 1; m <= n; ++m) {
      const double pivot = (static_cast<double>(m) - 1.0) / (static_cast<double>(n) - 1.0);
      for (double e : linspace(0.0, 1.0, 51)) {
        const Interval fi = pair_f_interval(e);
        double prev = pair_correlated_tail(n, m, e, fi.lo);
        for (double f : linspace(fi.lo, fi.hi, 21)) {
          const double cur = pair_correlated_tail(n, m, e, f);
          if (e <= pivot) violations += cur < prev - 1e-12;
          if (e >= pivot) violations += cur > prev + 1e-12;
          prev = cur;
          ++checks;
        }
      }
    }
  for (double r : linspace(0.02, 0.98, 49)) {
    double prev = 0.0;
    for (double e : linspace(0.0, r, 500)) {
      if (e >= r) break;
      const double cur = chernoff_lambda(r, e);
      violations += cur < prev - 1e-12;
      prev = cur;
      ++checks;
    }
  }
  return {violations == 0, std::to_string(checks) + " grid steps, " + std::to_string(violations) + " violations"};
}

Outcome code_ratios() {
  const CodeMatrix a = build_code_matrix(10), b = build_code_matrix(26);
  const bool ok = a.m() == 2 && a.n() == 10 && b.m() == 6 && b.n() == 26;
  return {ok, "default orientation keeps the bottom-right block: n=10 -> m=" + std::to_string(a.m()) + ", n=26 -> m=" +
                  std::to_string(b.m())};
}

Outcome summary_rows() {
  Outcome out;
  std::ostringstream detail;
  const std::filesystem::path dir(ECOC_FIXTURE_DIR);
  for (const auto& row : test::published_rows()) {
    const DatasetInfo& d = *find_dataset(row.dataset);
    const SummaryTable table = load_summary(dir / d.file);
    const auto folds = to_fold_summaries(table, std::string(row.model));
    const double tol = (row.dataset == "pendigits" || row.dataset == "vowel") ? 0.02 : 0.01;

    std::size_t best_n = 0;
    double best_gap = 1e9;
    AggregateReport best;
    for (std::size_t n : d.evaluation_sizes) {
      const std::size_t m = build_code_matrix(n).m();
      AggregateReport rep = aggregate(make_fold_reports(folds, n, m), n, m);
      const double gap = std::max(std::abs(rep.chernoff.mean - row.chernoff), std::abs(rep.kz.mean - row.kz));
      if (gap < best_gap) {
        best_gap = gap;
        best_n = n;
        best = std::move(rep);
      }
    }
    const bool gs_ok = std::abs(best.gs.mean - row.gs) <= 0.005;
    const bool bounds_ok = best_gap <= tol;

    // experimental column: fold values pass through as text; published mean is their average
    bool text_ok = folds.size() == 10;
    std::istringstream csv_in(report_csv(best));
    std::string line;
    std::getline(csv_in, line);
    std::size_t i = 0;
    while (std::getline(csv_in, line)) {
      const auto cells = csv::split(line);
      text_ok = text_ok && i < best.folds.size() && cells[3] == best.folds[i].summary.ecoc_error_text;
      ++i;
    }
    std::size_t matched = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r)
      if (table.cell(r, "model") == row.model)
        for (const auto& f : best.folds)
          if (f.summary.fold_id == table.cell(r, "fold") && f.summary.ecoc_error_text == table.cell(r, "ecoc_error")) ++matched;
    text_ok = text_ok && matched == 10;
    char mean_text[16], std_text[16];
    std::snprintf(mean_text, sizeof mean_text, "%.3f", best.experimental.mean);
    std::snprintf(std_text, sizeof std_text, "%.4f", best.experimental.std);
    const bool exp_ok = text_ok && row.experimental == mean_text;

    const bool ok = gs_ok && bounds_ok && exp_ok;
    out.pass = out.pass && ok;
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "\n    %-4s %-9s %-3s n=%-2zu exp %s (pub %s, std %s/%s) gs %.4f/%.3f chernoff %.4f/%.3f kz %.4f/%.3f tol %.2f",
                  ok ? "ok" : "BAD", std::string(row.dataset).c_str(), std::string(row.model).c_str(), best_n, mean_text,
                  std::string(row.experimental).c_str(), std_text, std::string(row.experimental_std).c_str(), best.gs.mean, row.gs,
                  best.chernoff.mean, row.chernoff, best.kz.mean, row.kz, tol);
    detail << buf;
  }
  out.detail = "10 dataset/model rows" + detail.str();
  return out;
}

Outcome monte_carlo() {
  std::mt19937_64 gen(2021);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<std::size_t> sizes = {6, 8, 10, 11, 12, 16, 20, 26};
  SimConfig cfg;
  cfg.trials = 1000000;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  std::size_t bad_tail = 0, bad_order = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t classes = sizes[gen() % sizes.size()];
    const CodeMatrix code = build_code_matrix(classes);
    const double e = 0.03 + 0.25 * u(gen);
    DependenceModel model = ErrorProfile::iid(classes, e);
    switch (i % 3) {
      case 0: {
        std::vector<double> r(classes);
        for (double& x : r) x = 0.02 + 0.3 * u(gen);
        model = ErrorProfile(r);
        break;
      }
      case 1: {
        std::vector<double> r(classes, e);
        for (std::size_t j = 0; j + 2 < classes; ++j) r[j] = 0.02 + 0.3 * u(gen);
        const Interval fi = pair_f_interval(e);
        model = PairModel(ErrorProfile(r), fi.lo + (fi.hi - fi.lo) * u(gen));
        break;
      }
      default: {
        const Interval b = bahadur_range(classes, e);
        model = ExchangeableModel(classes, e, b.lo + (b.hi - b.lo) * u(gen));
      }
    }
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    const double exact = error_tail(model, code.m());
    const SimResult t = mc_threshold_error(model, code.m(), cfg);
    const SimResult d = mc_decode_error(model, code, std::nullopt, cfg);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(cfg.trials));
    const double z = se > 0 ? std::abs(t.error_rate - exact) / se : 0.0;
    worst_z = std::max(worst_z, z);
    bad_tail += z > 3.0;
    bad_order += d.error_rate > t.error_rate + 3.0 * std::hypot(t.std_err, d.std_err);
  }
  return {bad_tail == 0 && bad_order == 0, "20 configurations x 1e6 trials, worst |z| " + fmt("%.2f", worst_z) + ", " +
                                               std::to_string(bad_tail) + " tail misses, " + std::to_string(bad_order) +
                                               " ordering misses"};
}

Outcome figure1() {
  const std::vector<std::size_t> ns = {10, 20, 50};
  const auto pts = gs_vs_chernoff_curves(ns, 0.25, 0.001);
  bool ok = true;
  std::string detail;
  for (std::size_t n : ns) {
    std::vector<GsChernoffPoint> curve;
    for (const auto& p : pts)
      if (p.n == n) curve.push_back(p);
    const std::size_t changes = crossing_count(curve);
    ok = ok && changes == 1;
    detail += "n=" + std::to_string(n) + ": " + std::to_string(changes) + " sign change(s); ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence, independent", oracle_independent},
      {2, "oracle equivalence, pair model", oracle_pair},
      {3, "oracle equivalence, exchangeable", oracle_exchangeable},
      {4, "bound dominance", dominance},
      {5, "monotonicity", monotonicity},
      {6, "code ratios m/n = 2/10 and 6/26", code_ratios},
      {7, "cross-validation summary from fixtures", summary_rows},
      {8, "Monte Carlo consistency", monte_carlo},
      {9, "GS vs Chernoff single crossing", figure1},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  criterion %d: %s (%.2fs) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
