#ifndef ECOC_TOOLS_ECOC_CLI_HPP
#define ECOC_TOOLS_ECOC_CLI_HPP

// `ecoc` command-line front end. run() is kept separate from main() so the test suite
// can drive it in-process.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "ecoc/ecoc.hpp"

namespace ecoc::cli {

inline constexpr std::uint64_t kDefaultSeed = 20211101;

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

/// A cell is text or a number; numbers are printed with 6 significant digits in tables
/// and exactly (shortest round-trip form) in CSV and JSON.
using Cell = std::variant<std::string, double, long long>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

namespace detail {

inline std::string cell_text(const Cell& c, bool exact) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const double v = std::get<double>(c);
  if (exact) return format_double(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline nlohmann::json cell_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return s->empty() ? nlohmann::json(nullptr) : nlohmann::json(*s);
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<double>(c);
}

inline Cell opt_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(std::string()); }

}  // namespace detail

inline std::string render(const Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << detail::cell_text(r[i], true);
      os << '\n';
    }
  } else if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : t.rows) {
      nlohmann::json obj;
      for (std::size_t i = 0; i < r.size(); ++i) obj[t.columns[i]] = detail::cell_json(r[i]);
      arr.push_back(obj);
    }
    os << (arr.size() == 1 ? arr[0] : arr).dump(2) << '\n';
  } else {
    std::vector<std::size_t> width(t.columns.size());
    std::vector<std::vector<std::string>> text;
    for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
    for (const auto& r : t.rows) {
      text.emplace_back();
      for (std::size_t i = 0; i < r.size(); ++i) {
        text.back().push_back(detail::cell_text(r[i], false));
        if (text.back().back().empty()) text.back().back() = "-";
        width[i] = std::max(width[i], text.back().back().size());
      }
    }
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        os << (i ? "  " : "") << cells[i];
        if (i + 1 < cells.size()) os << std::string(width[i] - cells[i].size(), ' ');
      }
      os << '\n';
    };
    line(t.columns);
    for (const auto& r : text) line(r);
  }
  return os.str();
}

struct ModelFlags {
  std::string kind = "iid";
  std::size_t n = 0;
  double e_bar = -1.0;
  std::vector<double> rates;
  std::optional<double> f;
  std::optional<double> c;

  void add(CLI::App* cmd) {
    cmd->add_option("--model", kind, "Dependence model")
        ->check(CLI::IsMember({"iid", "independent", "pair", "exchangeable"}))
        ->capture_default_str();
    cmd->add_option("--n", n, "Number of binary classifiers");
    cmd->add_option("--ebar", e_bar, "Common (mean) bit error rate");
    cmd->add_option("--rates", rates, "Per-classifier error rates, comma separated")->delimiter(',');
    cmd->add_option("--f", f, "Joint error probability of the last two classifiers (pair model)");
    cmd->add_option("--c", c, "Pairwise correlation (exchangeable model)");
  }

  ErrorProfile profile() const {
    if (!rates.empty()) return ErrorProfile(rates);
    if (n == 0 || e_bar < 0.0) throw CLI::ValidationError("model", "give --rates, or --n with --ebar");
    return ErrorProfile::iid(n, e_bar);
  }

  bool homogeneous() const { return rates.empty(); }

  DependenceModel build() const {
    if (kind == "iid" || kind == "independent") return profile();
    if (kind == "pair") {
      if (!f) throw CLI::ValidationError("--f", "pair model needs --f");
      return PairModel(profile(), *f);
    }
    if (!c) throw CLI::ValidationError("--c", "exchangeable model needs --c");
    if (n == 0 || e_bar < 0.0) throw CLI::ValidationError("model", "exchangeable model needs --n and --ebar");
    return ExchangeableModel(n, e_bar, *c);
  }
};

inline Table bounds_table(const BoundReport& b, std::size_t n, std::size_t m, double e_bar, std::optional<double> c) {
  Table t;
  t.columns = {"n", "m", "e_bar", "c", "gs", "feller", "chernoff_mu", "chernoff", "kz", "lambda", "omega", "kz_note"};
  t.rows.push_back({static_cast<long long>(n), static_cast<long long>(m), e_bar, detail::opt_cell(c), b.gs,
                    detail::opt_cell(b.feller), detail::opt_cell(b.chernoff_mu), b.chernoff_lambda, detail::opt_cell(b.kz),
                    b.lambda, b.omega, b.kz ? std::string() : b.kz_reason});
  return t;
}

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("ECOC_SEED")) {
    if (auto v = csv::parse_count(env)) return *v;
  }
  return kDefaultSeed;
}

inline Orientation parse_orientation(const std::string& s) {
  return s == "top-left" ? Orientation::keep_top_left : Orientation::keep_bottom_right;
}

/// Runs one command line. Output is buffered and only written (to `out` or --out) on success.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ECOC classification error: exact tails, bounds, simulation and experiment reports", "ecoc"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "table";
  std::string out_path;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}))->capture_default_str();
  app.add_option("--out", out_path, "Write output to this file instead of stdout");

  // code
  auto* code_cmd = app.add_subcommand("code", "Build a truncated Hadamard code matrix");
  std::size_t classes = 0;
  std::string orientation = "bottom-right";
  bool emit = false;
  code_cmd->add_option("--classes", classes, "Number of classes")->required();
  code_cmd->add_option("--orientation", orientation, "Block of the Hadamard matrix kept")
      ->check(CLI::IsMember({"bottom-right", "top-left"}))
      ->capture_default_str();
  code_cmd->add_flag("--emit", emit, "Print the matrix in its plain-text form");

  // pmf / tail
  ModelFlags pmf_model, tail_model, sim_model;
  std::optional<std::size_t> pmf_k;
  auto* pmf_cmd = app.add_subcommand("pmf", "Distribution of the number of erring classifiers");
  pmf_model.add(pmf_cmd);
  pmf_cmd->add_option("--k", pmf_k, "Single error count (default: all)");

  auto* tail_cmd = app.add_subcommand("tail", "P(at least m classifiers err)");
  std::size_t tail_m = 0;
  tail_model.add(tail_cmd);
  tail_cmd->add_option("--m", tail_m, "Error threshold")->required();

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "GS, Feller, Chernoff and KZ bounds");
  std::size_t b_n = 0, b_m = 0, b_classes = 0;
  double b_ebar = -1.0;
  std::optional<double> b_c, b_mu;
  bounds_cmd->add_option("--n", b_n, "Codeword length");
  bounds_cmd->add_option("--m", b_m, "Half the minimum row distance");
  bounds_cmd->add_option("--classes", b_classes, "Take n and m from the default code for this many classes");
  bounds_cmd->add_option("--ebar", b_ebar, "Mean bit error rate")->required();
  bounds_cmd->add_option("--c", b_c, "Mean pairwise correlation (enables KZ)");
  bounds_cmd->add_option("--mu", b_mu, "Sum of per-classifier error rates (default n*ebar)");

  // bahadur
  auto* bahadur_cmd = app.add_subcommand("bahadur", "Valid correlation range of the exchangeable model");
  std::size_t bh_n = 0;
  double bh_ebar = 0.0;
  bahadur_cmd->add_option("--n", bh_n, "Number of classifiers")->required();
  bahadur_cmd->add_option("--ebar", bh_ebar, "Common error rate")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of the ECOC error");
  sim_model.add(sim_cmd);
  std::string sim_mode = "threshold";
  std::size_t sim_m = 0, sim_classes = 0, sim_trials = 100000, sim_workers = 1, sim_samples = 0;
  std::optional<std::size_t> sim_true_class;
  std::optional<std::uint64_t> sim_seed;
  bool sim_fast = false;
  std::string emit_fold;
  sim_cmd->add_option("--mode", sim_mode, "threshold or decode")->check(CLI::IsMember({"threshold", "decode"}))->capture_default_str();
  sim_cmd->add_option("--m", sim_m, "Error threshold (threshold mode; default: code m)");
  sim_cmd->add_option("--classes", sim_classes, "Classes of the code used for decoding");
  sim_cmd->add_option("--trials", sim_trials, "Number of trials")->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed (default: ECOC_SEED or 20211101)");
  sim_cmd->add_option("--workers", sim_workers, "Worker threads")->capture_default_str();
  sim_cmd->add_flag("--fast", sim_fast, "One RNG stream per worker instead of per trial");
  sim_cmd->add_option("--true-class", sim_true_class, "Fix the true class instead of drawing it uniformly");
  sim_cmd->add_option("--emit-fold", emit_fold, "Write a synthetic predictions CSV instead of simulating");
  sim_cmd->add_option("--samples", sim_samples, "Samples in the synthetic fold");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Per-fold metrics, bounds and their aggregate");
  std::string summary_path, a_model, a_std = "population", a_avg = "per-fold", a_tie = "lowest-index";
  std::vector<std::string> prediction_paths;
  std::size_t a_classes = 0;
  analyze_cmd->add_option("--summary", summary_path, "Summary CSV (fold,mean_bit_error,mean_correlation,ecoc_error,...)");
  analyze_cmd->add_option("--predictions", prediction_paths, "Raw predictions CSV, one per fold");
  analyze_cmd->add_option("--model", a_model, "Restrict a summary file to one model column value");
  analyze_cmd->add_option("--classes", a_classes, "Classes (= codeword length) of the code")->required();
  analyze_cmd->add_option("--std", a_std, "population or sample")->check(CLI::IsMember({"population", "sample"}))->capture_default_str();
  analyze_cmd->add_option("--averaging", a_avg, "per-fold or pooled")->check(CLI::IsMember({"per-fold", "pooled"}))->capture_default_str();
  analyze_cmd->add_option("--tie", a_tie, "lowest-index or report-tie")
      ->check(CLI::IsMember({"lowest-index", "report-tie"}))
      ->capture_default_str();
  auto* analyze_group = analyze_cmd->add_option_group("input");
  analyze_group->add_option(analyze_cmd->get_option("--summary"));
  analyze_group->add_option(analyze_cmd->get_option("--predictions"));
  analyze_group->require_option(1);

  // figures
  auto* fig_cmd = app.add_subcommand("figures", "Emit plot data as CSV");
  std::string fig_kind;
  std::vector<std::size_t> fig_ns = {10, 20, 50};
  double fig_r = 0.25, fig_step = 0.001;
  std::string fig_summary, fig_model;
  std::size_t fig_classes = 0;
  fig_cmd->add_option("kind", fig_kind, "fig1 or scatter")->required()->check(CLI::IsMember({"fig1", "scatter"}));
  fig_cmd->add_option("--n", fig_ns, "Codeword lengths (fig1)")->delimiter(',');
  fig_cmd->add_option("--r", fig_r, "Ratio m/n (fig1)")->capture_default_str();
  fig_cmd->add_option("--step", fig_step, "Grid step in mean bit error (fig1)")->capture_default_str();
  fig_cmd->add_option("--summary", fig_summary, "Summary CSV (scatter)");
  fig_cmd->add_option("--model", fig_model, "Model column value (scatter)");
  fig_cmd->add_option("--classes", fig_classes, "Classes of the code (scatter)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  std::string result;
  try {
    if (code_cmd->parsed()) {
      const CodeMatrix code = build_code_matrix(classes, parse_orientation(orientation));
      if (emit) {
        result = to_text(code);
      } else {
        Table t{{"classes", "n", "d", "m", "r"},
                {{static_cast<long long>(code.classes()), static_cast<long long>(code.n()), static_cast<long long>(code.d()),
                  static_cast<long long>(code.m()), code.r()}}};
        result = render(t, format);
      }
    } else if (pmf_cmd->parsed()) {
      const DependenceModel model = pmf_model.build();
      const std::vector<double> dist = error_count_distribution(model);
      Table t{{"k", "probability"}, {}};
      for (std::size_t k = 0; k < dist.size(); ++k) {
        if (pmf_k && k != *pmf_k) continue;
        t.rows.push_back({static_cast<long long>(k), dist[k]});
      }
      if (pmf_k && *pmf_k >= dist.size()) throw ArgumentError("--k exceeds n");
      result = render(t, format);
    } else if (tail_cmd->parsed()) {
      double value = 0.0;
      if (tail_model.kind == "iid") {
        const ErrorProfile p = tail_model.profile();
        value = tail_model.homogeneous() ? tail_iid(p.size(), tail_m, p[0]) : tail_independent(p, tail_m);
      } else if (tail_model.kind == "pair" && tail_model.homogeneous()) {
        if (!tail_model.f) throw CLI::ValidationError("--f", "pair model needs --f");
        value = pair_correlated_tail(tail_model.n, tail_m, tail_model.e_bar, *tail_model.f);
      } else {
        value = error_tail(tail_model.build(), tail_m);
      }
      result = render(Table{{"m", "tail"}, {{static_cast<long long>(tail_m), value}}}, format);
    } else if (bounds_cmd->parsed()) {
      if (b_classes) {
        const CodeMatrix code = build_code_matrix(b_classes);
        b_n = code.n();
        b_m = code.m();
      }
      if (!b_n || !b_m) throw CLI::ValidationError("bounds", "give --n and --m, or --classes");
      BoundInputs in{b_n, b_m, b_ebar, b_c, b_mu};
      result = render(bounds_table(evaluate_bounds(in), b_n, b_m, b_ebar, b_c), format);
    } else if (bahadur_cmd->parsed()) {
      const Interval r = bahadur_range(bh_n, bh_ebar);
      result = render(Table{{"n", "e_bar", "c_min", "c_max"}, {{static_cast<long long>(bh_n), bh_ebar, r.lo, r.hi}}}, format);
    } else if (sim_cmd->parsed()) {
      const DependenceModel model = sim_model.build();
      SimConfig cfg;
      cfg.trials = sim_trials;
      cfg.seed = sim_seed.value_or(default_seed());
      cfg.workers = sim_workers;
      cfg.strict = !sim_fast;
      if (!emit_fold.empty()) {
        if (!sim_classes || !sim_samples) throw CLI::ValidationError("--emit-fold", "needs --classes and --samples");
        const FoldData fold = synthesize_fold(model, build_code_matrix(sim_classes), sim_samples, cfg.seed);
        std::ofstream f(emit_fold, std::ios::binary);
        if (!f) throw Error("cannot write " + emit_fold);
        f << write_predictions(fold);
        result = render(Table{{"path", "samples"}, {{emit_fold, static_cast<long long>(sim_samples)}}}, format);
      } else {
        std::optional<CodeMatrix> code;
        if (sim_classes) code = build_code_matrix(sim_classes);
        SimResult res;
        std::size_t m = sim_m;
        if (sim_mode == "decode") {
          if (!code) throw CLI::ValidationError("--classes", "decode mode needs --classes");
          cfg.mode = SimMode::full_decode;
          res = mc_decode_error(model, *code, sim_true_class, cfg);
          m = code->m();
        } else {
          if (!m && code) m = code->m();
          if (!m) throw CLI::ValidationError("--m", "threshold mode needs --m or --classes");
          res = mc_threshold_error(model, m, cfg);
        }
        const double exact = error_tail(model, m);
        result = render(Table{{"mode", "m", "trials", "seed", "error_rate", "std_err", "exact_tail"},
                              {{sim_mode, static_cast<long long>(m), static_cast<long long>(res.trials),
                                static_cast<long long>(cfg.seed), res.error_rate, res.std_err, exact}}},
                        format);
      }
    } else if (analyze_cmd->parsed()) {
      const CodeMatrix code = build_code_matrix(a_classes);
      std::vector<FoldSummary> summaries;
      if (!summary_path.empty()) {
        summaries = to_fold_summaries(load_summary(summary_path), a_model.empty() ? std::nullopt : std::optional(a_model));
      } else {
        const TiePolicy tie = a_tie == "report-tie" ? TiePolicy::report_tie : TiePolicy::lowest_index;
        for (const auto& p : prediction_paths) summaries.push_back(analyze_fold(load_predictions(p, code.classes()), code, tie));
      }
      if (summaries.empty()) throw ArgumentError("analyze: no folds selected");
      AggregateOptions opts;
      opts.std_convention = a_std == "sample" ? StdConvention::sample : StdConvention::population;
      opts.averaging = a_avg == "pooled" ? BoundAveraging::pooled : BoundAveraging::per_fold;
      const AggregateReport rep = aggregate(make_fold_reports(summaries, code.n(), code.m()), code.n(), code.m(), opts);
      if (format == "json") {
        result = report_json(rep).dump(2) + "\n";
      } else if (format == "csv") {
        result = report_csv(rep);
      } else {
        Table t{{"fold", "mean_bit_error", "mean_correlation", "experimental", "gs", "chernoff", "kz"}, {}};
        for (const auto& f : rep.folds)
          t.rows.push_back({f.summary.fold_id, f.summary.mean_bit_error, f.summary.mean_correlation, f.summary.ecoc_error,
                            f.bounds.gs, f.bounds.chernoff_lambda, detail::opt_cell(f.bounds.kz_formula)});
        t.rows.push_back({std::string("mean"), rep.mean_bit_error.mean, rep.mean_correlation.mean, rep.experimental.mean,
                          rep.gs.mean, rep.chernoff.mean, rep.kz.mean});
        t.rows.push_back({std::string("std"), rep.mean_bit_error.std, rep.mean_correlation.std, rep.experimental.std, rep.gs.std,
                          rep.chernoff.std, rep.kz.std});
        result = render(t, format);
      }
    } else if (fig_cmd->parsed()) {
      if (fig_kind == "fig1") {
        result = gs_vs_chernoff_csv(gs_vs_chernoff_curves(fig_ns, fig_r, fig_step));
      } else {
        if (fig_summary.empty() || !fig_classes) throw CLI::ValidationError("scatter", "needs --summary and --classes");
        const CodeMatrix code = build_code_matrix(fig_classes);
        auto summaries = to_fold_summaries(load_summary(fig_summary), fig_model.empty() ? std::nullopt : std::optional(fig_model));
        if (summaries.empty()) throw ArgumentError("scatter: no folds selected");
        result = scatter_csv(aggregate(make_fold_reports(summaries, code.n(), code.m()), code.n(), code.m()));
      }
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }

  if (out_path.empty()) {
    out << result;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << out_path << '\n';
      return kDomainError;
    }
    f << result;
  }
  return kOk;
}

}  // namespace ecoc::cli

#endif  // ECOC_TOOLS_ECOC_CLI_HPP
