#ifndef ECOC_EXPERIMENT_IO_HPP
#define ECOC_EXPERIMENT_IO_HPP

// Fold-level experiment data and its cross-validation aggregate.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecoc/bounds.hpp"
#include "ecoc/code_matrix.hpp"
#include "ecoc/error.hpp"
#include "ecoc/prob_engine.hpp"
#include "ecoc/simulator.hpp"

namespace ecoc {

/// Shortest text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace csv {

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::size_t> parse_count(std::string_view s) {
  std::size_t v = 0;
  if (s.empty()) return std::nullopt;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Lines of a text stream with CR stripped; remembers the line ending style.
struct Lines {
  std::vector<std::string> lines;
  bool crlf = false;
  bool trailing_newline = true;
};

inline Lines read_lines(std::istream& in) {
  Lines out;
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  out.trailing_newline = all.empty() || all.back() == '\n';
  std::size_t start = 0;
  bool first = true;
  while (start < all.size()) {
    std::size_t nl = all.find('\n', start);
    std::string line = all.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
      if (first) out.crlf = true;
    }
    first = false;
    out.lines.push_back(std::move(line));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return out;
}

inline std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace csv

struct PredictionRecord {
  std::size_t true_class = 0;
  BitVector bits;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// One cross-validation fold of raw predictions: the true class and the n predicted bits per sample.
struct FoldData {
  std::string fold_id;
  std::size_t n = 0;
  std::vector<PredictionRecord> records;
  std::vector<std::string> warnings;
};

/// Parses the `true_class,bit_1,...,bit_n` schema. When `num_classes` is given, class labels are range-checked.
inline FoldData parse_predictions(std::istream& in, const std::string& source, std::optional<std::size_t> num_classes = {},
                                  std::string fold_id = {}) {
  const auto text = csv::read_lines(in);
  if (text.lines.empty() || text.lines.front().empty()) throw ParseError(source, 1, "missing header");
  const auto header = csv::split(text.lines.front());
  if (header.front() != "true_class" || header.size() < 2)
    throw ParseError(source, 1, "header must be true_class,bit_1,...,bit_n");
  for (std::size_t i = 1; i < header.size(); ++i)
    if (header[i] != "bit_" + std::to_string(i)) throw ParseError(source, 1, "expected column bit_" + std::to_string(i));

  FoldData data;
  data.fold_id = std::move(fold_id);
  data.n = header.size() - 1;
  for (std::size_t li = 1; li < text.lines.size(); ++li) {
    const std::string& line = text.lines[li];
    if (line.empty() && li + 1 == text.lines.size()) break;
    const auto cells = csv::split(line);
    if (cells.size() != data.n + 1)
      throw ParseError(source, li + 1, "expected " + std::to_string(data.n + 1) + " fields, got " + std::to_string(cells.size()));
    PredictionRecord rec;
    auto cls = csv::parse_count(cells[0]);
    if (!cls) throw ParseError(source, li + 1, "true_class is not a non-negative integer");
    if (num_classes && *cls >= *num_classes)
      throw ParseError(source, li + 1, "class " + std::to_string(*cls) + " out of range");
    rec.true_class = *cls;
    rec.bits.reserve(data.n);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i] != "0" && cells[i] != "1") throw ParseError(source, li + 1, "bit_" + std::to_string(i) + " must be 0 or 1");
      rec.bits.push_back(cells[i] == "1" ? 1 : 0);
    }
    data.records.push_back(std::move(rec));
  }
  if (data.records.empty()) data.warnings.push_back(source + ": no data rows");
  return data;
}

inline FoldData load_predictions(const std::filesystem::path& path, std::optional<std::size_t> num_classes = {}) {
  auto in = csv::open(path);
  return parse_predictions(in, path.string(), num_classes, path.stem().string());
}

inline std::string write_predictions(const FoldData& data) {
  std::ostringstream os;
  os << "true_class";
  for (std::size_t i = 1; i <= data.n; ++i) os << ",bit_" << i;
  os << '\n';
  for (const auto& rec : data.records) {
    os << rec.true_class;
    for (Bit b : rec.bits) os << ',' << static_cast<char>('0' + b);
    os << '\n';
  }
  return os.str();
}

/// Raw predictions for `samples` uniformly drawn classes whose codewords are corrupted by
/// error vectors from `model`.
inline FoldData synthesize_fold(const DependenceModel& model, const CodeMatrix& code, std::size_t samples,
                                std::uint64_t seed, std::string fold_id = "synthetic") {
  const OutcomeSampler sampler(model);
  if (sampler.size() != code.n()) throw ArgumentError("synthesize_fold: model size differs from code length");
  FoldData data;
  data.fold_id = std::move(fold_id);
  data.n = code.n();
  data.records.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, s);
    PredictionRecord rec;
    sampler.sample(rng, rec.bits);
    rec.true_class = static_cast<std::size_t>(rng.below(code.classes()));
    const auto word = code.codeword(rec.true_class);
    for (std::size_t i = 0; i < rec.bits.size(); ++i) rec.bits[i] ^= word[i];
    data.records.push_back(std::move(rec));
  }
  return data;
}

/// Per-fold metrics.
struct FoldSummary {
  std::string fold_id;
  std::string model;
  double mean_bit_error = 0.0;
  std::vector<double> per_classifier_errors;
  double mean_correlation = 0.0;
  /// Classifier pairs that entered the correlation mean; pairs with e_i in {0,1} are skipped.
  std::size_t correlation_pairs = 0;
  /// No pair had a defined correlation; mean_correlation was set to 0.
  bool correlation_undefined = false;
  double ecoc_error = 0.0;
  /// Original text of ecoc_error when it was read from a summary file.
  std::string ecoc_error_text;
};

inline FoldSummary analyze_fold(const FoldData& data, const CodeMatrix& code, TiePolicy tie_policy = TiePolicy::lowest_index) {
  if (data.n != code.n())
    throw ArgumentError("analyze_fold: fold has " + std::to_string(data.n) + " classifiers, code has " + std::to_string(code.n()));
  if (data.records.empty()) throw ArgumentError("analyze_fold: fold " + data.fold_id + " has no samples");
  const std::size_t n = data.n;
  const double samples = static_cast<double>(data.records.size());

  std::vector<std::size_t> err_count(n, 0);
  std::vector<std::size_t> joint(n * n, 0);
  std::size_t misclassified = 0;
  BitVector wrong(n);
  for (const auto& rec : data.records) {
    if (rec.true_class >= code.classes()) throw ArgumentError("analyze_fold: class label out of range");
    if (rec.bits.size() != n) throw ArgumentError("analyze_fold: record length mismatch");
    const auto word = code.codeword(rec.true_class);
    for (std::size_t i = 0; i < n; ++i) wrong[i] = rec.bits[i] != word[i];
    for (std::size_t i = 0; i < n; ++i) {
      if (!wrong[i]) continue;
      ++err_count[i];
      for (std::size_t j = i + 1; j < n; ++j) joint[i * n + j] += wrong[j];
    }
    const DecodeResult d = decode(rec.bits, code, tie_policy);
    misclassified += (d.index != rec.true_class || d.tie) ? 1 : 0;
  }

  FoldSummary out;
  out.fold_id = data.fold_id;
  out.per_classifier_errors.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.per_classifier_errors[i] = static_cast<double>(err_count[i]) / samples;
  out.mean_bit_error = ErrorProfile(out.per_classifier_errors).mean();

  double corr_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ei = out.per_classifier_errors[i];
    if (ei <= 0.0 || ei >= 1.0) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ej = out.per_classifier_errors[j];
      if (ej <= 0.0 || ej >= 1.0) continue;
      const double fij = static_cast<double>(joint[i * n + j]) / samples;
      corr_sum += (fij - ei * ej) / std::sqrt(ei * (1.0 - ei) * ej * (1.0 - ej));
      ++out.correlation_pairs;
    }
  }
  out.correlation_undefined = out.correlation_pairs == 0;
  out.mean_correlation = out.correlation_undefined ? 0.0 : corr_sum / static_cast<double>(out.correlation_pairs);
  out.ecoc_error = static_cast<double>(misclassified) / samples;
  return out;
}

/// Summary CSV: required columns fold, mean_bit_error, mean_correlation, ecoc_error; any other
/// columns (model, *_std, ...) are carried verbatim. Rows keep their original text so a
/// load/write cycle is byte-exact.
class SummaryTable {
 public:
  static constexpr const char* kRequired[] = {"fold", "mean_bit_error", "mean_correlation", "ecoc_error"};

  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool crlf = false;
  bool trailing_newline = true;

  std::optional<std::size_t> column(std::string_view name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns.begin());
  }

  const std::string& cell(std::size_t row, std::string_view name) const {
    auto idx = column(name);
    if (!idx) throw ArgumentError("SummaryTable: no column " + std::string(name));
    return rows.at(row).at(*idx);
  }

  /// Distinct values of the `model` column in first-appearance order (empty when absent).
  std::vector<std::string> models() const {
    std::vector<std::string> out;
    auto idx = column("model");
    if (!idx) return out;
    for (const auto& r : rows)
      if (std::find(out.begin(), out.end(), r[*idx]) == out.end()) out.push_back(r[*idx]);
    return out;
  }
};

inline SummaryTable parse_summary(std::istream& in, const std::string& source) {
  auto text = csv::read_lines(in);
  if (text.lines.empty() || text.lines.front().empty()) throw ParseError(source, 1, "missing header");
  SummaryTable table;
  table.crlf = text.crlf;
  table.trailing_newline = text.trailing_newline;
  table.columns = csv::split(text.lines.front());
  for (const char* req : SummaryTable::kRequired)
    if (!table.column(req)) throw ParseError(source, 1, std::string("missing column ") + req);
  const std::size_t last = text.trailing_newline && text.lines.size() > 1 && text.lines.back().empty() ? text.lines.size() - 1
                                                                                                         : text.lines.size();
  for (std::size_t li = 1; li < last; ++li) {
    auto cells = csv::split(text.lines[li]);
    if (cells.size() != table.columns.size())
      throw ParseError(source, li + 1,
                       "expected " + std::to_string(table.columns.size()) + " fields, got " + std::to_string(cells.size()));
    for (const char* name : {"mean_bit_error", "mean_correlation", "ecoc_error"}) {
      auto v = csv::parse_double(cells[*table.column(name)]);
      if (!v) throw ParseError(source, li + 1, std::string(name) + " is not a number");
      if (std::string_view(name) != "mean_correlation" && (*v < 0.0 || *v > 1.0))
        throw ParseError(source, li + 1, std::string(name) + " outside [0,1]");
      if (std::string_view(name) == "mean_correlation" && (*v < -1.0 || *v > 1.0))
        throw ParseError(source, li + 1, "mean_correlation outside [-1,1]");
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

inline SummaryTable load_summary(const std::filesystem::path& path) {
  auto in = csv::open(path);
  return parse_summary(in, path.string());
}

inline std::string write_summary(const SummaryTable& table) {
  const char* eol = table.crlf ? "\r\n" : "\n";
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells, bool last) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    if (!last || table.trailing_newline) out += eol;
  };
  emit(table.columns, table.rows.empty());
  for (std::size_t r = 0; r < table.rows.size(); ++r) emit(table.rows[r], r + 1 == table.rows.size());
  return out;
}

/// Rows of the table (optionally restricted to one model) as fold summaries.
inline std::vector<FoldSummary> to_fold_summaries(const SummaryTable& table, std::optional<std::string> model = {}) {
  std::vector<FoldSummary> out;
  const auto model_col = table.column("model");
  if (model && !model_col && !model->empty()) throw ArgumentError("summary has no model column");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    FoldSummary s;
    if (model_col) s.model = table.rows[r][*model_col];
    if (model && !model->empty() && s.model != *model) continue;
    s.fold_id = table.cell(r, "fold");
    s.mean_bit_error = *csv::parse_double(table.cell(r, "mean_bit_error"));
    s.mean_correlation = *csv::parse_double(table.cell(r, "mean_correlation"));
    s.ecoc_error_text = table.cell(r, "ecoc_error");
    s.ecoc_error = *csv::parse_double(s.ecoc_error_text);
    out.push_back(std::move(s));
  }
  return out;
}

/// Bounds for one fold; KZ takes the fold's own mean correlation.
inline BoundReport bound_report(const FoldSummary& summary, std::size_t n, std::size_t m) {
  BoundInputs in;
  in.n = n;
  in.m = m;
  in.e_bar = summary.mean_bit_error;
  in.c = summary.mean_correlation;
  if (!summary.per_classifier_errors.empty()) in.mu = ErrorProfile(summary.per_classifier_errors).sum();
  return evaluate_bounds(in);
}

inline BoundReport bound_report(const FoldSummary& summary, const CodeMatrix& code) {
  return bound_report(summary, code.n(), code.m());
}

struct FoldReport {
  FoldSummary summary;
  BoundReport bounds;
};

inline std::vector<FoldReport> make_fold_reports(std::span<const FoldSummary> summaries, std::size_t n, std::size_t m) {
  std::vector<FoldReport> out;
  out.reserve(summaries.size());
  for (const auto& s : summaries) out.push_back({s, bound_report(s, n, m)});
  return out;
}

struct ColumnStats {
  double mean = 0.0;
  double std = 0.0;
};

enum class StdConvention { population, sample };

/// per_fold: bounds of each fold, then averaged. pooled: bounds of the fold-averaged e_bar and c.
enum class BoundAveraging { per_fold, pooled };

struct AggregateOptions {
  StdConvention std_convention = StdConvention::population;
  BoundAveraging averaging = BoundAveraging::per_fold;
};

struct AggregateReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<FoldReport> folds;
  ColumnStats mean_bit_error;
  ColumnStats mean_correlation;
  ColumnStats experimental;
  ColumnStats gs;
  ColumnStats chernoff;
  /// Raw KZ expression over all folds.
  ColumnStats kz;
  std::size_t kz_applicable_folds = 0;
  AggregateOptions options;
};

namespace detail {

inline ColumnStats column_stats(const std::vector<double>& v, StdConvention conv) {
  // shifted by the first value
  ColumnStats s;
  const double count = static_cast<double>(v.size());
  const double shift = v.front();
  double sum = 0.0, sq = 0.0;
  for (double x : v) {
    sum += x - shift;
    sq += (x - shift) * (x - shift);
  }
  s.mean = shift + sum / count;
  const double ss = std::max(0.0, sq - sum * sum / count);
  const double denom = conv == StdConvention::sample ? count - 1.0 : count;
  s.std = denom > 0.0 ? std::sqrt(ss / denom) : 0.0;
  return s;
}

/// Numeric fold ids sort numerically, others lexicographically after them.
inline bool fold_less(const std::string& a, const std::string& b) {
  auto na = csv::parse_count(a), nb = csv::parse_count(b);
  if (na && nb) return *na < *nb;
  if (na != nb) return static_cast<bool>(na);
  return a < b;
}

}  // namespace detail

inline AggregateReport aggregate(std::vector<FoldReport> folds, std::size_t n, std::size_t m, AggregateOptions opts = {}) {
  if (folds.empty()) throw ArgumentError("aggregate: no folds");
  std::stable_sort(folds.begin(), folds.end(),
                   [](const FoldReport& a, const FoldReport& b) { return detail::fold_less(a.summary.fold_id, b.summary.fold_id); });
  AggregateReport rep;
  rep.n = n;
  rep.m = m;
  rep.options = opts;
  std::vector<double> ebar, corr, exper, gs, ch, kz;
  for (const auto& f : folds) {
    ebar.push_back(f.summary.mean_bit_error);
    corr.push_back(f.summary.mean_correlation);
    exper.push_back(f.summary.ecoc_error);
    gs.push_back(f.bounds.gs);
    ch.push_back(f.bounds.chernoff_lambda);
    if (f.bounds.kz_formula) kz.push_back(*f.bounds.kz_formula);
    if (f.bounds.kz) ++rep.kz_applicable_folds;
  }
  rep.mean_bit_error = detail::column_stats(ebar, opts.std_convention);
  rep.mean_correlation = detail::column_stats(corr, opts.std_convention);
  rep.experimental = detail::column_stats(exper, opts.std_convention);
  rep.gs = detail::column_stats(gs, opts.std_convention);
  if (opts.averaging == BoundAveraging::per_fold) {
    rep.chernoff = detail::column_stats(ch, opts.std_convention);
    if (!kz.empty()) rep.kz = detail::column_stats(kz, opts.std_convention);
  } else {
    FoldSummary pooled;
    pooled.mean_bit_error = rep.mean_bit_error.mean;
    pooled.mean_correlation = rep.mean_correlation.mean;
    const BoundReport b = bound_report(pooled, n, m);
    rep.chernoff = {b.chernoff_lambda, 0.0};
    rep.kz = {b.kz_formula.value_or(0.0), 0.0};
  }
  rep.folds = std::move(folds);
  return rep;
}

/// Per-fold CSV: fold,mean_bit_error,mean_correlation,experimental,gs,chernoff,kz,kz_applicable.
/// Numbers use the shortest exact representation, so values read from a summary file
/// come back with their original text.
inline std::string report_csv(const AggregateReport& rep) {
  std::ostringstream os;
  os << "fold,mean_bit_error,mean_correlation,experimental,gs,chernoff,kz,kz_applicable\n";
  for (const auto& f : rep.folds) {
    const auto& s = f.summary;
    os << s.fold_id << ',' << format_double(s.mean_bit_error) << ',' << format_double(s.mean_correlation) << ','
       << (s.ecoc_error_text.empty() ? format_double(s.ecoc_error) : s.ecoc_error_text) << ',' << format_double(f.bounds.gs)
       << ',' << format_double(f.bounds.chernoff_lambda) << ','
       << (f.bounds.kz_formula ? format_double(*f.bounds.kz_formula) : std::string()) << ',' << (f.bounds.kz ? 1 : 0) << '\n';
  }
  return os.str();
}

inline nlohmann::json to_json(const ColumnStats& s) { return {{"mean", s.mean}, {"std", s.std}}; }

inline nlohmann::json to_json(const BoundReport& b) {
  nlohmann::json j;
  j["gs"] = b.gs;
  j["feller"] = b.feller ? nlohmann::json(*b.feller) : nlohmann::json(nullptr);
  j["chernoff_mu"] = b.chernoff_mu ? nlohmann::json(*b.chernoff_mu) : nlohmann::json(nullptr);
  j["chernoff"] = b.chernoff_lambda;
  j["kz"] = b.kz ? nlohmann::json(*b.kz) : nlohmann::json(nullptr);
  j["kz_formula"] = b.kz_formula ? nlohmann::json(*b.kz_formula) : nlohmann::json(nullptr);
  if (!b.kz_reason.empty()) j["kz_reason"] = b.kz_reason;
  j["lambda"] = b.lambda;
  j["omega"] = b.omega;
  return j;
}

inline nlohmann::json report_json(const AggregateReport& rep) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : rep.folds) {
    const auto& s = f.summary;
    folds.push_back({{"fold", s.fold_id},
                     {"model", s.model},
                     {"mean_bit_error", s.mean_bit_error},
                     {"mean_correlation", s.mean_correlation},
                     {"experimental", s.ecoc_error},
                     {"bounds", to_json(f.bounds)}});
  }
  return {{"n", rep.n},
          {"m", rep.m},
          {"folds", folds},
          {"aggregate",
           {{"mean_bit_error", to_json(rep.mean_bit_error)},
            {"mean_correlation", to_json(rep.mean_correlation)},
            {"experimental", to_json(rep.experimental)},
            {"gs", to_json(rep.gs)},
            {"chernoff", to_json(rep.chernoff)},
            {"kz", to_json(rep.kz)},
            {"kz_applicable_folds", rep.kz_applicable_folds},
            {"std", rep.options.std_convention == StdConvention::population ? "population" : "sample"},
            {"averaging", rep.options.averaging == BoundAveraging::per_fold ? "per_fold" : "pooled"}}}};
}

}  // namespace ecoc

#endif  // ECOC_EXPERIMENT_IO_HPP
