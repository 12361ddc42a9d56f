#ifndef ECOC_CODE_MATRIX_HPP
#define ECOC_CODE_MATRIX_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "ecoc/error.hpp"

namespace ecoc {

using Bit = std::uint8_t;
using BitVector = std::vector<Bit>;

/// Dense row-major {0,1} matrix.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}
  BitMatrix(std::size_t rows, std::size_t cols, std::vector<Bit> bits) : rows_(rows), cols_(cols), bits_(std::move(bits)) {
    if (bits_.size() != rows_ * cols_) throw ArgumentError("BitMatrix: bit count does not match rows*cols");
    for (Bit b : bits_)
      if (b > 1) throw ArgumentError("BitMatrix: entries must be 0 or 1");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Bit operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Bit b) { bits_[r * cols_ + c] = b ? 1 : 0; }

  std::span<const Bit> row(std::size_t r) const { return {bits_.data() + r * cols_, cols_}; }
  const std::vector<Bit>& bits() const noexcept { return bits_; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Bit> bits_;
};

inline std::size_t hamming_distance(std::span<const Bit> a, std::span<const Bit> b) {
  if (a.size() != b.size()) throw ArgumentError("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

/// Minimum Hamming distance over all unordered row pairs.
inline std::size_t min_row_distance(const BitMatrix& m) {
  if (m.rows() < 2) throw ArgumentError("min_row_distance: need at least 2 rows");
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.rows(); ++j) best = std::min(best, hamming_distance(m.row(i), m.row(j)));
  return best;
}

inline constexpr unsigned kMaxHadamardOrder = 16;

/// 2^k x 2^k Sylvester Hadamard matrix over {0,1}; +1 maps to 0, -1 maps to 1.
inline BitMatrix sylvester_hadamard(unsigned k) {
  if (k > kMaxHadamardOrder) throw SizeError("sylvester_hadamard: order " + std::to_string(k) + " above cap 16");
  BitMatrix h(1, 1);
  for (unsigned step = 0; step < k; ++step) {
    const std::size_t half = h.rows();
    BitMatrix next(2 * half, 2 * half);
    // [[H, H], [H, -H]]
    for (std::size_t r = 0; r < half; ++r)
      for (std::size_t c = 0; c < half; ++c) {
        const Bit b = h(r, c);
        next.set(r, c, b);
        next.set(r, c + half, b);
        next.set(r + half, c, b);
        next.set(r + half, c + half, b ^ 1);
      }
    h = std::move(next);
  }
  return h;
}

/// Which block of the 2^k Hadamard matrix survives truncation to n x n.
enum class Orientation {
  keep_bottom_right,  ///< delete the leading rows and columns; reproduces m=2 (n=10) and m=6 (n=26)
  keep_top_left,
};

/// ECOC matrix: one row (codeword) per class, one column per binary classifier.
class CodeMatrix {
 public:
  explicit CodeMatrix(BitMatrix matrix) : matrix_(std::move(matrix)) {
    d_ = min_row_distance(matrix_);
    if (d_ == 0) throw ArgumentError("CodeMatrix: duplicate codewords");
    m_ = d_ / 2;
  }

  const BitMatrix& matrix() const noexcept { return matrix_; }
  std::size_t classes() const noexcept { return matrix_.rows(); }
  /// Codeword length, i.e. number of binary classifiers.
  std::size_t n() const noexcept { return matrix_.cols(); }
  std::size_t d() const noexcept { return d_; }
  /// floor(d/2); every pattern of fewer than m bit errors is corrected.
  std::size_t m() const noexcept { return m_; }
  double r() const noexcept { return static_cast<double>(m_) / static_cast<double>(n()); }
  std::span<const Bit> codeword(std::size_t cls) const { return matrix_.row(cls); }

 private:
  BitMatrix matrix_;
  std::size_t d_ = 0;
  std::size_t m_ = 0;
};

inline CodeMatrix build_code_matrix(std::size_t num_classes, Orientation orientation = Orientation::keep_bottom_right) {
  if (num_classes < 2) throw ArgumentError("build_code_matrix: need at least 2 classes");
  unsigned k = 0;
  while ((std::size_t{1} << k) < num_classes) ++k;
  const BitMatrix h = sylvester_hadamard(k);
  const std::size_t offset = orientation == Orientation::keep_bottom_right ? h.rows() - num_classes : 0;
  BitMatrix m(num_classes, num_classes);
  for (std::size_t r = 0; r < num_classes; ++r)
    for (std::size_t c = 0; c < num_classes; ++c) m.set(r, c, h(r + offset, c + offset));
  return CodeMatrix(std::move(m));
}

enum class TiePolicy { lowest_index, report_tie };

struct DecodeResult {
  std::size_t index = 0;
  /// Set only under TiePolicy::report_tie when the nearest codeword is not unique.
  bool tie = false;
  std::size_t distance = 0;
};

/// Nearest-codeword decoding; ties resolve to the lowest class index.
inline DecodeResult decode(std::span<const Bit> word, const CodeMatrix& code, TiePolicy policy = TiePolicy::lowest_index) {
  if (word.size() != code.n())
    throw ArgumentError("decode: word length " + std::to_string(word.size()) + " != code length " + std::to_string(code.n()));
  DecodeResult best;
  best.distance = std::numeric_limits<std::size_t>::max();
  bool tie = false;
  for (std::size_t cls = 0; cls < code.classes(); ++cls) {
    const std::size_t dist = hamming_distance(word, code.codeword(cls));
    if (dist < best.distance) {
      best.index = cls;
      best.distance = dist;
      tie = false;
    } else if (dist == best.distance) {
      tie = true;
    }
  }
  best.tie = policy == TiePolicy::report_tie && tie;
  return best;
}

/// Plain-text form: "rows d m" then one line of '0'/'1' characters per codeword.
inline std::string to_text(const CodeMatrix& code) {
  std::ostringstream os;
  os << code.classes() << ' ' << code.d() << ' ' << code.m() << '\n';
  for (std::size_t r = 0; r < code.classes(); ++r) {
    for (Bit b : code.codeword(r)) os << static_cast<char>('0' + b);
    os << '\n';
  }
  return os.str();
}

inline CodeMatrix code_matrix_from_text(std::istream& in, const std::string& source = "<code>") {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(source, lineno, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream header(line);
  std::size_t rows = 0, d = 0, m = 0;
  if (!(header >> rows >> d >> m)) throw ParseError(source, lineno, "header must be 'n d m'");
  std::vector<Bit> bits;
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError(source, lineno, "expected " + std::to_string(rows) + " codeword lines");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (r == 0) cols = line.size();
    if (line.size() != cols || cols == 0) throw ParseError(source, lineno, "codeword length mismatch");
    for (char ch : line) {
      if (ch != '0' && ch != '1') throw ParseError(source, lineno, "codeword characters must be 0 or 1");
      bits.push_back(static_cast<Bit>(ch - '0'));
    }
  }
  CodeMatrix code(BitMatrix(rows, cols, std::move(bits)));
  if (code.d() != d || code.m() != m)
    throw ParseError(source, 1, "header d/m disagree with the matrix (recomputed d=" + std::to_string(code.d()) + ")");
  return code;
}

}  // namespace ecoc

#endif  // ECOC_CODE_MATRIX_HPP
