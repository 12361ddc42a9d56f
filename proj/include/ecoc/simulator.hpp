#ifndef ECOC_SIMULATOR_HPP
#define ECOC_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include "ecoc/code_matrix.hpp"
#include "ecoc/error.hpp"
#include "ecoc/prob_engine.hpp"

namespace ecoc {

/// SplitMix64. Streams are keyed by (seed, index) so a trial's draws do not depend on
/// which worker runs it.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(mix(mix(seed) + index)); }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

/// Draws error vectors from a dependence model. Exchangeable outcomes depend on the error
/// set only through its size, so k is drawn first and then a uniform k-subset.
class OutcomeSampler {
 public:
  explicit OutcomeSampler(DependenceModel model) : model_(std::move(model)), n_(model_size(model_)) {
    if (const auto* ex = std::get_if<ExchangeableModel>(&model_)) {
      cdf_.resize(n_ + 1);
      double acc = 0.0;
      for (std::size_t k = 0; k <= n_; ++k) cdf_[k] = acc += exchangeable_pmf(*ex, k);
      for (double& v : cdf_) v /= acc;
    }
  }

  std::size_t size() const noexcept { return n_; }
  const DependenceModel& model() const noexcept { return model_; }

  void sample(Rng& rng, BitVector& out) const {
    out.assign(n_, 0);
    if (const auto* p = std::get_if<ErrorProfile>(&model_)) {
      for (std::size_t i = 0; i < n_; ++i) out[i] = rng.uniform() < (*p)[i];
    } else if (const auto* pair = std::get_if<PairModel>(&model_)) {
      for (std::size_t i = 0; i + 2 < n_; ++i) out[i] = rng.uniform() < pair->profile()[i];
      const double u = rng.uniform();
      const double c11 = pair->cell(1, 1), c10 = pair->cell(1, 0), c01 = pair->cell(0, 1);
      if (u < c11) {
        out[n_ - 2] = 1;
        out[n_ - 1] = 1;
      } else if (u < c11 + c10) {
        out[n_ - 2] = 1;
      } else if (u < c11 + c10 + c01) {
        out[n_ - 1] = 1;
      }
    } else {
      const double u = rng.uniform();
      const auto k = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end() - 1, u) - cdf_.begin());
      // partial Fisher-Yates over positions
      std::vector<std::size_t> pos(n_);
      std::iota(pos.begin(), pos.end(), std::size_t{0});
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n_ - i));
        std::swap(pos[i], pos[j]);
        out[pos[i]] = 1;
      }
    }
  }

 private:
  DependenceModel model_;
  std::size_t n_;
  std::vector<double> cdf_;
};

inline BitVector sample_outcome(const DependenceModel& model, Rng& rng) {
  BitVector out;
  OutcomeSampler(model).sample(rng, out);
  return out;
}

enum class SimMode { threshold, full_decode };

struct SimConfig {
  std::size_t trials = 100000;
  std::uint64_t seed = 20211101;
  SimMode mode = SimMode::threshold;
  std::size_t workers = 1;
  /// Strict: trial t always uses stream (seed, t), so output is independent of `workers`.
  /// Otherwise each worker consumes one stream sequentially.
  bool strict = true;
  TiePolicy tie_policy = TiePolicy::lowest_index;
};

struct SimResult {
  double error_rate = 0.0;
  double std_err = 0.0;
  std::size_t trials = 0;
  std::size_t errors = 0;
  SimMode mode = SimMode::threshold;
};

namespace detail {

inline SimResult finish(std::size_t errors, std::size_t trials, SimMode mode) {
  SimResult res;
  res.errors = errors;
  res.trials = trials;
  res.mode = mode;
  res.error_rate = static_cast<double>(errors) / static_cast<double>(trials);
  res.std_err = std::sqrt(res.error_rate * (1.0 - res.error_rate) / static_cast<double>(trials));
  return res;
}

/// Runs `trial(rng) -> bool` cfg.trials times across cfg.workers threads; returns the error count.
template <typename Trial>
std::size_t run_trials(const SimConfig& cfg, Trial trial) {
  if (cfg.trials == 0) throw ArgumentError("simulation: trials must be >= 1");
  const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, cfg.trials);
  std::vector<std::size_t> counts(workers, 0);
  auto body = [&](std::size_t w) {
    const std::size_t begin = cfg.trials * w / workers, end = cfg.trials * (w + 1) / workers;
    std::size_t errors = 0;
    if (cfg.strict) {
      for (std::size_t t = begin; t < end; ++t) {
        Rng rng = Rng::stream(cfg.seed, t);
        errors += trial(rng) ? 1 : 0;
      }
    } else {
      Rng rng = Rng::stream(cfg.seed, w);
      for (std::size_t t = begin; t < end; ++t) errors += trial(rng) ? 1 : 0;
    }
    counts[w] = errors;
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

}  // namespace detail

/// Fraction of trials with at least m erring classifiers (the worst-case convention).
inline SimResult mc_threshold_error(const DependenceModel& model, std::size_t m, const SimConfig& cfg) {
  const OutcomeSampler sampler(model);
  detail::require_count_range(m, sampler.size(), "mc_threshold_error");
  const std::size_t errors = detail::run_trials(cfg, [&](Rng& rng) {
    thread_local BitVector bits;
    sampler.sample(rng, bits);
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), Bit{1})) >= m;
  });
  return detail::finish(errors, cfg.trials, SimMode::threshold);
}

/// Fraction of trials where nearest-codeword decoding of the corrupted true codeword
/// misses the true class. The error vector is drawn before the class, so with equal
/// seeds every decode error is also a threshold error.
inline SimResult mc_decode_error(const DependenceModel& model, const CodeMatrix& code,
                                 std::optional<std::size_t> true_class, const SimConfig& cfg) {
  const OutcomeSampler sampler(model);
  if (sampler.size() != code.n())
    throw ArgumentError("mc_decode_error: model has " + std::to_string(sampler.size()) + " classifiers, code has " +
                        std::to_string(code.n()));
  if (true_class && *true_class >= code.classes()) throw ArgumentError("mc_decode_error: true class out of range");
  const std::size_t errors = detail::run_trials(cfg, [&](Rng& rng) {
    thread_local BitVector bits;
    sampler.sample(rng, bits);
    const std::size_t cls = true_class ? *true_class : static_cast<std::size_t>(rng.below(code.classes()));
    const auto word = code.codeword(cls);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] ^= word[i];
    const DecodeResult d = decode(bits, code, cfg.tie_policy);
    return d.index != cls || d.tie;
  });
  return detail::finish(errors, cfg.trials, SimMode::full_decode);
}

}  // namespace ecoc

#endif  // ECOC_SIMULATOR_HPP
