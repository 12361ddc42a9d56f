#include <gtest/gtest.h>

#include <cmath>

#include "ecoc/bounds.hpp"
#include "ecoc/simulator.hpp"
#include "stats.hpp"

using namespace ecoc;

namespace {

std::vector<std::size_t> histogram(const DependenceModel& model, std::size_t draws, std::uint64_t seed) {
  const OutcomeSampler sampler(model);
  std::vector<std::size_t> h(sampler.size() + 1, 0);
  BitVector bits;
  for (std::size_t t = 0; t < draws; ++t) {
    Rng rng = Rng::stream(seed, t);
    sampler.sample(rng, bits);
    ++h[static_cast<std::size_t>(std::count(bits.begin(), bits.end(), Bit{1}))];
  }
  return h;
}

}  // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a = Rng::stream(1, 5), b = Rng::stream(1, 5), c = Rng::stream(1, 6), d = Rng::stream(2, 5);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
}

TEST(Rng, UniformAndBelowStayInRange) {
  Rng rng(42);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    ASSERT_LT(rng.below(7), 7u);
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Simulator, ZeroErrorModelGivesZero) {
  const CodeMatrix code = build_code_matrix(10);
  SimConfig cfg;
  cfg.trials = 5000;
  const DependenceModel m = ErrorProfile::iid(10, 0.0);
  EXPECT_EQ(mc_threshold_error(m, 2, cfg).errors, 0u);
  EXPECT_EQ(mc_decode_error(m, code, std::nullopt, cfg).error_rate, 0.0);
}

TEST(Simulator, DeterministicForFixedSeed) {
  const DependenceModel m = ExchangeableModel(10, 0.15, 0.02);
  SimConfig cfg;
  cfg.trials = 20000;
  const SimResult a = mc_threshold_error(m, 2, cfg), b = mc_threshold_error(m, 2, cfg);
  EXPECT_EQ(a.errors, b.errors);
  EXPECT_EQ(a.error_rate, b.error_rate);
  EXPECT_EQ(a.std_err, b.std_err);
  cfg.seed += 1;
  EXPECT_NE(mc_threshold_error(m, 2, cfg).errors, a.errors);
}

TEST(Simulator, StrictModeIndependentOfWorkerCount) {
  const CodeMatrix code = build_code_matrix(11);
  const DependenceModel m = PairModel(ErrorProfile::iid(11, 0.2), 0.1);
  SimConfig cfg;
  cfg.trials = 30001;
  const SimResult t1 = mc_threshold_error(m, 2, cfg);
  const SimResult d1 = mc_decode_error(m, code, std::nullopt, cfg);
  for (std::size_t w : {2u, 3u, 8u}) {
    cfg.workers = w;
    EXPECT_EQ(mc_threshold_error(m, 2, cfg).errors, t1.errors);
    EXPECT_EQ(mc_decode_error(m, code, std::nullopt, cfg).errors, d1.errors);
  }
}

TEST(Simulator, FastModeIsDeterministicPerWorkerCount) {
  const DependenceModel m = ErrorProfile::iid(10, 0.2);
  SimConfig cfg;
  cfg.trials = 20000;
  cfg.strict = false;
  cfg.workers = 4;
  EXPECT_EQ(mc_threshold_error(m, 2, cfg).errors, mc_threshold_error(m, 2, cfg).errors);
}

TEST(Simulator, RejectsBadConfigurations) {
  const CodeMatrix code = build_code_matrix(10);
  SimConfig cfg;
  cfg.trials = 0;
  EXPECT_THROW(mc_threshold_error(ErrorProfile::iid(10, 0.1), 2, cfg), ArgumentError);
  cfg.trials = 10;
  EXPECT_THROW(mc_threshold_error(ErrorProfile::iid(10, 0.1), 11, cfg), ArgumentError);
  EXPECT_THROW(mc_decode_error(ErrorProfile::iid(9, 0.1), code, std::nullopt, cfg), ArgumentError);
  EXPECT_THROW(mc_decode_error(ErrorProfile::iid(10, 0.1), code, 10, cfg), ArgumentError);
}

TEST(Sampler, HistogramsMatchEnumerationByChiSquare) {
  const std::vector<DependenceModel> models = {
      ErrorProfile({0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.15, 0.25}),
      ErrorProfile::iid(10, 0.1),
      PairModel(ErrorProfile({0.1, 0.3, 0.2, 0.25, 0.25}), 0.2),
      PairModel(ErrorProfile::iid(10, 0.3), 0.0),
      ExchangeableModel(10, 0.1, 0.04),
      ExchangeableModel(7, 0.4, -0.03),
      ExchangeableModel(10, 0.25, bahadur_range(10, 0.25).hi),
  };
  const std::size_t draws = 1000000;
  std::uint64_t seed = 100;
  for (const auto& model : models) {
    const auto h = histogram(model, draws, seed++);
    const auto chi = test::chi_square(h, enumerate_outcomes(model), draws);
    EXPECT_TRUE(chi.pass()) << "statistic " << chi.statistic << " df " << chi.df << " critical " << chi.critical;
  }
}

TEST(Sampler, PairMarginalsAndJointMatchModel) {
  const PairModel pm(ErrorProfile({0.2, 0.3, 0.4}), 0.25);
  const OutcomeSampler sampler(pm);
  const std::size_t draws = 400000;
  std::size_t prev = 0, last = 0, both = 0;
  BitVector bits;
  for (std::size_t t = 0; t < draws; ++t) {
    Rng rng = Rng::stream(8, t);
    sampler.sample(rng, bits);
    prev += bits[1];
    last += bits[2];
    both += bits[1] & bits[2];
  }
  const double d = static_cast<double>(draws);
  EXPECT_NEAR(prev / d, 0.3, 4 * std::sqrt(0.3 * 0.7 / d));
  EXPECT_NEAR(last / d, 0.4, 4 * std::sqrt(0.4 * 0.6 / d));
  EXPECT_NEAR(both / d, 0.25, 4 * std::sqrt(0.25 * 0.75 / d));
}

TEST(Simulator, ThresholdMatchesExactTail) {
  const std::vector<std::pair<DependenceModel, std::size_t>> cases = {
      {ErrorProfile::iid(10, 0.1), 2},
      {PairModel(ErrorProfile::iid(12, 0.15), 0.08), 4},
      {ExchangeableModel(26, 0.0686, 0.0058), 6},
  };
  SimConfig cfg;
  cfg.trials = 200000;
  for (const auto& [model, m] : cases) {
    const SimResult r = mc_threshold_error(model, m, cfg);
    const double exact = error_tail(model, m);
    EXPECT_NEAR(r.error_rate, exact, 4 * std::sqrt(exact * (1 - exact) / cfg.trials));
  }
}

TEST(Simulator, DecodeNeverExceedsThresholdOnSharedSeed) {
  for (std::size_t classes : {10u, 11u, 26u}) {
    const CodeMatrix code = build_code_matrix(classes);
    const DependenceModel model = ExchangeableModel(classes, 0.15, 0.01);
    SimConfig cfg;
    cfg.trials = 50000;
    const SimResult t = mc_threshold_error(model, code.m(), cfg);
    cfg.mode = SimMode::full_decode;
    const SimResult d = mc_decode_error(model, code, std::nullopt, cfg);
    EXPECT_LE(d.errors, t.errors);
    cfg.tie_policy = TiePolicy::report_tie;
    EXPECT_LE(mc_decode_error(model, code, std::nullopt, cfg).errors, t.errors);
    EXPECT_GE(mc_decode_error(model, code, std::nullopt, cfg).errors, d.errors);
  }
}

TEST(Simulator, LettersCodeDecodeBelowChernoff) {
  const CodeMatrix code = build_code_matrix(26);
  SimConfig cfg;
  cfg.trials = 100000;
  const SimResult d = mc_decode_error(ErrorProfile::iid(26, 0.05), code, std::nullopt, cfg);
  EXPECT_LE(d.error_rate, std::pow(chernoff_lambda(code.r(), 0.05), 26.0) + 3 * d.std_err);
}

TEST(Simulator, FixedTrueClassIsHonoured) {
  const CodeMatrix code = build_code_matrix(10);
  SimConfig cfg;
  cfg.trials = 20000;
  const DependenceModel model = ErrorProfile::iid(10, 0.2);
  const SimResult a = mc_decode_error(model, code, 3, cfg);
  EXPECT_GT(a.errors, 0u);
  EXPECT_LE(a.error_rate, 1.0);
  EXPECT_GE(a.std_err, 0.0);
}
