#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "specreg/deconv1d.hpp"
#include "specreg/errors.hpp"
#include "specreg/param_select.hpp"
#include "support/oracles.hpp"

namespace specreg {
namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

Signal1D random_signal(std::mt19937_64& rng, const Grid1D& grid) {
  std::normal_distribution<double> nd;
  std::vector<double> v(grid.size());
  for (auto& x : v) x = nd(rng);
  return Signal1D(grid, v);
}

TEST(Grid1D, PointsAndSpacing) {
  const Grid1D g(4);
  EXPECT_EQ(g.spacing(), 0.5);
  EXPECT_EQ(g.points(), (std::vector<double>{-1.0, -0.5, 0.0, 0.5}));
  EXPECT_EQ(g.offset(1), 0.5);
  EXPECT_EQ(g.offset(3), -0.5);
  EXPECT_EQ(g.offset(2), -1.0);
  EXPECT_THROW(Grid1D(0), ContractError);
}

TEST(Signal1D, ValidatesLengthAndFiniteness) {
  EXPECT_THROW(Signal1D(Grid1D(3), {1.0, 2.0}), ContractError);
  EXPECT_THROW(Signal1D(Grid1D(2), {1.0, std::nan("")}), ContractError);
}

TEST(BoxKernel, RiemannSumIsOne) {
  for (std::size_t n : {64u, 1001u, 4096u}) {
    for (double s : {0.03, 0.1, 0.37}) {
      const Grid1D grid(n);
      const auto gamma = BoxKernel(s).sample(grid);
      double sum = 0.0;
      for (double v : gamma.values) sum += v;
      EXPECT_NEAR(grid.spacing() * sum, 1.0, 1e-12) << n << " " << s;
      // and the height stays within 2h of the continuous 1/(2s)
      const double peak = *std::max_element(gamma.values.begin(), gamma.values.end());
      EXPECT_NEAR(peak * 2.0 * s, 1.0, 2.0 * grid.spacing() / (2.0 * s) + 1e-12);
    }
  }
}

TEST(BoxKernel, SupportIsSymmetricInOffsetOrder) {
  const Grid1D grid(100);
  const auto gamma = BoxKernel(0.1).sample(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const bool inside = std::abs(grid.offset(j)) <= 0.1 + 1e-12;
    EXPECT_EQ(gamma.values[j] > 0.0, inside) << j;
    EXPECT_EQ(gamma.values[j], gamma.values[(grid.size() - j) % grid.size()]);
  }
}

TEST(BoxKernel, RejectsBadWidth) {
  EXPECT_THROW(BoxKernel(0.0), ContractError);
  EXPECT_THROW(BoxKernel(-0.1), ContractError);
  EXPECT_THROW(BoxKernel(1.5), ContractError);
}

TEST(TestFunctions, F1Hat) {
  const auto f1 = make_test_function(TestFunctionId::F1);
  EXPECT_EQ(f1(0.0), 1.0);
  EXPECT_EQ(f1(0.5), 0.0);
  EXPECT_EQ(f1(-0.5), 0.0);
  EXPECT_EQ(f1(0.25), 0.5);
  double worst = 0.0;
  for (double x = -1.0; x < 1.0; x += 1e-4) worst = std::max(worst, std::abs(f1(x + 1e-6) - f1(x)));
  EXPECT_LE(worst, 2.1e-6);  // Lipschitz constant 2
}

TEST(TestFunctions, RangeIsUnitInterval) {
  for (auto id : {TestFunctionId::F1, TestFunctionId::F2, TestFunctionId::F3}) {
    const auto f = make_test_function(id);
    for (double x = -1.0; x < 1.0; x += 1e-3) {
      ASSERT_GE(f(x), 0.0);
      ASSERT_LE(f(x), 1.0);
    }
  }
}

TEST(TestFunctions, F2HasExactlyOneJump) {
  const auto f2 = make_test_function(TestFunctionId::F2);
  const Grid1D grid(20000);
  int jumps = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double a = f2(grid.point(j));
    const double b = f2(grid.point((j + 1) % grid.size()) - (j + 1 == grid.size() ? 2.0 : 0.0));
    if (std::abs(b - a) > 0.05) ++jumps;  // continuous parts move by at most 1.5e-4 per step
  }
  EXPECT_EQ(jumps, 1);
  EXPECT_NEAR(f2(0.3 - 1e-12), 1.0, 1e-9);
  EXPECT_EQ(f2(0.3), 0.0);
  EXPECT_EQ(f2(-0.4), 0.0);
}

TEST(TestFunctions, F3SmoothAndPeriodic) {
  const auto f3 = make_test_function(TestFunctionId::F3);
  EXPECT_EQ(f3(0.0), 1.0);
  for (double x : {-1.0, -0.95, -0.9, 0.9, 0.95, 0.999999}) EXPECT_EQ(f3(x), 0.0) << x;
  // bounded fourth differences everywhere, including across the periodic seam
  const double h = 1e-3;
  auto wrap = [](double x) { return x >= 1.0 ? x - 2.0 : (x < -1.0 ? x + 2.0 : x); };
  double worst = 0.0;
  for (double x = -1.0; x < 1.0; x += 1e-3) {
    const double d4 = f3(wrap(x - 2 * h)) - 4 * f3(wrap(x - h)) + 6 * f3(x) - 4 * f3(wrap(x + h)) + f3(wrap(x + 2 * h));
    worst = std::max(worst, std::abs(d4) / std::pow(h, 4));
  }
  EXPECT_LT(worst, 1e4);
}

TEST(SmoothStep, EndpointsAndMonotonicity) {
  EXPECT_EQ(smooth_step(-1.0), 0.0);
  EXPECT_EQ(smooth_step(0.0), 0.0);
  EXPECT_EQ(smooth_step(1.0), 1.0);
  EXPECT_EQ(smooth_step(2.0), 1.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
  for (double t = 0.0; t < 1.0; t += 0.01) EXPECT_LE(smooth_step(t), smooth_step(t + 0.01));
}

TEST(TestFunctions, ParseNames) {
  EXPECT_EQ(parse_test_function("F2"), TestFunctionId::F2);
  EXPECT_EQ(to_string(TestFunctionId::F3), "F3");
  EXPECT_THROW(parse_test_function("F4"), ContractError);
}

// ---------------------------------------------------------------------------

TEST(DiscreteConvolution, DeltaKernelIsIdentity) {
  std::mt19937_64 rng(1);
  const Grid1D grid(50);
  const auto f = random_signal(rng, grid);
  std::vector<double> delta(grid.size(), 0.0);
  delta[0] = 1.0 / grid.spacing();
  const auto g = discrete_convolution(f, Signal1D(grid, delta));
  for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_NEAR(g.values[j], f.values[j], 1e-13);
}

TEST(DiscreteConvolution, ConstantIsPreserved) {
  const Grid1D grid(1001);
  const auto g = discrete_convolution(Signal1D(grid, std::vector<double>(grid.size(), 1.0)), BoxKernel(0.1).sample(grid));
  for (double v : g.values) EXPECT_NEAR(v, 1.0, 1e-10);
}

TEST(DiscreteConvolution, MatchesBruteForceSum) {
  std::mt19937_64 rng(2);
  for (std::size_t n : {8u, 33u}) {
    const Grid1D grid(n);
    const auto f = random_signal(rng, grid);
    const auto gamma = random_signal(rng, grid);
    const auto fast = discrete_convolution(f, gamma);
    const auto slow = oracle::direct_circular_convolution(f.values, gamma.values, grid.spacing());
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(fast.values[j], slow[j], 1e-12);
  }
}

TEST(DiscreteConvolution, Commutes) {
  std::mt19937_64 rng(3);
  const Grid1D grid(257);
  const auto f = random_signal(rng, grid);
  const auto gamma = random_signal(rng, grid);
  const auto fg = discrete_convolution(f, gamma);
  const auto gf = discrete_convolution(gamma, f);
  for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_NEAR(fg.values[j], gf.values[j], 1e-12);
}

TEST(DiscreteConvolution, GridMismatch) {
  EXPECT_THROW(discrete_convolution(Signal1D(Grid1D(3), {1, 2, 3}), Signal1D(Grid1D(2), {1, 2})), ContractError);
}

// ---------------------------------------------------------------------------

TEST(SynthesizeMeasurement, NoiselessMeasurementIsClean) {
  const auto m = synthesize_measurement(make_test_function(TestFunctionId::F1), BoxKernel(0.1), 101, 0.0, 1);
  EXPECT_EQ(m.noisy.values, m.clean.values);
}

TEST(SynthesizeMeasurement, OversampleOneIsCoarseConvolution) {
  const auto tf = make_test_function(TestFunctionId::F2);
  const BoxKernel kernel(0.1);
  const Grid1D grid(200);
  const auto m = synthesize_measurement(tf, kernel, grid.size(), 0.0, 1, 1);
  const auto direct = discrete_convolution(tf.sample(grid), kernel.sample(grid));
  for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_NEAR(m.clean.values[j], direct.values[j], 1e-14);
}

TEST(SynthesizeMeasurement, RiemannSumsSelfConverge) {
  const auto tf = make_test_function(TestFunctionId::F3);
  const BoxKernel kernel(0.1);
  const auto m10 = synthesize_measurement(tf, kernel, 1001, 0.0, 1, 10);
  const auto m20 = synthesize_measurement(tf, kernel, 1001, 0.0, 1, 20);
  EXPECT_LE(rel_l2(m10.clean.values, m20.clean.values), 1e-4);
}

TEST(SynthesizeMeasurement, NoiseIsSeededAndAdditive) {
  const auto tf = make_test_function(TestFunctionId::F1);
  const auto a = synthesize_measurement(tf, BoxKernel(0.1), 1001, 0.05, 7);
  const auto b = synthesize_measurement(tf, BoxKernel(0.1), 1001, 0.05, 7);
  EXPECT_EQ(a.noisy.values, b.noisy.values);
  const auto eps = gaussian_noise(1001, 0.05, 7);
  for (std::size_t j = 0; j < eps.size(); ++j) EXPECT_EQ(a.noisy.values[j], a.clean.values[j] + eps[j]);
}

TEST(SynthesizeMeasurement, InvalidArguments) {
  const auto tf = make_test_function(TestFunctionId::F1);
  EXPECT_THROW(synthesize_measurement(tf, BoxKernel(0.1), 1, 0.0, 1), ContractError);
  EXPECT_THROW(synthesize_measurement(tf, BoxKernel(0.1), 100, 0.0, 1, 0), ContractError);
  EXPECT_THROW(synthesize_measurement(tf, BoxKernel(0.1), 100, -1.0, 1), ContractError);
}

// ---------------------------------------------------------------------------

TEST(Reconstruct, SmallAlphaNoiselessF1NearDiscretizationFloor) {
  const auto tf = make_test_function(TestFunctionId::F1);
  const auto m = synthesize_measurement(tf, BoxKernel(0.1), 1001, 0.0, 1);
  const auto recon = reconstruct(m.noisy, BoxKernel(0.1), FilterSpec(0.0, 1e-12));
  EXPECT_LE(relative_error(recon, tf.sample(Grid1D(1001))), 0.02);
}

TEST(Reconstruct, ExactInverseOnCoarseCircularData) {
  // N = 1000, s = 0.1: the box spans 101 samples, coprime-ish enough that no DFT entry vanishes.
  const auto tf = make_test_function(TestFunctionId::F3);
  const Grid1D grid(1000);
  const BoxKernel kernel(0.1);
  const auto m = synthesize_measurement(tf, kernel, grid.size(), 0.0, 1, 1);
  const Deconvolver dec(m.noisy, kernel);
  double min_mod = INFINITY;
  for (const auto& v : dec.multiplier().values()) min_mod = std::min(min_mod, std::abs(v));
  ASSERT_GT(min_mod, 1e-4);
  const auto recon = dec.reconstruct(FilterSpec(0.0, 1e-40));
  EXPECT_LE(rel_l2(recon.values, tf.sample(grid).values), 1e-8);
}

TEST(Reconstruct, ZeroDataGivesZero) {
  const Grid1D grid(128);
  const auto recon = reconstruct(Signal1D(grid, std::vector<double>(grid.size(), 0.0)), BoxKernel(0.1), FilterSpec(2.0, 0.01));
  for (double v : recon.values) EXPECT_EQ(v, 0.0);
}

TEST(Reconstruct, TikhonovMatchesFourierNormalEquations) {
  const auto m = synthesize_measurement(make_test_function(TestFunctionId::F2), BoxKernel(0.1), 257, 0.05, 3);
  const Grid1D& grid = m.noisy.grid;
  const double alpha = 0.02;
  const auto recon = reconstruct(m.noisy, BoxKernel(0.1), FilterSpec(0.0, alpha));

  // (|m|^2 + alpha) f_hat = conj(m) g_hat with m = h DFT(gamma), g_hat = h DFT(g)
  const double h = grid.spacing();
  std::vector<std::complex<double>> gamma(grid.size());
  std::vector<std::complex<double>> g(grid.size());
  const auto kernel = BoxKernel(0.1).sample(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    gamma[j] = kernel.values[j];
    g[j] = m.noisy.values[j];
  }
  const auto mh = oracle::direct_dft(gamma, -1);
  const auto gh = oracle::direct_dft(g, -1);
  std::vector<std::complex<double>> fh(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const std::complex<double> mk = h * mh[k];
    fh[k] = std::conj(mk) * (h * gh[k]) / (std::norm(mk) + alpha);
  }
  const auto f = oracle::direct_dft(fh, +1);
  std::vector<double> expected(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) expected[j] = f[j].real() / (h * static_cast<double>(grid.size()));
  EXPECT_LE(rel_l2(recon.values, expected), 1e-10);
}

TEST(Reconstruct, NoiselessErrorDecreasesToFloor) {
  // The data come from the refined grid, so below some alpha the error sits on a model-mismatch
  // floor and wanders by a few percent of itself; above it the decrease must be monotone.
  const auto tf = make_test_function(TestFunctionId::F1);
  const auto m = synthesize_measurement(tf, BoxKernel(0.1), 1001, 0.0, 1);
  const auto truth = tf.sample(Grid1D(1001));
  const Deconvolver dec(m.noisy, BoxKernel(0.1));
  for (double tau : {0.0, 2.0, 10.0, 100.0}) {
    std::vector<double> errs;
    for (double alpha = 1.0; alpha >= 1e-10; alpha /= 10.0) {
      errs.push_back(relative_error(dec.reconstruct(FilterSpec(tau, alpha)), truth));
    }
    const double floor = *std::min_element(errs.begin(), errs.end());
    EXPECT_LE(floor, 0.02) << tau;
    bool on_floor = false;
    for (std::size_t i = 1; i < errs.size(); ++i) {
      on_floor = on_floor || errs[i - 1] <= 1.05 * floor;
      if (on_floor) EXPECT_LE(errs[i], 1.05 * floor) << "tau=" << tau << " i=" << i;
      else EXPECT_LE(errs[i], errs[i - 1]) << "tau=" << tau << " i=" << i;
    }
    EXPECT_TRUE(on_floor || errs.back() <= 1.05 * floor);
  }
}

TEST(Reconstruct, ResidualNonincreasingInTau) {
  // The residual multiplier 1 - q is pointwise nonincreasing in tau wherever |m| > sqrt(alpha);
  // for data concentrated there the residual norm must follow.
  const auto m = synthesize_measurement(make_test_function(TestFunctionId::F3), BoxKernel(0.03), 1001, 0.0, 1);
  const Deconvolver dec(m.noisy, BoxKernel(0.03));
  const double alpha = 1e-6;
  double prev = INFINITY;
  for (double tau : {0.0, 1.0, 2.0, 10.0, 100.0}) {
    const double r = dec.residual_norm(FilterSpec(tau, alpha));
    EXPECT_LE(r, prev) << tau;
    prev = r;
  }
}

TEST(Reconstruct, GibbsOvershootForCutoff) {
  const auto tf = make_test_function(TestFunctionId::F2);
  const BoxKernel kernel(0.1);
  const std::size_t n = 1001;
  const double noise = 0.05;
  const auto m = synthesize_measurement(tf, kernel, n, noise, 1);
  const Deconvolver dec(m.noisy, kernel);
  auto overshoot = [&](const FilterSpec& base) {
    MorozovConfig cfg;
    cfg.noise_std = noise;
    cfg.n = n;
    const auto mz = morozov_alpha([&](double a) { return dec.residual_norm(base.with_alpha(a)); }, cfg);
    const auto r = dec.reconstruct(base.with_alpha(mz.alpha));
    const auto x = r.grid.points();
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (std::abs(x[j] - 0.3) < 0.15) worst = std::max({worst, r.values[j] - 1.0, -r.values[j]});
    }
    return worst;
  };
  const double cut = overshoot(FilterSpec::cutoff(1.0));
  const double tik = overshoot(FilterSpec::tikhonov(1.0));
  EXPECT_GT(cut, 0.02);  // jump height is 1
  EXPECT_LT(tik, cut);
}

TEST(Deconvolver, ResidualOfExactConvolutionIsZero) {
  const Grid1D grid(64);
  const BoxKernel kernel(0.2);
  std::mt19937_64 rng(4);
  const auto f = random_signal(rng, grid);
  const auto g = discrete_convolution(f, kernel.sample(grid));
  const Deconvolver dec(g, kernel);
  EXPECT_LE(dec.residual_norm(f), 1e-12);
  EXPECT_THROW(dec.residual_norm(Signal1D(Grid1D(3), {0, 0, 0})), ContractError);
}

TEST(RelativeError, Examples) {
  const Grid1D grid(2);
  const Signal1D truth(grid, {3.0, 4.0});
  EXPECT_EQ(relative_error(truth, truth), 0.0);
  EXPECT_EQ(relative_error(Signal1D(grid, {6.0, 8.0}), truth), 1.0);
  EXPECT_EQ(relative_error(Signal1D(grid, {8.0, 4.0}), truth), 1.0);
  EXPECT_THROW(relative_error(truth, Signal1D(grid, {0.0, 0.0})), ContractError);
}

}  // namespace
}  // namespace specreg
