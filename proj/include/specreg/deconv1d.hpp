#pragma once

// Periodic 1D deconvolution on the torus [-1, 1): box-kernel blur, noisy measurements
// synthesized on a refined grid, and filtered Fourier-domain reconstruction.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "specreg/filter.hpp"
#include "specreg/numerics.hpp"

namespace specreg {

/// x_j = -1 + 2j/N, j = 0..N-1, spacing h = 2/N.
class Grid1D {
public:
  explicit Grid1D(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return 2.0 / static_cast<double>(n_); }
  double point(std::size_t j) const noexcept { return -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n_); }
  /// Signed periodic offset of index j, i.e. j*h wrapped into [-1, 1).
  double offset(std::size_t j) const noexcept;
  std::vector<double> points() const;

  bool operator==(const Grid1D&) const = default;

private:
  std::size_t n_;
};

struct Signal1D {
  Grid1D grid;
  std::vector<double> values;

  Signal1D(Grid1D g, std::vector<double> v);
};

/// gamma = c * indicator([-s_blur, s_blur]), sampled in offset order (index j <-> offset j*h
/// wrapped periodically). c normalizes the Riemann sum h * sum(gamma) to exactly 1.
class BoxKernel {
public:
  explicit BoxKernel(double s_blur);

  double half_width() const noexcept { return s_blur_; }
  Signal1D sample(const Grid1D& grid) const;

private:
  double s_blur_;
};

enum class TestFunctionId { F1, F2, F3 };

TestFunctionId parse_test_function(const std::string& name);
std::string to_string(TestFunctionId id);

/// Closed-form test signals on the torus with values in [0, 1].
///   F1: hat max(0, 1 - |x|/0.5), continuous and piecewise smooth.
///   F2: ramp (x + 0.4)/0.7 on [-0.4, 0.3), zero elsewhere; one jump, at x = 0.3.
///   F3: exp(-x^2 / (2 * 0.15^2)) times a C-infinity window that is 1 on |x| <= 0.7
///       and vanishes identically for |x| >= 0.9.
class TestFunction {
public:
  explicit TestFunction(TestFunctionId id) : id_(id) {}

  TestFunctionId id() const noexcept { return id_; }
  double operator()(double x) const;
  Signal1D sample(const Grid1D& grid) const;

private:
  TestFunctionId id_;
};

TestFunction make_test_function(TestFunctionId id);

/// Smooth step: 0 for t <= 0, 1 for t >= 1, C-infinity in between.
double smooth_step(double t);

/// g_j = h * sum_j' f_{(j - j') mod N} gamma_j'  (circular Riemann sum), via the DFT.
Signal1D discrete_convolution(const Signal1D& f, const Signal1D& gamma);

struct Measurement {
  Signal1D clean;
  Signal1D noisy;
};

/// Convolve on a grid refined by `oversample`, subsample to N points, add N(0, noise_std^2) noise.
/// noise_std = 0 gives noisy == clean.
Measurement synthesize_measurement(const TestFunction& tf, const BoxKernel& kernel, std::size_t n,
                                   double noise_std, std::uint64_t seed, std::size_t oversample = 10);

/// Multipliers with modulus below this fraction of the largest are treated as singular.
inline constexpr double kMultiplierFlush = 1e-14;

/// Precomputes the kernel multiplier h*DFT(gamma) and the data transform for repeated
/// reconstructions of one measurement.
class Deconvolver {
public:
  Deconvolver(const Signal1D& noisy, const BoxKernel& kernel);

  const Grid1D& grid() const noexcept { return noisy_.grid; }
  const DiagonalMultiplier& multiplier() const noexcept { return multiplier_; }
  const Signal1D& kernel_samples() const noexcept { return kernel_; }

  Signal1D reconstruct(const FilterSpec& spec) const;

  /// ||gamma * f_alpha - g||_2 with the circular convolution.
  double residual_norm(const FilterSpec& spec) const;
  double residual_norm(const Signal1D& reconstruction) const;

private:
  Signal1D noisy_;
  Signal1D kernel_;
  DiagonalMultiplier multiplier_;
  ComplexVector data_hat_;  // h * DFT(g)
};

Signal1D reconstruct(const Signal1D& noisy, const BoxKernel& kernel, const FilterSpec& spec);

/// ||recon - truth||_2 / ||truth||_2.
double relative_error(const Signal1D& recon, const Signal1D& truth);

}  // namespace specreg
