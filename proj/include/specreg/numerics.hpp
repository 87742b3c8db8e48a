#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specreg/filter.hpp"

namespace specreg {

using ComplexVector = std::vector<std::complex<double>>;
using DenseMatrix = Eigen::MatrixXd;

/// X_k = sum_j x_j exp(-2 pi i jk/n). Any n >= 1.
ComplexVector dft_forward(std::span<const std::complex<double>> x);

/// Inverse of dft_forward, including the 1/n normalization.
ComplexVector dft_inverse(std::span<const std::complex<double>> X);

/// Thin SVD A = U diag(sigma) V^T. Tall inputs are QR-reduced first.
SingularSystem svd(const DenseMatrix& a);

/// Seeded N(0, 1) source: mt19937_64 words mapped to 53-bit uniforms, then Box-Muller pairs.
/// The algorithm is fixed so noise fixtures are stable across platforms.
class NormalSampler {
public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double next();

private:
  double uniform_open();  // (0, 1]

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n i.i.d. draws from N(0, stddev^2).
std::vector<double> gaussian_noise(std::size_t n, double stddev, std::uint64_t seed);

double bessel_j0(double x);
double bessel_y0(double x);

/// H_0^(1)(x) = J_0(x) + i Y_0(x), x > 0; absolute error below 1e-6.
std::complex<double> hankel1_0(double x);

}  // namespace specreg
