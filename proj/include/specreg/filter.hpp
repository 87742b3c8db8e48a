#pragma once

// Spectral filter family q_tau(alpha, sigma) = 1 / (1 + (sqrt(alpha)/sigma)^(2+tau)).
// tau = 0 is Tikhonov regularization, tau -> infinity approaches the spectral cutoff.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace specreg {

enum class FilterKind {
  Interpolating,  ///< q_tau, the one-parameter interpolating family
  TikhonovExact,  ///< sigma^2 / (alpha + sigma^2)
  CutoffExact,    ///< step: 1 above sqrt(alpha), 1/2 at it, 0 below
};

/// Filter parameters. Construction validates alpha > 0 and tau >= 0.
class FilterSpec {
public:
  FilterSpec(double tau, double alpha, FilterKind kind = FilterKind::Interpolating);

  static FilterSpec interpolating(double tau, double alpha) { return {tau, alpha}; }
  static FilterSpec tikhonov(double alpha) { return {0.0, alpha, FilterKind::TikhonovExact}; }
  static FilterSpec cutoff(double alpha) { return {0.0, alpha, FilterKind::CutoffExact}; }

  double tau() const noexcept { return tau_; }
  double alpha() const noexcept { return alpha_; }
  FilterKind kind() const noexcept { return kind_; }

  FilterSpec with_alpha(double alpha) const { return {tau_, alpha, kind_}; }

private:
  double tau_;
  double alpha_;
  FilterKind kind_;
};

/// Exponents of (sqrt(alpha)/sigma)^(2+tau) above this flush q to zero.
inline constexpr double kFilterExponentFlush = 700.0;

/// q(alpha, sigma). Throws DomainError for nonpositive or non-finite sigma.
double filter_value(const FilterSpec& spec, double sigma);

/// sigma^-1 q(alpha, sigma): the multiplier applied to a data coefficient.
double filter_gain(const FilterSpec& spec, double sigma);

/// Diagonal entry sqrt(alpha) (sqrt(alpha)/sigma)^(tau/2) of the penalty operator H_alpha
/// whose normal equations reproduce q_tau. For CutoffExact the limit is returned
/// (0 above sqrt(alpha), +inf below).
double penalty_multiplier(const FilterSpec& spec, double sigma);

/// Singular triplets of a discretized operator, truncated at sigma < kRelativeRankFloor * sigma_1.
class SingularSystem {
public:
  static constexpr double kRelativeRankFloor = 1e-12;

  /// `left` is rows x r, `right` is cols x r with orthonormal columns; sigma nonincreasing.
  SingularSystem(Eigen::VectorXd sigma, Eigen::MatrixXd left, Eigen::MatrixXd right);

  const Eigen::VectorXd& sigma() const noexcept { return sigma_; }
  const Eigen::MatrixXd& left() const noexcept { return left_; }
  const Eigen::MatrixXd& right() const noexcept { return right_; }

  Eigen::Index rank() const noexcept { return sigma_.size(); }
  Eigen::Index rows() const noexcept { return left_.rows(); }
  Eigen::Index cols() const noexcept { return right_.rows(); }

  /// max of ||L^T L - I||_F and ||R^T R - I||_F.
  double orthonormality_defect() const;

  /// left * diag(sigma) * right^T
  Eigen::MatrixXd reconstruct() const;

private:
  Eigen::VectorXd sigma_;
  Eigen::MatrixXd left_;
  Eigen::MatrixXd right_;
};

/// Sum_n sigma_n^-1 q(alpha, sigma_n) <u_n, data> v_n.
Eigen::VectorXd apply_filtered_inverse_svd(const SingularSystem& sys, const FilterSpec& spec,
                                           const Eigen::Ref<const Eigen::VectorXd>& data);

/// Same as apply_filtered_inverse_svd but starting from precomputed coefficients left^T data.
Eigen::VectorXd apply_filtered_inverse_coefficients(const SingularSystem& sys, const FilterSpec& spec,
                                                    const Eigen::Ref<const Eigen::VectorXd>& coeffs);

/// Complex diagonal operator, e.g. the Fourier multiplier of a convolution.
/// Entries with |m| <= relative_floor * max|m| (or exactly zero) are rejected.
class DiagonalMultiplier {
public:
  explicit DiagonalMultiplier(std::vector<std::complex<double>> values, double relative_floor = 0.0);

  const std::vector<std::complex<double>>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

private:
  std::vector<std::complex<double>> values_;
};

/// out_k = q(alpha, |m_k|) / m_k * data_hat_k. The modulus feeds the filter, the phase is inverted exactly.
std::vector<std::complex<double>> apply_filtered_inverse_diagonal(
    const DiagonalMultiplier& mult, const FilterSpec& spec, std::span<const std::complex<double>> data_hat);

}  // namespace specreg
