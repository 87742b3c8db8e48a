#include "specreg/filter.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "specreg/errors.hpp"

namespace specreg {

namespace {

void check_sigma(double sigma) {
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    std::ostringstream msg;
    msg << "filter argument sigma must be positive and finite, got " << sigma;
    throw DomainError(msg.str());
  }
}

// log(sqrt(alpha) / sigma)
double log_ratio(double alpha, double sigma) { return 0.5 * std::log(alpha) - std::log(sigma); }

}  // namespace

FilterSpec::FilterSpec(double tau, double alpha, FilterKind kind) : tau_(tau), alpha_(alpha), kind_(kind) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw ContractError("FilterSpec: alpha must be positive and finite");
  }
  if (!(tau >= 0.0) || std::isnan(tau)) {
    throw ContractError("FilterSpec: tau must be nonnegative");
  }
  if (kind != FilterKind::Interpolating) tau_ = 0.0;
}

double filter_value(const FilterSpec& spec, double sigma) {
  check_sigma(sigma);
  const double alpha = spec.alpha();
  switch (spec.kind()) {
    case FilterKind::Interpolating: {
      const double exponent = (2.0 + spec.tau()) * log_ratio(alpha, sigma);
      if (exponent > kFilterExponentFlush) return 0.0;
      return 1.0 / (1.0 + std::exp(exponent));
    }
    case FilterKind::TikhonovExact: {
      const double s2 = sigma * sigma;
      return s2 / (alpha + s2);
    }
    case FilterKind::CutoffExact: {
      const double root = std::sqrt(alpha);
      if (sigma > root) return 1.0;
      if (sigma == root) return 0.5;
      return 0.0;
    }
  }
  return 0.0;
}

double filter_gain(const FilterSpec& spec, double sigma) { return filter_value(spec, sigma) / sigma; }

double penalty_multiplier(const FilterSpec& spec, double sigma) {
  check_sigma(sigma);
  const double alpha = spec.alpha();
  switch (spec.kind()) {
    case FilterKind::Interpolating:
    case FilterKind::TikhonovExact:
      return std::exp(0.5 * std::log(alpha) + 0.5 * spec.tau() * log_ratio(alpha, sigma));
    case FilterKind::CutoffExact: {
      const double root = std::sqrt(alpha);
      if (sigma > root) return 0.0;
      if (sigma == root) return root;
      return std::numeric_limits<double>::infinity();
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

SingularSystem::SingularSystem(Eigen::VectorXd sigma, Eigen::MatrixXd left, Eigen::MatrixXd right) {
  const Eigen::Index r = sigma.size();
  if (left.cols() != r || right.cols() != r) {
    throw ContractError("SingularSystem: left/right column counts must equal the number of singular values");
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!std::isfinite(sigma[i]) || sigma[i] < 0.0) {
      throw ContractError("SingularSystem: singular values must be finite and nonnegative");
    }
    if (i > 0 && sigma[i] > sigma[i - 1]) {
      throw ContractError("SingularSystem: singular values must be sorted nonincreasing");
    }
  }
  Eigen::Index keep = 0;
  if (r > 0 && sigma[0] > 0.0) {
    const double floor = kRelativeRankFloor * sigma[0];
    while (keep < r && sigma[keep] >= floor) ++keep;
  }
  sigma_ = sigma.head(keep);
  left_ = left.leftCols(keep);
  right_ = right.leftCols(keep);
}

double SingularSystem::orthonormality_defect() const {
  const auto eye = Eigen::MatrixXd::Identity(rank(), rank());
  const double dl = (left_.transpose() * left_ - eye).norm();
  const double dr = (right_.transpose() * right_ - eye).norm();
  return std::max(dl, dr);
}

Eigen::MatrixXd SingularSystem::reconstruct() const {
  return left_ * sigma_.asDiagonal() * right_.transpose();
}

Eigen::VectorXd apply_filtered_inverse_coefficients(const SingularSystem& sys, const FilterSpec& spec,
                                                    const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  if (coeffs.size() != sys.rank()) {
    throw ContractError("apply_filtered_inverse_coefficients: coefficient count does not match rank");
  }
  Eigen::VectorXd scaled(sys.rank());
  for (Eigen::Index n = 0; n < sys.rank(); ++n) {
    scaled[n] = filter_gain(spec, sys.sigma()[n]) * coeffs[n];
  }
  return sys.right() * scaled;
}

Eigen::VectorXd apply_filtered_inverse_svd(const SingularSystem& sys, const FilterSpec& spec,
                                           const Eigen::Ref<const Eigen::VectorXd>& data) {
  if (data.size() != sys.rows()) {
    std::ostringstream msg;
    msg << "apply_filtered_inverse_svd: data length " << data.size() << " != operator rows " << sys.rows();
    throw ContractError(msg.str());
  }
  const Eigen::VectorXd coeffs = sys.left().transpose() * data;
  return apply_filtered_inverse_coefficients(sys, spec, coeffs);
}

// ---------------------------------------------------------------------------

DiagonalMultiplier::DiagonalMultiplier(std::vector<std::complex<double>> values, double relative_floor)
    : values_(std::move(values)) {
  double peak = 0.0;
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ContractError("DiagonalMultiplier: entries must be finite");
    }
    peak = std::max(peak, std::abs(v));
  }
  const double floor = relative_floor * peak;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double mag = std::abs(values_[k]);
    if (mag == 0.0 || mag <= floor) {
      std::ostringstream msg;
      msg << "DiagonalMultiplier: entry " << k << " has modulus " << mag
          << " (floor " << floor << "); operator is not injective";
      throw SingularMultiplierError(msg.str(), k);
    }
  }
}

std::vector<std::complex<double>> apply_filtered_inverse_diagonal(
    const DiagonalMultiplier& mult, const FilterSpec& spec, std::span<const std::complex<double>> data_hat) {
  if (data_hat.size() != mult.size()) {
    throw ContractError("apply_filtered_inverse_diagonal: length mismatch");
  }
  std::vector<std::complex<double>> out(data_hat.size());
  const auto& m = mult.values();
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double q = filter_value(spec, std::abs(m[k]));
    out[k] = (q / m[k]) * data_hat[k];
  }
  return out;
}

}  // namespace specreg
