#pragma once

// Choice of the regularization parameter alpha: Morozov's discrepancy principle
// (largest alpha whose residual stays under safety * E||noise||) and an oracle sweep
// that picks the alpha with the smallest reconstruction error.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace specreg {

/// (alpha, value) pairs in evaluation order.
using AlphaTrace = std::vector<std::pair<double, double>>;

/// noise_std * sqrt(n), used as E||eps||_2.
double expected_noise_norm(double noise_std, std::size_t n);

struct MorozovConfig {
  double safety = 1.1;
  double noise_std = 0.0;
  std::size_t n = 0;
  double alpha_lo = 1e-8;
  double alpha_hi = 10.0;
  double tol = 1e-3;  ///< bisection stops once alpha_hi / alpha_lo <= 1 + tol

  double threshold() const;
  void validate() const;
};

struct MorozovResult {
  double alpha = 0.0;
  double residual = 0.0;
  double threshold = 0.0;
  bool saturated = false;  ///< residual(alpha_hi) already met the threshold
  AlphaTrace trace;
};

using ResidualFn = std::function<double(double alpha)>;

/// sup{alpha in [lo, hi] : residual(alpha) <= threshold} by bisection in log(alpha).
/// Throws BracketError if residual(lo) > threshold and MonotonicityError if the
/// evaluated residuals are not nondecreasing in alpha.
MorozovResult morozov_alpha(const ResidualFn& residual, const MorozovConfig& cfg);

struct SweepConfig {
  std::vector<double> alpha_grid;

  /// `count` log-spaced points on [lo, hi].
  static SweepConfig log_spaced(double lo = 1e-8, double hi = 10.0, std::size_t count = 200);
  void validate() const;
};

struct SweepResult {
  double alpha = 0.0;
  double error = 0.0;
  AlphaTrace trace;
};

using ErrorFn = std::function<double(double alpha)>;

/// Grid argmin of error(alpha); ties go to the larger alpha.
SweepResult optimal_alpha(const ErrorFn& error, const SweepConfig& cfg);

/// Throws MonotonicityError unless values are nondecreasing when sorted by alpha.
/// Decreases up to `slack` (absolute) are tolerated as rounding.
void check_nondecreasing(const AlphaTrace& trace, double slack);

}  // namespace specreg
