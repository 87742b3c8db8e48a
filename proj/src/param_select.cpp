#include "specreg/param_select.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specreg/errors.hpp"

namespace specreg {

double expected_noise_norm(double noise_std, std::size_t n) {
  if (n == 0) throw ContractError("expected_noise_norm: sample count must be positive");
  if (!(noise_std >= 0.0)) throw ContractError("expected_noise_norm: noise_std must be nonnegative");
  return noise_std * std::sqrt(static_cast<double>(n));
}

double MorozovConfig::threshold() const { return safety * expected_noise_norm(noise_std, n); }

void MorozovConfig::validate() const {
  if (!(safety >= 1.0)) throw ContractError("MorozovConfig: safety factor must be >= 1");
  if (!(noise_std > 0.0)) throw ContractError("MorozovConfig: noise_std must be positive");
  if (n == 0) throw ContractError("MorozovConfig: sample count must be positive");
  if (!(alpha_lo > 0.0) || !(alpha_lo < alpha_hi) || !std::isfinite(alpha_hi)) {
    throw ContractError("MorozovConfig: need 0 < alpha_lo < alpha_hi");
  }
  if (!(tol > 0.0)) throw ContractError("MorozovConfig: tol must be positive");
}

void check_nondecreasing(const AlphaTrace& trace, double slack) {
  AlphaTrace sorted = trace;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].second < sorted[i - 1].second - slack) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "residual decreased from " << sorted[i - 1].second << " at alpha=" << sorted[i - 1].first
          << " to " << sorted[i].second << " at alpha=" << sorted[i].first;
      throw MonotonicityError(msg.str());
    }
  }
}

MorozovResult morozov_alpha(const ResidualFn& residual, const MorozovConfig& cfg) {
  cfg.validate();
  MorozovResult result;
  result.threshold = cfg.threshold();
  const double thr = result.threshold;

  auto eval = [&](double alpha) {
    const double r = residual(alpha);
    result.trace.emplace_back(alpha, r);
    return r;
  };

  const double r_lo = eval(cfg.alpha_lo);
  const double r_hi = eval(cfg.alpha_hi);
  if (r_lo > thr) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "Morozov bracket violated: residual(alpha_lo=" << cfg.alpha_lo << ")=" << r_lo
        << " exceeds threshold " << thr << " (residual(alpha_hi=" << cfg.alpha_hi << ")=" << r_hi << ")";
    throw BracketError(msg.str(), r_lo, r_hi);
  }

  // Rounding-level slack: at tiny alpha the residual is at the FFT noise floor.
  const double slack = 1e-12 * thr;
  if (r_hi <= thr) {
    check_nondecreasing(result.trace, slack);
    result.alpha = cfg.alpha_hi;
    result.residual = r_hi;
    result.saturated = true;
    return result;
  }

  double lo = cfg.alpha_lo;
  double hi = cfg.alpha_hi;
  double r_at_lo = r_lo;
  while (hi > lo * (1.0 + cfg.tol)) {
    const double mid = std::sqrt(lo * hi);
    const double r = eval(mid);
    if (r <= thr) {
      lo = mid;
      r_at_lo = r;
    } else {
      hi = mid;
    }
  }
  check_nondecreasing(result.trace, slack);
  result.alpha = lo;
  result.residual = r_at_lo;
  return result;
}

// ---------------------------------------------------------------------------

SweepConfig SweepConfig::log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 1) throw ContractError("SweepConfig: need 0 < lo < hi, count >= 1");
  SweepConfig cfg;
  cfg.alpha_grid.resize(count);
  if (count == 1) {
    cfg.alpha_grid[0] = lo;
    return cfg;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    cfg.alpha_grid[i] = std::exp(a + t * (b - a));
  }
  return cfg;
}

void SweepConfig::validate() const {
  if (alpha_grid.empty()) throw ContractError("SweepConfig: alpha grid is empty");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > 0.0) || !std::isfinite(alpha_grid[i])) {
      throw ContractError("SweepConfig: alpha grid entries must be positive and finite");
    }
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) {
      throw ContractError("SweepConfig: alpha grid must be strictly increasing");
    }
  }
}

SweepResult optimal_alpha(const ErrorFn& error, const SweepConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.trace.reserve(cfg.alpha_grid.size());
  bool first = true;
  for (double alpha : cfg.alpha_grid) {
    const double e = error(alpha);
    result.trace.emplace_back(alpha, e);
    if (first || e <= result.error) {
      result.alpha = alpha;
      result.error = e;
      first = false;
    }
  }
  return result;
}

}  // namespace specreg
