#include "specreg/deconv1d.hpp"

#include <cmath>
#include <sstream>

#include "specreg/errors.hpp"

namespace specreg {

Grid1D::Grid1D(std::size_t n) : n_(n) {
  if (n == 0) throw ContractError("Grid1D: sample count must be positive");
}

double Grid1D::offset(std::size_t j) const noexcept {
  const double n = static_cast<double>(n_);
  const double jj = static_cast<double>(j);
  return 2 * j < n_ ? 2.0 * jj / n : 2.0 * (jj - n) / n;
}

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = point(j);
  return xs;
}

Signal1D::Signal1D(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw ContractError("Signal1D: value count does not match grid");
  for (double x : values) {
    if (!std::isfinite(x)) throw ContractError("Signal1D: values must be finite");
  }
}

// ---------------------------------------------------------------------------

BoxKernel::BoxKernel(double s_blur) : s_blur_(s_blur) {
  if (!(s_blur > 0.0) || !std::isfinite(s_blur) || s_blur >= 1.0) {
    throw ContractError("BoxKernel: s_blur must lie in (0, 1)");
  }
}

Signal1D BoxKernel::sample(const Grid1D& grid) const {
  const double edge = s_blur_ * (1.0 + 1e-12);
  std::vector<double> v(grid.size(), 0.0);
  std::size_t count = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (std::abs(grid.offset(j)) <= edge) {
      v[j] = 1.0;
      ++count;
    }
  }
  const double c = 1.0 / (grid.spacing() * static_cast<double>(count));
  for (double& x : v) x *= c;
  return {grid, std::move(v)};
}

// ---------------------------------------------------------------------------

TestFunctionId parse_test_function(const std::string& name) {
  if (name == "F1" || name == "f1") return TestFunctionId::F1;
  if (name == "F2" || name == "f2") return TestFunctionId::F2;
  if (name == "F3" || name == "f3") return TestFunctionId::F3;
  throw ContractError("unknown test function '" + name + "' (expected F1, F2 or F3)");
}

std::string to_string(TestFunctionId id) {
  switch (id) {
    case TestFunctionId::F1: return "F1";
    case TestFunctionId::F2: return "F2";
    case TestFunctionId::F3: return "F3";
  }
  return "?";
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double TestFunction::operator()(double x) const {
  switch (id_) {
    case TestFunctionId::F1:
      return std::max(0.0, 1.0 - std::abs(x) / 0.5);
    case TestFunctionId::F2:
      return (x >= -0.4 && x < 0.3) ? (x + 0.4) / 0.7 : 0.0;
    case TestFunctionId::F3: {
      constexpr double width = 0.15;
      const double window = smooth_step((0.9 - std::abs(x)) / 0.2);
      return window == 0.0 ? 0.0 : std::exp(-x * x / (2.0 * width * width)) * window;
    }
  }
  return 0.0;
}

Signal1D TestFunction::sample(const Grid1D& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = (*this)(grid.point(j));
  return {grid, std::move(v)};
}

TestFunction make_test_function(TestFunctionId id) { return TestFunction(id); }

// ---------------------------------------------------------------------------

namespace {

ComplexVector to_complex(const std::vector<double>& v) { return ComplexVector(v.begin(), v.end()); }

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Signal1D discrete_convolution(const Signal1D& f, const Signal1D& gamma) {
  if (!(f.grid == gamma.grid)) throw ContractError("discrete_convolution: grids differ");
  const ComplexVector fh = dft_forward(to_complex(f.values));
  ComplexVector gh = dft_forward(to_complex(gamma.values));
  for (std::size_t k = 0; k < gh.size(); ++k) gh[k] *= fh[k];
  const ComplexVector g = dft_inverse(gh);
  const double h = f.grid.spacing();
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = h * g[j].real();
  return {f.grid, std::move(out)};
}

Measurement synthesize_measurement(const TestFunction& tf, const BoxKernel& kernel, std::size_t n,
                                   double noise_std, std::uint64_t seed, std::size_t oversample) {
  if (n < 2) throw ContractError("synthesize_measurement: N must be at least 2");
  if (oversample < 1) throw ContractError("synthesize_measurement: oversample must be at least 1");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ContractError("synthesize_measurement: noise_std must be nonnegative");
  }
  const Grid1D fine(n * oversample);
  const Signal1D fine_g = discrete_convolution(tf.sample(fine), kernel.sample(fine));

  const Grid1D coarse(n);
  std::vector<double> clean(n);
  for (std::size_t j = 0; j < n; ++j) clean[j] = fine_g.values[j * oversample];

  std::vector<double> noisy = clean;
  if (noise_std > 0.0) {
    const std::vector<double> eps = gaussian_noise(n, noise_std, seed);
    for (std::size_t j = 0; j < n; ++j) noisy[j] += eps[j];
  }
  return {Signal1D(coarse, std::move(clean)), Signal1D(coarse, std::move(noisy))};
}

// ---------------------------------------------------------------------------

namespace {

DiagonalMultiplier kernel_multiplier(const Signal1D& kernel) {
  ComplexVector m = dft_forward(to_complex(kernel.values));
  const double h = kernel.grid.spacing();
  for (auto& v : m) v *= h;
  return DiagonalMultiplier(std::move(m), kMultiplierFlush);
}

}  // namespace

Deconvolver::Deconvolver(const Signal1D& noisy, const BoxKernel& kernel)
    : noisy_(noisy), kernel_(kernel.sample(noisy.grid)), multiplier_(kernel_multiplier(kernel_)) {
  data_hat_ = dft_forward(to_complex(noisy_.values));
  const double h = noisy_.grid.spacing();
  for (auto& v : data_hat_) v *= h;
}

Signal1D Deconvolver::reconstruct(const FilterSpec& spec) const {
  const ComplexVector f_hat = apply_filtered_inverse_diagonal(multiplier_, spec, data_hat_);
  const ComplexVector f = dft_inverse(f_hat);
  const double inv_h = 1.0 / noisy_.grid.spacing();

  std::vector<double> re(f.size());
  double re_sq = 0.0;
  double im_sq = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    re[j] = inv_h * f[j].real();
    re_sq += re[j] * re[j];
    im_sq += (inv_h * f[j].imag()) * (inv_h * f[j].imag());
  }
  if (std::sqrt(im_sq) > 1e-10 * std::sqrt(re_sq) && im_sq > 0.0) {
    std::ostringstream msg;
    msg << "reconstruct: imaginary residue " << std::sqrt(im_sq) << " exceeds 1e-10 of real part "
        << std::sqrt(re_sq);
    throw std::logic_error(msg.str());
  }
  return {noisy_.grid, std::move(re)};
}

double Deconvolver::residual_norm(const Signal1D& reconstruction) const {
  const Signal1D blurred = discrete_convolution(reconstruction, kernel_);
  double s = 0.0;
  for (std::size_t j = 0; j < blurred.values.size(); ++j) {
    const double d = blurred.values[j] - noisy_.values[j];
    s += d * d;
  }
  return std::sqrt(s);
}

double Deconvolver::residual_norm(const FilterSpec& spec) const { return residual_norm(reconstruct(spec)); }

Signal1D reconstruct(const Signal1D& noisy, const BoxKernel& kernel, const FilterSpec& spec) {
  return Deconvolver(noisy, kernel).reconstruct(spec);
}

double relative_error(const Signal1D& recon, const Signal1D& truth) {
  if (!(recon.grid == truth.grid)) throw ContractError("relative_error: grids differ");
  const double denom = l2_norm(truth.values);
  if (denom == 0.0) throw ContractError("relative_error: truth has zero norm");
  double s = 0.0;
  for (std::size_t j = 0; j < truth.values.size(); ++j) {
    const double d = recon.values[j] - truth.values[j];
    s += d * d;
  }
  return std::sqrt(s) / denom;
}

}  // namespace specreg
