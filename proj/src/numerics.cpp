#include "specreg/numerics.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "specreg/errors.hpp"

namespace specreg {

// ---------------------------------------------------------------------------
// DFT (FFTW, any length)

namespace {

// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

ComplexVector run_dft(std::span<const std::complex<double>> in, int sign) {
  if (in.empty()) throw ContractError("dft: length must be at least 1");
  const int n = static_cast<int>(in.size());

  // fftw_malloc guarantees SIMD alignment, so the chosen codelets (and the bits they
  // produce) do not depend on where std::vector happened to place its storage.
  std::unique_ptr<fftw_complex, FftwFree> buf(fftw_alloc_complex(in.size()));
  if (!buf) throw std::bad_alloc();

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, buf.get(), buf.get(), sign, FFTW_ESTIMATE);
  }
  std::memcpy(buf.get(), in.data(), in.size() * sizeof(fftw_complex));
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  ComplexVector out(in.size());
  std::memcpy(static_cast<void*>(out.data()), buf.get(), in.size() * sizeof(fftw_complex));
  return out;
}

}  // namespace

ComplexVector dft_forward(std::span<const std::complex<double>> x) { return run_dft(x, FFTW_FORWARD); }

ComplexVector dft_inverse(std::span<const std::complex<double>> X) {
  ComplexVector out = run_dft(X, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(X.size());
  for (auto& v : out) v *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// SVD

namespace {

SingularSystem svd_tall(const DenseMatrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m <= n) {
    Eigen::BDCSVD<DenseMatrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return SingularSystem(dec.singularValues(), dec.matrixU(), dec.matrixV());
  }
  // A = Q R, R = U_r S V^T  =>  A = (Q [U_r; 0]) S V^T.
  Eigen::HouseholderQR<DenseMatrix> qr(a);
  const DenseMatrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<DenseMatrix> dec(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  DenseMatrix left = DenseMatrix::Zero(m, n);
  left.topRows(n) = dec.matrixU();
  left.applyOnTheLeft(qr.householderQ());
  return SingularSystem(dec.singularValues(), std::move(left), dec.matrixV());
}

}  // namespace

SingularSystem svd(const DenseMatrix& a) {
  if (a.rows() < 1 || a.cols() < 1) throw ContractError("svd: matrix must be nonempty");
  if (!a.allFinite()) throw ContractError("svd: matrix has non-finite entries");
  if (a.rows() >= a.cols()) return svd_tall(a);
  const SingularSystem t = svd_tall(a.transpose());
  return SingularSystem(t.sigma(), t.right(), t.left());
}

// ---------------------------------------------------------------------------
// Gaussian sampling

double NormalSampler::uniform_open() {
  // 53 random bits -> k * 2^-53 with k in [0, 2^53); shift to (0, 1] so log() is finite.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 1.0) * 0x1.0p-53;
}

double NormalSampler::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<double> gaussian_noise(std::size_t n, double stddev, std::uint64_t seed) {
  if (n == 0) throw ContractError("gaussian_noise: n must be at least 1");
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw ContractError("gaussian_noise: stddev must be positive and finite");
  }
  NormalSampler sampler(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = stddev * sampler.next();
  return out;
}

// ---------------------------------------------------------------------------
// Bessel functions of order zero: Abramowitz & Stegun 9.4.1-9.4.3.
// Polynomial in (x/3)^2 for x <= 3, modulus/phase form for x > 3.

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

double j0_small(double x) {
  const double t = (x / 3.0) * (x / 3.0);
  return 1.0 + t * (-2.2499997 + t * (1.2656208 + t * (-0.3163866 + t * (0.0444479 +
               t * (-0.0039444 + t * 0.0002100)))));
}

double y0_small_regular(double x) {
  const double t = (x / 3.0) * (x / 3.0);
  return 0.36746691 + t * (0.60559366 + t * (-0.74350384 + t * (0.25300117 + t * (-0.04261214 +
                      t * (0.00427916 + t * -0.00024846)))));
}

struct ModulusPhase {
  double modulus;
  double phase;
};

ModulusPhase j0_modulus_phase(double x) {
  const double t = 3.0 / x;
  const double f0 = 0.79788456 + t * (-0.00000077 + t * (-0.00552740 + t * (-0.00009512 +
                    t * (0.00137237 + t * (-0.00072805 + t * 0.00014476)))));
  const double theta = x - 0.78539816 + t * (-0.04166397 + t * (-0.00003954 + t * (0.00262573 +
                       t * (-0.00054125 + t * (-0.00029333 + t * 0.00013558)))));
  return {f0 / std::sqrt(x), theta};
}

void check_positive(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be positive and finite");
  }
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= 3.0) return j0_small(x);
  const auto [mod, phase] = j0_modulus_phase(x);
  return mod * std::cos(phase);
}

double bessel_y0(double x) {
  check_positive(x, "bessel_y0");
  if (x <= 3.0) return kTwoOverPi * std::log(0.5 * x) * j0_small(x) + y0_small_regular(x);
  const auto [mod, phase] = j0_modulus_phase(x);
  return mod * std::sin(phase);
}

std::complex<double> hankel1_0(double x) {
  check_positive(x, "hankel1_0");
  if (x <= 3.0) {
    const double j0 = j0_small(x);
    return {j0, kTwoOverPi * std::log(0.5 * x) * j0 + y0_small_regular(x)};
  }
  const auto [mod, phase] = j0_modulus_phase(x);
  return std::polar(mod, phase);
}

}  // namespace specreg
