#pragma once

// Multi-frequency inverse source problem for the 2D Helmholtz equation. A source supported in
// the disk of radius r0 radiates u_k(x) = int Phi_k(x - y) s(y) dy with Phi_k = (i/4) H_0^(1)(k|.|);
// the field is sampled at sensors on the circle of radius r > r0 for several wavenumbers.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "specreg/filter.hpp"
#include "specreg/numerics.hpp"

namespace specreg {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct QuadratureCell {
  Point2 center;
  double area = 0.0;
};

struct ISPGeometry {
  double r0 = 0.0;  ///< source disk radius
  double r = 0.0;   ///< sensor circle radius
  std::size_t cells_across = 0;
  std::vector<QuadratureCell> cells;
  std::vector<Point2> sensors;

  void validate() const;
};

/// Pixel grid over [-r0, r0]^2 keeping pixels whose centers lie strictly inside the disk,
/// plus `sensors` points equispaced in angle on the circle of radius r (first at angle 0).
ISPGeometry build_geometry(double r0, double r, std::size_t cells_across, std::size_t sensors);

/// Wavenumbers k_j = j pi / r0, strictly increasing.
struct FrequencySet {
  std::vector<double> wavenumbers;

  static FrequencySet from_index_range(double r0, int j_min, int j_max);
  void validate() const;
};

/// Phi_k(x - y) = (i/4) H_0^(1)(k |x - y|). Symmetric in its arguments.
std::complex<double> helmholtz_kernel(double k, const Point2& x, const Point2& y);

/// M x C matrix with entries (i/4) H_0^(1)(k |x_m - y_c|) * area_c.
Eigen::MatrixXcd assemble_forward(const ISPGeometry& geom, double k);

/// Real joint system: for each k (ascending), M rows of Re(U_k) followed by M rows of Im(U_k).
struct JointOperator {
  DenseMatrix matrix;
  FrequencySet frequencies;
  std::size_t sensors = 0;
};

/// Requires the sampling condition M >= 2 k_max r / pi.
JointOperator assemble_joint(const ISPGeometry& geom, const FrequencySet& freqs);

/// Split per-frequency complex fields into the stacked [Re; Im] layout of JointOperator.
Eigen::VectorXd stack_real(const std::vector<Eigen::VectorXcd>& blocks);

Eigen::VectorXd reconstruct_source(const SingularSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& data,
                                   const FilterSpec& spec);
Eigen::VectorXd reconstruct_source(const JointOperator& joint, const Eigen::Ref<const Eigen::VectorXd>& data,
                                   const FilterSpec& spec);

struct SpectrumRow {
  std::size_t index = 0;  ///< 1-based
  double sigma = 0.0;
  double projection = 0.0;  ///< |<v_n, truth>|
};

std::vector<SpectrumRow> spectrum_report(const SingularSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& truth);
std::vector<SpectrumRow> spectrum_report(const JointOperator& joint, const Eigen::Ref<const Eigen::VectorXd>& truth);

/// Unit disk of radius 0.3 r0 at (0.35 r0, 0) plus a Gaussian bump (amplitude 0.8, width 0.15 r0)
/// at (-0.4 r0, 0.2 r0), evaluated at cell centers.
Eigen::VectorXd make_ground_truth(const ISPGeometry& geom);

/// data + N(0, s^2) with s = noise_ratio * ||data||_2 / sqrt(len).
Eigen::VectorXd add_relative_noise(const Eigen::Ref<const Eigen::VectorXd>& data, double noise_ratio,
                                   std::uint64_t seed);

/// Per-entry standard deviation used by add_relative_noise.
double relative_noise_std(const Eigen::Ref<const Eigen::VectorXd>& data, double noise_ratio);

double relative_error(const Eigen::Ref<const Eigen::VectorXd>& recon, const Eigen::Ref<const Eigen::VectorXd>& truth);

}  // namespace specreg
