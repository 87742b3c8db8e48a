#include "specreg/isp2d.hpp"

#include <cmath>
#include <future>
#include <thread>
#include <numbers>
#include <sstream>

#include "specreg/errors.hpp"

namespace specreg {

void ISPGeometry::validate() const {
  if (!(r0 > 0.0) || !(r > r0) || !std::isfinite(r)) throw ContractError("ISPGeometry: need 0 < r0 < r");
  if (cells.empty()) throw ContractError("ISPGeometry: no quadrature cells");
  if (sensors.empty()) throw ContractError("ISPGeometry: no sensors");
  for (const auto& c : cells) {
    if (std::hypot(c.center.x, c.center.y) >= r0) {
      throw ContractError("ISPGeometry: cell center outside the source disk");
    }
  }
}

ISPGeometry build_geometry(double r0, double r, std::size_t cells_across, std::size_t sensors) {
  if (!(r0 > 0.0) || !(r > r0) || !std::isfinite(r)) {
    throw ContractError("build_geometry: radii must satisfy 0 < r0 < r");
  }
  if (cells_across < 1) throw ContractError("build_geometry: cells_across must be positive");
  if (sensors < 1) throw ContractError("build_geometry: need at least one sensor");

  ISPGeometry geom;
  geom.r0 = r0;
  geom.r = r;
  geom.cells_across = cells_across;

  const double pixel = 2.0 * r0 / static_cast<double>(cells_across);
  const double area = pixel * pixel;
  for (std::size_t i = 0; i < cells_across; ++i) {
    const double x = -r0 + pixel * (static_cast<double>(i) + 0.5);
    for (std::size_t j = 0; j < cells_across; ++j) {
      const double y = -r0 + pixel * (static_cast<double>(j) + 0.5);
      if (x * x + y * y < r0 * r0) geom.cells.push_back({{x, y}, area});
    }
  }

  geom.sensors.reserve(sensors);
  for (std::size_t m = 0; m < sensors; ++m) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(sensors);
    geom.sensors.push_back({r * std::cos(theta), r * std::sin(theta)});
  }
  geom.validate();
  return geom;
}

FrequencySet FrequencySet::from_index_range(double r0, int j_min, int j_max) {
  if (!(r0 > 0.0)) throw ContractError("FrequencySet: r0 must be positive");
  if (j_min < 1 || j_max < j_min) throw ContractError("FrequencySet: need 1 <= j_min <= j_max");
  FrequencySet f;
  for (int j = j_min; j <= j_max; ++j) f.wavenumbers.push_back(j * std::numbers::pi / r0);
  return f;
}

void FrequencySet::validate() const {
  if (wavenumbers.empty()) throw ContractError("FrequencySet: empty");
  for (std::size_t i = 0; i < wavenumbers.size(); ++i) {
    if (!(wavenumbers[i] > 0.0) || !std::isfinite(wavenumbers[i])) {
      throw ContractError("FrequencySet: wavenumbers must be positive");
    }
    if (i > 0 && !(wavenumbers[i] > wavenumbers[i - 1])) {
      throw ContractError("FrequencySet: wavenumbers must be strictly increasing");
    }
  }
}

std::complex<double> helmholtz_kernel(double k, const Point2& x, const Point2& y) {
  const double d = std::hypot(x.x - y.x, x.y - y.y);
  if (d == 0.0) throw DomainError("helmholtz_kernel: coincident sensor and source point");
  return std::complex<double>(0.0, 0.25) * hankel1_0(k * d);
}

Eigen::MatrixXcd assemble_forward(const ISPGeometry& geom, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ContractError("assemble_forward: wavenumber must be positive");
  const auto m_count = static_cast<Eigen::Index>(geom.sensors.size());
  const auto c_count = static_cast<Eigen::Index>(geom.cells.size());
  Eigen::MatrixXcd u(m_count, c_count);
  for (Eigen::Index c = 0; c < c_count; ++c) {
    const auto& cell = geom.cells[static_cast<std::size_t>(c)];
    for (Eigen::Index m = 0; m < m_count; ++m) {
      u(m, c) = helmholtz_kernel(k, geom.sensors[static_cast<std::size_t>(m)], cell.center) * cell.area;
    }
  }
  return u;
}

JointOperator assemble_joint(const ISPGeometry& geom, const FrequencySet& freqs) {
  geom.validate();
  freqs.validate();
  const double k_max = freqs.wavenumbers.back();
  const double needed = 2.0 * k_max * geom.r / std::numbers::pi;
  if (static_cast<double>(geom.sensors.size()) < needed) {
    std::ostringstream msg;
    msg << "assemble_joint: " << geom.sensors.size() << " sensors undersample k_max=" << k_max
        << " (need at least " << std::ceil(needed) << ")";
    throw ContractError(msg.str());
  }

  const auto m = static_cast<Eigen::Index>(geom.sensors.size());
  const auto c = static_cast<Eigen::Index>(geom.cells.size());
  const auto nf = static_cast<Eigen::Index>(freqs.wavenumbers.size());

  JointOperator joint;
  joint.frequencies = freqs;
  joint.sensors = geom.sensors.size();
  joint.matrix.resize(2 * m * nf, c);

  // Blocks are independent; each task writes a disjoint row range.
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> tasks;
  for (unsigned w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (Eigen::Index f = w; f < nf; f += workers) {
        const Eigen::MatrixXcd u = assemble_forward(geom, freqs.wavenumbers[static_cast<std::size_t>(f)]);
        joint.matrix.middleRows(2 * m * f, m) = u.real();
        joint.matrix.middleRows(2 * m * f + m, m) = u.imag();
      }
    }));
  }
  for (auto& t : tasks) t.get();
  return joint;
}

Eigen::VectorXd stack_real(const std::vector<Eigen::VectorXcd>& blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += 2 * b.size();
  Eigen::VectorXd out(total);
  Eigen::Index pos = 0;
  for (const auto& b : blocks) {
    out.segment(pos, b.size()) = b.real();
    out.segment(pos + b.size(), b.size()) = b.imag();
    pos += 2 * b.size();
  }
  return out;
}

Eigen::VectorXd reconstruct_source(const SingularSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& data,
                                   const FilterSpec& spec) {
  return apply_filtered_inverse_svd(sys, spec, data);
}

Eigen::VectorXd reconstruct_source(const JointOperator& joint, const Eigen::Ref<const Eigen::VectorXd>& data,
                                   const FilterSpec& spec) {
  if (data.size() != joint.matrix.rows()) {
    throw ContractError("reconstruct_source: data length does not match joint operator rows");
  }
  return reconstruct_source(svd(joint.matrix), data, spec);
}

std::vector<SpectrumRow> spectrum_report(const SingularSystem& sys, const Eigen::Ref<const Eigen::VectorXd>& truth) {
  if (truth.size() != sys.cols()) throw ContractError("spectrum_report: truth length does not match columns");
  const Eigen::VectorXd proj = sys.right().transpose() * truth;
  std::vector<SpectrumRow> rows(static_cast<std::size_t>(sys.rank()));
  for (Eigen::Index n = 0; n < sys.rank(); ++n) {
    rows[static_cast<std::size_t>(n)] = {static_cast<std::size_t>(n) + 1, sys.sigma()[n], std::abs(proj[n])};
  }
  return rows;
}

std::vector<SpectrumRow> spectrum_report(const JointOperator& joint, const Eigen::Ref<const Eigen::VectorXd>& truth) {
  return spectrum_report(svd(joint.matrix), truth);
}

Eigen::VectorXd make_ground_truth(const ISPGeometry& geom) {
  const double r0 = geom.r0;
  const Point2 disk_center{0.35 * r0, 0.0};
  const double disk_radius = 0.3 * r0;
  const Point2 bump_center{-0.4 * r0, 0.2 * r0};
  const double bump_width = 0.15 * r0;
  constexpr double bump_amplitude = 0.8;

  Eigen::VectorXd s(static_cast<Eigen::Index>(geom.cells.size()));
  for (std::size_t i = 0; i < geom.cells.size(); ++i) {
    const Point2& p = geom.cells[i].center;
    double v = 0.0;
    if (std::hypot(p.x - disk_center.x, p.y - disk_center.y) <= disk_radius) v += 1.0;
    const double dx = p.x - bump_center.x;
    const double dy = p.y - bump_center.y;
    v += bump_amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * bump_width * bump_width));
    s[static_cast<Eigen::Index>(i)] = v;
  }
  return s;
}

double relative_noise_std(const Eigen::Ref<const Eigen::VectorXd>& data, double noise_ratio) {
  if (data.size() == 0) throw ContractError("relative_noise_std: empty data");
  return noise_ratio * data.norm() / std::sqrt(static_cast<double>(data.size()));
}

Eigen::VectorXd add_relative_noise(const Eigen::Ref<const Eigen::VectorXd>& data, double noise_ratio,
                                   std::uint64_t seed) {
  if (!(noise_ratio >= 0.0)) throw ContractError("add_relative_noise: noise_ratio must be nonnegative");
  Eigen::VectorXd out = data;
  const double stddev = relative_noise_std(data, noise_ratio);
  if (stddev == 0.0) return out;
  const std::vector<double> eps = gaussian_noise(static_cast<std::size_t>(data.size()), stddev, seed);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += eps[static_cast<std::size_t>(i)];
  return out;
}

double relative_error(const Eigen::Ref<const Eigen::VectorXd>& recon, const Eigen::Ref<const Eigen::VectorXd>& truth) {
  if (recon.size() != truth.size()) throw ContractError("relative_error: length mismatch");
  const double denom = truth.norm();
  if (denom == 0.0) throw ContractError("relative_error: truth has zero norm");
  return (recon - truth).norm() / denom;
}

}  // namespace specreg
