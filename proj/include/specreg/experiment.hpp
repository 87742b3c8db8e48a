#pragma once

// Config-driven experiment runner: reads a key = value config, runs the filter-curve,
// 1D deconvolution or 2D source experiment, and writes CSV tables plus a JSON sidecar.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specreg/deconv1d.hpp"

namespace specreg {

inline constexpr const char* kVersion = "specreg 1.0.0";

enum class ExperimentKind { Filters, Deconv1d, Isp2d };

std::string to_string(ExperimentKind kind);

struct AlphaRule {
  enum class Kind { Morozov, Optimal, Fixed };
  Kind kind = Kind::Optimal;
  double value = 0.0;  ///< alpha for Kind::Fixed

  static AlphaRule parse(const std::string& text);
  /// "morozov", "optimal" or "fixed:<alpha>"
  std::string name() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Deconv1d;
  std::uint64_t seed = 1;
  std::vector<double> taus{0.0, 2.0, 10.0, 100.0};
  std::vector<AlphaRule> rules{{AlphaRule::Kind::Morozov, 0.0}, {AlphaRule::Kind::Optimal, 0.0}};
  std::string out_dir = "out";

  // alpha search; for isp2d the bounds are multiples of sigma_1^2
  std::optional<double> alpha_min;
  std::optional<double> alpha_max;
  std::size_t alpha_points = 200;
  double morozov_safety = 1.1;
  double morozov_tol = 1e-3;

  // filters
  std::vector<double> filter_alphas{0.005, 0.05};
  double sigma_min = 1e-3;
  double sigma_max = 10.0;
  std::size_t sigma_points = 400;

  // deconv1d
  TestFunctionId function = TestFunctionId::F1;
  std::size_t n = 1001;
  double s_blur = 0.1;
  double noise_std = 0.05;
  std::size_t oversample = 10;

  // isp2d
  double r0 = 0.99;
  double r = 1.0;
  std::size_t cells_across = 48;
  std::size_t sensors = 128;
  int j_min = 2;
  int j_max = 30;
  double noise_ratio = 0.01;

  double resolved_alpha_min() const;
  double resolved_alpha_max() const;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  /// Canonical key = value text; parse_config(canonical()) reproduces the config.
  std::string canonical() const;
  /// 64-bit FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ReportRow {
  double tau = 0.0;
  std::string rule;
  double alpha = 0.0;
  double relative_error = 0.0;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string code_version = kVersion;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::Deconv1d;
  std::vector<ReportRow> rows;
  Provenance provenance;
};

struct RunOptions {
  std::filesystem::path out_dir;
  bool trace = false;
  unsigned jobs = 1;
};

/// Runs the configured experiment and writes its artifacts into options.out_dir.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options);

/// %.17g
std::string format_number(double v);

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport read_report_csv(const std::filesystem::path& path);

struct RowDelta {
  double tau = 0.0;
  std::string rule;
  double alpha_abs = 0.0;
  double alpha_rel = 0.0;
  double error_abs = 0.0;
  double error_rel = 0.0;

  bool nonzero() const { return alpha_abs != 0.0 || error_abs != 0.0; }
};

struct ReportDiff {
  std::vector<RowDelta> rows;
  double max_abs = 0.0;
  double max_rel = 0.0;

  std::size_t nonzero_rows() const;
};

/// Row-by-row deltas; throws ContractError unless both reports list the same (tau, rule) rows.
ReportDiff compare_reports(const ExperimentReport& a, const ExperimentReport& b);

void print_diff(const ReportDiff& diff, std::ostream& out);

}  // namespace specreg
