#include "specreg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "specreg/errors.hpp"
#include "specreg/isp2d.hpp"
#include "specreg/param_select.hpp"

namespace specreg {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting helpers

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "expected a number, got '" + t + "'");
  }
  return v;
}

template <typename Int>
Int parse_integer(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "expected an integer, got '" + t + "'");
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    if (!item.empty()) out.push_back(parse_double(field, item));
  }
  return out;
}

// Filesystem-friendly label for one (tau, rule) run.
std::string run_label(double tau, const AlphaRule& rule) {
  std::string r = rule.name();
  std::replace(r.begin(), r.end(), ':', '-');
  return "tau" + format_short(tau) + "_" + r;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void write_trace_csv(const fs::path& path, const AlphaTrace& trace, const char* value_name) {
  auto out = open_output(path);
  out << "alpha," << value_name << '\n';
  for (const auto& [a, v] : trace) out << format_number(a) << ',' << format_number(v) << '\n';
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

// Runs task(i) for i in [0, count) on up to `jobs` threads; results land at their index.
template <typename Result>
std::vector<Result> run_indexed(std::size_t count, unsigned jobs, const std::function<Result(std::size_t)>& task) {
  std::vector<Result> results(count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = task(i);
    return results;
  }
  for (std::size_t start = 0; start < count; start += jobs) {
    std::vector<std::future<Result>> batch;
    for (std::size_t i = start; i < std::min(count, start + jobs); ++i) {
      batch.push_back(std::async(std::launch::async, task, i));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
  }
  return results;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Filters: return "filters";
    case ExperimentKind::Deconv1d: return "deconv1d";
    case ExperimentKind::Isp2d: return "isp2d";
  }
  return "?";
}

AlphaRule AlphaRule::parse(const std::string& text) {
  const std::string t = trim(text);
  if (t == "morozov") return {Kind::Morozov, 0.0};
  if (t == "optimal") return {Kind::Optimal, 0.0};
  if (t.rfind("fixed:", 0) == 0) {
    const double v = parse_double("rules", t.substr(6));
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("rules", "fixed alpha must be positive");
    return {Kind::Fixed, v};
  }
  throw ConfigError("rules", "unknown alpha rule '" + t + "' (morozov | optimal | fixed:<alpha>)");
}

std::string AlphaRule::name() const {
  switch (kind) {
    case Kind::Morozov: return "morozov";
    case Kind::Optimal: return "optimal";
    case Kind::Fixed: return "fixed:" + format_short(value);
  }
  return "?";
}

double ExperimentConfig::resolved_alpha_min() const {
  if (alpha_min) return *alpha_min;
  return kind == ExperimentKind::Isp2d ? 1e-12 : 1e-8;
}

double ExperimentConfig::resolved_alpha_max() const {
  if (alpha_max) return *alpha_max;
  return kind == ExperimentKind::Isp2d ? 1e2 : 10.0;
}

void ExperimentConfig::validate() const {
  auto positive = [](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive and finite");
  };
  if (taus.empty()) throw ConfigError("taus", "list must be nonempty");
  for (double t : taus) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("taus", "entries must be nonnegative and finite");
  }
  positive("alpha_min", resolved_alpha_min());
  positive("alpha_max", resolved_alpha_max());
  if (!(resolved_alpha_min() < resolved_alpha_max())) throw ConfigError("alpha_max", "must exceed alpha_min");
  if (alpha_points < 1) throw ConfigError("alpha_points", "must be at least 1");
  if (!(morozov_safety >= 1.0)) throw ConfigError("morozov_safety", "must be >= 1");
  positive("morozov_tol", morozov_tol);
  if (out_dir.empty()) throw ConfigError("out", "must be nonempty");

  switch (kind) {
    case ExperimentKind::Filters:
      if (filter_alphas.empty()) throw ConfigError("alphas", "list must be nonempty");
      for (double a : filter_alphas) positive("alphas", a);
      positive("sigma_min", sigma_min);
      positive("sigma_max", sigma_max);
      if (!(sigma_min < sigma_max)) throw ConfigError("sigma_max", "must exceed sigma_min");
      if (sigma_points < 2) throw ConfigError("sigma_points", "must be at least 2");
      break;
    case ExperimentKind::Deconv1d:
    case ExperimentKind::Isp2d: {
      if (rules.empty()) throw ConfigError("rules", "list must be nonempty");
      const bool morozov = std::any_of(rules.begin(), rules.end(),
                                       [](const AlphaRule& r) { return r.kind == AlphaRule::Kind::Morozov; });
      if (kind == ExperimentKind::Deconv1d) {
        if (n < 2) throw ConfigError("N", "must be at least 2");
        if (!(s_blur > 0.0) || !(s_blur < 1.0)) throw ConfigError("s_blur", "must lie in (0, 1)");
        if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("noise_std", "must be nonnegative");
        if (morozov && noise_std == 0.0) throw ConfigError("noise_std", "the morozov rule needs a positive noise level");
        if (oversample < 1) throw ConfigError("oversample", "must be at least 1");
      } else {
        positive("r0", r0);
        if (!(r > r0) || !std::isfinite(r)) throw ConfigError("r", "must exceed r0");
        if (cells_across < 1) throw ConfigError("cells_across", "must be positive");
        if (sensors < 1) throw ConfigError("sensors", "must be positive");
        if (j_min < 1 || j_max < j_min) throw ConfigError("j_max", "need 1 <= j_min <= j_max");
        if (!(noise_ratio >= 0.0) || !std::isfinite(noise_ratio)) throw ConfigError("noise_ratio", "must be nonnegative");
        if (morozov && noise_ratio == 0.0) throw ConfigError("noise_ratio", "the morozov rule needs a positive noise level");
      }
      break;
    }
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
  };
  out << "experiment = " << to_string(kind) << '\n';
  out << "seed = " << seed << '\n';
  out << "taus = " << list(taus) << '\n';
  std::string rl;
  for (std::size_t i = 0; i < rules.size(); ++i) rl += (i ? ", " : "") + rules[i].name();
  out << "rules = " << rl << '\n';
  out << "out = " << out_dir << '\n';
  out << "alpha_min = " << format_number(resolved_alpha_min()) << '\n';
  out << "alpha_max = " << format_number(resolved_alpha_max()) << '\n';
  out << "alpha_points = " << alpha_points << '\n';
  out << "morozov_safety = " << format_number(morozov_safety) << '\n';
  out << "morozov_tol = " << format_number(morozov_tol) << '\n';
  switch (kind) {
    case ExperimentKind::Filters:
      out << "alphas = " << list(filter_alphas) << '\n';
      out << "sigma_min = " << format_number(sigma_min) << '\n';
      out << "sigma_max = " << format_number(sigma_max) << '\n';
      out << "sigma_points = " << sigma_points << '\n';
      break;
    case ExperimentKind::Deconv1d:
      out << "function = " << to_string(function) << '\n';
      out << "N = " << n << '\n';
      out << "s_blur = " << format_number(s_blur) << '\n';
      out << "noise_std = " << format_number(noise_std) << '\n';
      out << "oversample = " << oversample << '\n';
      break;
    case ExperimentKind::Isp2d:
      out << "r0 = " << format_number(r0) << '\n';
      out << "r = " << format_number(r) << '\n';
      out << "cells_across = " << cells_across << '\n';
      out << "sensors = " << sensors << '\n';
      out << "j_min = " << j_min << '\n';
      out << "j_max = " << j_max << '\n';
      out << "noise_ratio = " << format_number(noise_ratio) << '\n';
      break;
  }
  return out.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) throw ConfigError(key, "duplicate key");
    kv[key] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  const auto kind = take("experiment");
  if (!kind) throw ConfigError("experiment", "missing (filters | deconv1d | isp2d)");
  if (*kind == "filters") cfg.kind = ExperimentKind::Filters;
  else if (*kind == "deconv1d") cfg.kind = ExperimentKind::Deconv1d;
  else if (*kind == "isp2d") cfg.kind = ExperimentKind::Isp2d;
  else throw ConfigError("experiment", "unknown kind '" + *kind + "'");

  if (auto v = take("seed")) cfg.seed = parse_integer<std::uint64_t>("seed", *v);
  if (auto v = take("taus")) cfg.taus = parse_double_list("taus", *v);
  if (auto v = take("rules")) {
    cfg.rules.clear();
    for (const auto& item : split(*v, ',')) {
      if (!item.empty()) cfg.rules.push_back(AlphaRule::parse(item));
    }
  }
  if (auto v = take("out")) cfg.out_dir = *v;
  if (auto v = take("alpha_min")) cfg.alpha_min = parse_double("alpha_min", *v);
  if (auto v = take("alpha_max")) cfg.alpha_max = parse_double("alpha_max", *v);
  if (auto v = take("alpha_points")) cfg.alpha_points = parse_integer<std::size_t>("alpha_points", *v);
  if (auto v = take("morozov_safety")) cfg.morozov_safety = parse_double("morozov_safety", *v);
  if (auto v = take("morozov_tol")) cfg.morozov_tol = parse_double("morozov_tol", *v);

  if (auto v = take("alphas")) cfg.filter_alphas = parse_double_list("alphas", *v);
  if (auto v = take("sigma_min")) cfg.sigma_min = parse_double("sigma_min", *v);
  if (auto v = take("sigma_max")) cfg.sigma_max = parse_double("sigma_max", *v);
  if (auto v = take("sigma_points")) cfg.sigma_points = parse_integer<std::size_t>("sigma_points", *v);

  if (auto v = take("function")) {
    try {
      cfg.function = parse_test_function(*v);
    } catch (const ContractError& e) {
      throw ConfigError("function", e.what());
    }
  }
  if (auto v = take("N")) cfg.n = parse_integer<std::size_t>("N", *v);
  if (auto v = take("s_blur")) cfg.s_blur = parse_double("s_blur", *v);
  if (auto v = take("noise_std")) cfg.noise_std = parse_double("noise_std", *v);
  if (auto v = take("oversample")) cfg.oversample = parse_integer<std::size_t>("oversample", *v);

  if (auto v = take("r0")) cfg.r0 = parse_double("r0", *v);
  if (auto v = take("r")) cfg.r = parse_double("r", *v);
  if (auto v = take("cells_across")) cfg.cells_across = parse_integer<std::size_t>("cells_across", *v);
  if (auto v = take("sensors")) cfg.sensors = parse_integer<std::size_t>("sensors", *v);
  if (auto v = take("j_min")) cfg.j_min = parse_integer<int>("j_min", *v);
  if (auto v = take("j_max")) cfg.j_max = parse_integer<int>("j_max", *v);
  if (auto v = take("noise_ratio")) cfg.noise_ratio = parse_double("noise_ratio", *v);

  if (!kv.empty()) throw ConfigError(kv.begin()->first, "unknown key");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Report I/O

void write_report_csv(const ExperimentReport& report, const fs::path& path) {
  auto out = open_output(path);
  out << "tau,rule,alpha,relative_error\n";
  for (const auto& row : report.rows) {
    out << format_number(row.tau) << ',' << row.rule << ',' << format_number(row.alpha) << ','
        << format_number(row.relative_error) << '\n';
  }
}

ExperimentReport read_report_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open report " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "tau,rule,alpha,relative_error") {
    throw ContractError(path.string() + ": not a report CSV (bad header)");
  }
  ExperimentReport report;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 4) throw ContractError(path.string() + ": expected 4 columns in '" + line + "'");
    ReportRow row;
    row.tau = parse_double("tau", cols[0]);
    row.rule = cols[1];
    row.alpha = parse_double("alpha", cols[2]);
    row.relative_error = parse_double("relative_error", cols[3]);
    report.rows.push_back(row);
  }
  return report;
}

std::size_t ReportDiff::nonzero_rows() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const RowDelta& d) { return d.nonzero(); }));
}

ReportDiff compare_reports(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.rows.size() != b.rows.size()) {
    throw ContractError("compare_reports: row counts differ (" + std::to_string(a.rows.size()) + " vs " +
                        std::to_string(b.rows.size()) + ")");
  }
  auto rel = [](double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
  };
  ReportDiff diff;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rb = b.rows[i];
    if (ra.tau != rb.tau || ra.rule != rb.rule) {
      throw ContractError("compare_reports: row " + std::to_string(i) + " keys differ");
    }
    RowDelta d;
    d.tau = ra.tau;
    d.rule = ra.rule;
    d.alpha_abs = std::abs(ra.alpha - rb.alpha);
    d.alpha_rel = rel(ra.alpha, rb.alpha);
    d.error_abs = std::abs(ra.relative_error - rb.relative_error);
    d.error_rel = rel(ra.relative_error, rb.relative_error);
    diff.max_abs = std::max({diff.max_abs, d.alpha_abs, d.error_abs});
    diff.max_rel = std::max({diff.max_rel, d.alpha_rel, d.error_rel});
    diff.rows.push_back(d);
  }
  return diff;
}

void print_diff(const ReportDiff& diff, std::ostream& out) {
  out << "tau,rule,alpha_abs,alpha_rel,error_abs,error_rel\n";
  for (const auto& d : diff.rows) {
    out << format_number(d.tau) << ',' << d.rule << ',' << format_number(d.alpha_abs) << ','
        << format_number(d.alpha_rel) << ',' << format_number(d.error_abs) << ',' << format_number(d.error_rel)
        << '\n';
  }
  out << "# rows=" << diff.rows.size() << " nonzero=" << diff.nonzero_rows() << " max_abs=" << format_number(diff.max_abs)
      << " max_rel=" << format_number(diff.max_rel) << '\n';
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct RunTask {
  double tau;
  AlphaRule rule;
};

std::vector<RunTask> make_tasks(const ExperimentConfig& cfg) {
  std::vector<RunTask> tasks;
  for (double tau : cfg.taus) {
    for (const auto& rule : cfg.rules) tasks.push_back({tau, rule});
  }
  return tasks;
}

json provenance_json(const ExperimentConfig& cfg) {
  return {{"config_hash", cfg.hash()}, {"seed", cfg.seed}, {"code_version", kVersion}};
}

json rows_json(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"tau", r.tau}, {"rule", r.rule}, {"alpha", r.alpha}, {"relative_error", r.relative_error}});
  }
  return arr;
}

ExperimentReport run_filters(const ExperimentConfig& cfg, const RunOptions& options) {
  auto out = open_output(options.out_dir / "filters.csv");
  out << "sigma,tau,alpha,q\n";
  const SweepConfig sigmas = SweepConfig::log_spaced(cfg.sigma_min, cfg.sigma_max, cfg.sigma_points);
  for (double alpha : cfg.filter_alphas) {
    for (double tau : cfg.taus) {
      const FilterSpec spec(tau, alpha);
      for (double sigma : sigmas.alpha_grid) {
        out << format_number(sigma) << ',' << format_number(tau) << ',' << format_number(alpha) << ','
            << format_number(filter_value(spec, sigma)) << '\n';
      }
    }
  }
  write_json(options.out_dir / "metadata.json",
             {{"experiment", "filters"},
              {"alphas", cfg.filter_alphas},
              {"taus", cfg.taus},
              {"sigma_min", cfg.sigma_min},
              {"sigma_max", cfg.sigma_max},
              {"sigma_points", cfg.sigma_points},
              {"provenance", provenance_json(cfg)}});
  ExperimentReport report;
  report.kind = ExperimentKind::Filters;
  report.provenance = {cfg.hash(), cfg.seed, kVersion};
  return report;
}

struct Deconv1dRun {
  ReportRow row;
  Signal1D reconstruction{Grid1D(1), {0.0}};
  AlphaTrace trace;
  double residual = 0.0;
  bool saturated = false;
};

ExperimentReport run_deconv1d(const ExperimentConfig& cfg, const RunOptions& options) {
  const TestFunction tf = make_test_function(cfg.function);
  const BoxKernel kernel(cfg.s_blur);
  const Measurement meas = synthesize_measurement(tf, kernel, cfg.n, cfg.noise_std, cfg.seed, cfg.oversample);
  const Signal1D truth = tf.sample(meas.noisy.grid);
  const Deconvolver dec(meas.noisy, kernel);
  const SweepConfig sweep = SweepConfig::log_spaced(cfg.resolved_alpha_min(), cfg.resolved_alpha_max(), cfg.alpha_points);
  const auto tasks = make_tasks(cfg);

  const std::function<Deconv1dRun(std::size_t)> task = [&](std::size_t i) {
    const RunTask& t = tasks[i];
    Deconv1dRun run;
    double alpha = 0.0;
    switch (t.rule.kind) {
      case AlphaRule::Kind::Optimal: {
        const SweepResult res = optimal_alpha(
            [&](double a) { return relative_error(dec.reconstruct(FilterSpec(t.tau, a)), truth); }, sweep);
        alpha = res.alpha;
        run.trace = res.trace;
        break;
      }
      case AlphaRule::Kind::Morozov: {
        MorozovConfig mc;
        mc.safety = cfg.morozov_safety;
        mc.noise_std = cfg.noise_std;
        mc.n = cfg.n;
        mc.alpha_lo = cfg.resolved_alpha_min();
        mc.alpha_hi = cfg.resolved_alpha_max();
        mc.tol = cfg.morozov_tol;
        const MorozovResult res = morozov_alpha([&](double a) { return dec.residual_norm(FilterSpec(t.tau, a)); }, mc);
        alpha = res.alpha;
        run.trace = res.trace;
        run.saturated = res.saturated;
        break;
      }
      case AlphaRule::Kind::Fixed:
        alpha = t.rule.value;
        break;
    }
    run.reconstruction = dec.reconstruct(FilterSpec(t.tau, alpha));
    run.residual = dec.residual_norm(run.reconstruction);
    run.row = {t.tau, t.rule.name(), alpha, relative_error(run.reconstruction, truth)};
    return run;
  };
  const std::vector<Deconv1dRun> runs = run_indexed<Deconv1dRun>(tasks.size(), options.jobs, task);

  ExperimentReport report;
  report.kind = ExperimentKind::Deconv1d;
  report.provenance = {cfg.hash(), cfg.seed, kVersion};
  const std::string fname = to_string(cfg.function);
  json runs_meta = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = runs[i];
    report.rows.push_back(run.row);
    const std::string label = fname + "_" + run_label(tasks[i].tau, tasks[i].rule);

    auto out = open_output(options.out_dir / ("signal_" + label + ".csv"));
    out << "x,truth,measurement_noisy,reconstruction\n";
    for (std::size_t j = 0; j < truth.values.size(); ++j) {
      out << format_number(truth.grid.point(j)) << ',' << format_number(truth.values[j]) << ','
          << format_number(meas.noisy.values[j]) << ',' << format_number(run.reconstruction.values[j]) << '\n';
    }
    if (options.trace && !run.trace.empty()) {
      write_trace_csv(options.out_dir / ("trace_" + label + ".csv"), run.trace,
                      tasks[i].rule.kind == AlphaRule::Kind::Morozov ? "residual" : "relative_error");
    }
    runs_meta.push_back({{"tau", run.row.tau},
                         {"rule", run.row.rule},
                         {"alpha", run.row.alpha},
                         {"relative_error", run.row.relative_error},
                         {"residual", run.residual},
                         {"bracket_saturated", run.saturated}});
  }
  write_report_csv(report, options.out_dir / "report.csv");
  write_json(options.out_dir / "metadata.json",
             {{"experiment", "deconv1d"},
              {"function", fname},
              {"N", cfg.n},
              {"s_blur", cfg.s_blur},
              {"noise_std", cfg.noise_std},
              {"seed", cfg.seed},
              {"oversample", cfg.oversample},
              {"morozov_threshold", cfg.morozov_safety * expected_noise_norm(cfg.noise_std, cfg.n)},
              {"runs", runs_meta},
              {"provenance", provenance_json(cfg)}});
  return report;
}

void write_field_csv(const fs::path& path, const ISPGeometry& geom, const Eigen::VectorXd& values) {
  auto out = open_output(path);
  out << "x,y,value\n";
  for (std::size_t i = 0; i < geom.cells.size(); ++i) {
    out << format_number(geom.cells[i].center.x) << ',' << format_number(geom.cells[i].center.y) << ','
        << format_number(values[static_cast<Eigen::Index>(i)]) << '\n';
  }
}

struct IspRun {
  ReportRow row;
  Eigen::VectorXd field;
  AlphaTrace trace;
};

ExperimentReport run_isp2d(const ExperimentConfig& cfg, const RunOptions& options) {
  const ISPGeometry geom = build_geometry(cfg.r0, cfg.r, cfg.cells_across, cfg.sensors);
  const FrequencySet freqs = FrequencySet::from_index_range(cfg.r0, cfg.j_min, cfg.j_max);
  const JointOperator joint = assemble_joint(geom, freqs);
  const SingularSystem sys = svd(joint.matrix);
  const Eigen::VectorXd truth = make_ground_truth(geom);
  const Eigen::VectorXd clean = joint.matrix * truth;
  const Eigen::VectorXd data = add_relative_noise(clean, cfg.noise_ratio, cfg.seed);
  const Eigen::VectorXd coeffs = sys.left().transpose() * data;
  const double sigma1_sq = sys.sigma()[0] * sys.sigma()[0];
  const SweepConfig sweep = SweepConfig::log_spaced(sigma1_sq * cfg.resolved_alpha_min(),
                                                    sigma1_sq * cfg.resolved_alpha_max(), cfg.alpha_points);
  const auto tasks = make_tasks(cfg);

  auto solve = [&](double tau, double alpha) {
    return apply_filtered_inverse_coefficients(sys, FilterSpec(tau, alpha), coeffs);
  };

  const std::function<IspRun(std::size_t)> task = [&](std::size_t i) {
    const RunTask& t = tasks[i];
    IspRun run;
    double alpha = 0.0;
    switch (t.rule.kind) {
      case AlphaRule::Kind::Optimal: {
        const SweepResult res = optimal_alpha([&](double a) { return relative_error(solve(t.tau, a), truth); }, sweep);
        alpha = res.alpha;
        run.trace = res.trace;
        break;
      }
      case AlphaRule::Kind::Morozov: {
        MorozovConfig mc;
        mc.safety = cfg.morozov_safety;
        mc.noise_std = relative_noise_std(clean, cfg.noise_ratio);
        mc.n = static_cast<std::size_t>(data.size());
        mc.alpha_lo = sweep.alpha_grid.front();
        mc.alpha_hi = sweep.alpha_grid.back();
        mc.tol = cfg.morozov_tol;
        const MorozovResult res =
            morozov_alpha([&](double a) { return (joint.matrix * solve(t.tau, a) - data).norm(); }, mc);
        alpha = res.alpha;
        run.trace = res.trace;
        break;
      }
      case AlphaRule::Kind::Fixed:
        alpha = t.rule.value;
        break;
    }
    run.field = solve(t.tau, alpha);
    run.row = {t.tau, t.rule.name(), alpha, relative_error(run.field, truth)};
    return run;
  };
  const std::vector<IspRun> runs = run_indexed<IspRun>(tasks.size(), options.jobs, task);

  ExperimentReport report;
  report.kind = ExperimentKind::Isp2d;
  report.provenance = {cfg.hash(), cfg.seed, kVersion};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    report.rows.push_back(runs[i].row);
    const std::string label = run_label(tasks[i].tau, tasks[i].rule);
    write_field_csv(options.out_dir / ("field_" + label + ".csv"), geom, runs[i].field);
    if (options.trace && !runs[i].trace.empty()) {
      write_trace_csv(options.out_dir / ("trace_" + label + ".csv"), runs[i].trace,
                      tasks[i].rule.kind == AlphaRule::Kind::Morozov ? "residual" : "relative_error");
    }
  }
  write_field_csv(options.out_dir / "field_truth.csv", geom, truth);
  {
    auto out = open_output(options.out_dir / "spectrum.csv");
    out << "index,sigma,projection\n";
    for (const auto& row : spectrum_report(sys, truth)) {
      out << row.index << ',' << format_number(row.sigma) << ',' << format_number(row.projection) << '\n';
    }
  }
  write_report_csv(report, options.out_dir / "report.csv");
  write_json(options.out_dir / "metadata.json",
             {{"experiment", "isp2d"},
              {"geometry",
               {{"r0", cfg.r0}, {"r", cfg.r}, {"cells_across", cfg.cells_across}, {"cells", geom.cells.size()},
                {"sensors", cfg.sensors}}},
              {"frequencies", {{"j_min", cfg.j_min}, {"j_max", cfg.j_max}, {"wavenumbers", freqs.wavenumbers}}},
              {"noise_ratio", cfg.noise_ratio},
              {"noise_std", relative_noise_std(clean, cfg.noise_ratio)},
              {"seed", cfg.seed},
              {"sigma_1", sys.sigma()[0]},
              {"sigma_min", sys.sigma()[sys.rank() - 1]},
              {"rank", sys.rank()},
              {"runs", rows_json(report.rows)},
              {"provenance", provenance_json(cfg)}});
  return report;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  fs::create_directories(options.out_dir);
  switch (cfg.kind) {
    case ExperimentKind::Filters: return run_filters(cfg, options);
    case ExperimentKind::Deconv1d: return run_deconv1d(cfg, options);
    case ExperimentKind::Isp2d: return run_isp2d(cfg, options);
  }
  throw ContractError("run_experiment: unknown experiment kind");
}

}  // namespace specreg
