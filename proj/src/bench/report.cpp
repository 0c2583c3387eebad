#include "ta2s2/bench/report.hpp"

#include <cmath>
#include <fstream>

#include "ta2s2/error.hpp"
#include "ta2s2/predict_score.hpp"

namespace ta2s2::bench {

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::uniform_log_space:
      return "uniform_log_space";
    case PriorKind::exponential:
      return "exponential";
    case PriorKind::custom:
      return "custom";
  }
  return "unknown";
}

PriorKind prior_kind_from_string(const std::string& name) {
  if (name == "uniform_log_space" || name == "uniform") return PriorKind::uniform_log_space;
  if (name == "exponential") return PriorKind::exponential;
  throw ConfigError("unknown prior '" + name + "'");
}

std::string to_string(ExponentConvention convention) {
  return convention == ExponentConvention::paper_n_minus_p ? "paper_n_minus_p" : "n_minus_one";
}

ExponentConvention exponent_convention_from_string(const std::string& name) {
  if (name == "paper_n_minus_p") return ExponentConvention::paper_n_minus_p;
  if (name == "n_minus_one") return ExponentConvention::n_minus_one;
  throw ConfigError("unknown exponent convention '" + name + "'");
}

json to_json(const RunConfig& cfg) {
  json prior = {{"kind", to_string(cfg.prior.kind)}};
  if (cfg.prior.kind == PriorKind::uniform_log_space) {
    prior["box"] = {cfg.prior.box_lower, cfg.prior.box_upper};
  } else if (cfg.prior.kind == PriorKind::exponential) {
    prior["mean"] = cfg.prior.exponential_mean;
  }
  return {
      {"N", cfg.N},
      {"gamma", cfg.gamma},
      {"c0", cfg.c0},
      {"p_renew", cfg.p_renew},
      {"max_crumbs", cfg.max_crumbs},
      {"max_levels", cfg.max_levels},
      {"max_stall_rate", cfg.max_stall_rate},
      {"prior", prior},
      {"lower_bound", cfg.kernel.lower_bound},
      {"jitter_max_attempts", cfg.kernel.jitter_max_attempts},
      {"exponent", to_string(cfg.kernel.exponent_convention)},
      {"seed", cfg.seed},
      {"thin", cfg.thin},
  };
}

json ladder_json(const RunReport& report) {
  json ladder = json::array();
  for (std::size_t k = 1; k < report.ladder.taus.size(); ++k)
    ladder.push_back({{"tau", report.ladder.taus[k]}, {"ess", report.ladder.ess[k - 1]}});
  return ladder;
}

json level_diagnostics_json(const RunReport& report) {
  json levels = json::array();
  for (const auto& d : report.levels) {
    levels.push_back({{"level", d.level},
                      {"tau", d.tau},
                      {"ess", d.ess},
                      {"chains", d.chains},
                      {"stalls", d.stalls},
                      {"crumbs", d.crumbs},
                      {"renewals", d.renewals},
                      {"max_crumbs_in_step", d.max_crumbs_in_step},
                      {"diagonal_fallback", d.diagonal_fallback}});
  }
  return levels;
}

json samples_summary_json(const WeightedSampleSet& samples, const KernelConfig& kernel) {
  json out = {{"count", samples.size()}};
  if (samples.size() == 0) return out;
  const Eigen::Index dim = samples.points.front().size();
  Vector mean = Vector::Zero(dim);
  for (const auto& p : samples.points) mean += p;
  mean /= static_cast<double>(samples.size());
  Vector var = Vector::Zero(dim);
  for (const auto& p : samples.points) var += (p - mean).cwiseAbs2();
  var /= static_cast<double>(samples.size());

  const std::size_t best = map_index(samples.H);
  const Vector& map = samples.points[best];
  std::vector<double> mean_v(mean.data(), mean.data() + dim);
  std::vector<double> std_v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) std_v[static_cast<std::size_t>(i)] = std::sqrt(var(i));
  std::vector<double> map_v(map.data(), map.data() + dim);
  double h_min = samples.H[best];
  double h_max = h_min;
  for (double h : samples.H) h_max = std::max(h_max, h);
  out["mean"] = mean_v;
  out["std"] = std_v;
  out["H_min"] = h_min;
  out["H_max"] = h_max;
  out["map"] = {{"index", best},
                {"point", map_v},
                {"nugget", nugget_transform(map(dim - 1), kernel.lower_bound)},
                {"H", h_min}};
  return out;
}

json timings_json(const RunReport& report, int workers) {
  std::vector<double> per_level;
  for (const auto& d : report.levels) per_level.push_back(d.seconds);
  return {{"workers", workers},
          {"init_seconds", report.init_seconds},
          {"level_seconds", per_level},
          {"total_seconds", report.total_seconds}};
}

json strip_timings(json j) {
  if (j.is_object()) {
    j.erase("timings");
    for (auto& [key, value] : j.items()) value = strip_timings(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timings(value);
  }
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace ta2s2::bench
