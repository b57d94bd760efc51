#include "wclt/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wclt/charfun.hpp"
#include "wclt/error.hpp"
#include "wclt/moments.hpp"
#include "wclt/parallel.hpp"
#include "wclt/rng.hpp"
#include "wclt/truncation.hpp"

namespace wclt {

using ojson = nlohmann::ordered_json;

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::rate:
      return "rate";
    case ExperimentMode::concentration:
      return "concentration";
    case ExperimentMode::lemma2:
      return "lemma2";
    case ExperimentMode::edgeworth_table:
      return "edgeworth_table";
    case ExperimentMode::discrepancy_single:
      return "discrepancy_single";
  }
  return "unknown";
}

std::string to_string(ThetaPolicy p) { return p == ThetaPolicy::equal ? "equal" : "sampled"; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    x = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  if (pos != v.size()) {
    throw ParseError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "': expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw ParseError("config key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, std::string v) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::uint64_t mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x243f6a8885a308d3ULL;
  std::uint64_t h = 0;
  for (auto p : parts) {
    state ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h = splitmix64(state);
  }
  return h;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

unsigned ExperimentConfig::effective_threads() const {
  return threads == 0 ? default_threads() : threads;
}

void ExperimentConfig::validate() const {
  if (dimension == 0) throw Error("config: dimension must be >= 1");
  if (n_grid.empty()) throw Error("config: n_grid is empty");
  if (n_grid.front() == 0) throw Error("config: n_grid entries must be >= 1");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw Error("config: n_grid must be strictly increasing");
  }
  if (policies.empty()) throw Error("config: no theta policy selected");
  if (replicates == 0) throw Error("config: replicates must be >= 1");
  if (mc_samples == 0) throw Error("config: mc must be >= 1");
  if (nu.order() != 3) throw Error("config: nu must have order 3");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (t_grid[i] <= t_grid[i - 1]) throw Error("config: t_grid must be strictly increasing");
  }
  if (edgeworth_order > kMaxEdgeworthOrder) throw Error("config: edgeworth_order too large");
}

void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "mode") {
    static const std::map<std::string, ExperimentMode> modes{
        {"rate", ExperimentMode::rate},
        {"concentration", ExperimentMode::concentration},
        {"lemma2", ExperimentMode::lemma2},
        {"edgeworth_table", ExperimentMode::edgeworth_table},
        {"discrepancy_single", ExperimentMode::discrepancy_single}};
    const auto it = modes.find(value);
    if (it == modes.end()) throw ParseError("config: unknown mode '" + value + "'");
    c.mode = it->second;
  } else if (key == "dimension" || key == "k") {
    c.dimension = to_u64(key, value);
  } else if (key == "dist" || key == "distribution") {
    c.distribution = value;
  } else if (key == "allow_unnormalized") {
    c.allow_unnormalized = to_bool(key, value);
  } else if (key == "n_grid") {
    c.n_grid.clear();
    for (const auto& s : split_list(value)) c.n_grid.push_back(to_u64(key, s));
  } else if (key == "policies" || key == "theta_policy") {
    c.policies.clear();
    for (const auto& s : split_list(value)) {
      if (s == "equal") {
        c.policies.push_back(ThetaPolicy::equal);
      } else if (s == "sampled") {
        c.policies.push_back(ThetaPolicy::sampled);
      } else {
        throw ParseError("config: unknown theta policy '" + s + "'");
      }
    }
  } else if (key == "replicates" || key == "R") {
    c.replicates = to_u64(key, value);
  } else if (key == "mc") {
    c.mc_samples = to_u64(key, value);
  } else if (key == "seed") {
    c.seed = to_u64(key, value);
  } else if (key == "threads") {
    c.threads = static_cast<unsigned>(to_u64(key, value));
  } else if (key == "out_dir") {
    c.out_dir = value;
  } else if (key == "class") {
    c.set_class = value;
  } else if (key == "recenter") {
    c.recenter = to_bool(key, value);
  } else if (key == "mc_max_n") {
    c.mc_max_n = to_u64(key, value);
  } else if (key == "noise_floor") {
    c.noise_floor = to_bool(key, value);
  } else if (key == "conc_n") {
    c.conc_n = to_u64(key, value);
  } else if (key == "conc_replicates" || key == "reps") {
    c.conc_replicates = to_u64(key, value);
  } else if (key == "nu") {
    c.nu = MultiIndex::parse(value);
  } else if (key == "t_grid") {
    c.t_grid.clear();
    for (const auto& s : split_list(value)) c.t_grid.push_back(to_double(key, s));
  } else if (key == "lemma2_configs") {
    c.lemma2_configs = to_u64(key, value);
  } else if (key == "lemma2_max_attempts") {
    c.lemma2_max_attempts = to_u64(key, value);
  } else if (key == "edgeworth_order" || key == "r") {
    c.edgeworth_order = static_cast<unsigned>(to_u64(key, value));
  } else {
    throw ParseError("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    try {
      apply_config_value(base, key, value);
    } catch (const ParseError& e) {
      throw ParseError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

DistributionSpec resolve_distribution(const std::string& spec, std::size_t dimension,
                                      bool allow_unnormalized) {
  if (std::filesystem::is_regular_file(spec)) return load_distribution(spec, allow_unnormalized);
  const auto parts = split_list(spec, ':');
  const std::string name = parts.empty() ? spec : parts[0];
  if (name == "rademacher_product" || name == "rademacher") {
    return DistributionSpec::rademacher_product(dimension);
  }
  if (name == "uniform_cube_scaled") {
    const unsigned levels = parts.size() > 1 ? static_cast<unsigned>(to_u64("dist", parts[1])) : 4;
    return DistributionSpec::uniform_cube_scaled(dimension, levels);
  }
  if (name == "skewed_three_point" || name == "heavy_atom") {
    if (dimension != 1) throw DimensionMismatch(name + " is a one-dimensional family");
    return name == "heavy_atom" ? DistributionSpec::heavy_atom()
                                : DistributionSpec::skewed_three_point();
  }
  throw ParseError("'" + spec + "' is neither a readable file nor a known family");
}

WeightVector resolve_theta(const std::string& spec) {
  const auto parts = split_list(spec, ':');
  if (!parts.empty() && parts[0] == "equal" && parts.size() == 2) {
    return equal_weights(to_u64("theta", parts[1]));
  }
  if (!parts.empty() && parts[0] == "sample" && parts.size() == 3) {
    return sample_uniform(to_u64("theta", parts[1]), to_u64("theta", parts[2]));
  }
  std::ifstream f(spec);
  if (!f) throw ParseError("theta '" + spec + "': expected equal:<n>, sample:<n>:<seed> or a file");
  std::stringstream ss;
  ss << f.rdbuf();
  std::string text = ss.str();
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) values.push_back(to_double("theta", tok));
  if (values.empty()) throw ParseError("theta file '" + spec + "' holds no numbers");
  return WeightVector::explicit_weights(std::move(values));
}

std::vector<double> default_t_grid() {
  std::vector<double> t;
  for (int i = 0; i <= 48; ++i) t.push_back(0.05 * std::pow(10.0, i / 12.0));
  return t;
}

SlopeFit fit_slope(std::span<const std::pair<double, double>> rows) {
  if (rows.size() < 3) {
    throw Error("fit_slope needs at least 3 rows, got " + std::to_string(rows.size()));
  }
  std::string bad;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].first > 0.0) || !(rows[i].second > 0.0)) {
      bad += (bad.empty() ? "" : ",") + std::to_string(i);
    }
  }
  if (!bad.empty()) throw Error("fit_slope: nonpositive entries at rows " + bad);
  const double m = static_cast<double>(rows.size());
  double sx = 0, sy = 0;
  for (const auto& [n, v] : rows) {
    sx += std::log(n);
    sy += std::log(v);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [n, v] : rows) {
    const double dx = std::log(n) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error("fit_slope: all n are equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (const auto& [n, v] : rows) {
    const double r = std::log(v) - (fit.intercept + fit.slope * std::log(n));
    fit.residuals.push_back(r);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

const PolicySummary* RateReport::summary(ThetaPolicy p) const {
  for (const auto& s : summaries) {
    if (s.policy == p) return &s;
  }
  return nullptr;
}

namespace {

struct RateTask {
  ThetaPolicy policy;
  std::size_t n;
  std::size_t theta_id;
};

std::vector<double> recenter_shift(const DistributionSpec& d, const WeightVector& theta) {
  std::vector<TruncatedSummand> summands;
  summands.reserve(theta.size());
  for (double w : theta.values()) summands.push_back(truncate(d, w));
  return normalization(summands).a_n;
}

RateRow rate_row(const ExperimentConfig& c, const DistributionSpec& d, const SetClass& cls,
                 const RateTask& task) {
  const WeightVector theta =
      task.policy == ThetaPolicy::equal
          ? equal_weights(task.n)
          : sample_uniform(task.n, c.seed, (static_cast<std::uint64_t>(task.n) << 32) | task.theta_id);
  RateRow row;
  row.policy = task.policy;
  row.n = task.n;
  row.theta_id = task.theta_id;
  const double delta4 = d.delta4();
  row.delta_theta4 = theta_stats(theta, std::span<const double>(&delta4, 1)).delta_theta4;

  std::vector<double> shift(d.dimension(), 0.0);
  if (c.recenter) shift = recenter_shift(d, theta);
  const bool shifted = std::any_of(shift.begin(), shift.end(), [](double v) { return v != 0.0; });

  DiscrepancyResult r;
  if (d.dimension() == 1) {
    if (!shifted) {
      r = discrepancy_1d(d, theta);
    } else {
      const ProductCF base(d, theta.values());
      const double a = shift[0];
      const auto cf = ProductCF::from_function(
          [base, a](double t) { return base.eval_1d(t) * std::polar(1.0, -t * a); },
          base.mean_1d() - a, base.support_radius());
      const auto k = kolmogorov_distance_1d(cf);
      r.value = k.value;
      r.method = DiscrepancyMethod::cf_inversion_exact;
      r.witness = "x=" + std::to_string(k.witness);
      r.method_error = k.error_estimate;
    }
  } else {
    MonteCarloOptions opt;
    opt.samples = c.mc_samples;
    opt.seed = mix({c.seed, static_cast<std::uint64_t>(task.policy), task.n, task.theta_id});
    opt.threads = 1;
    SumSampler sampler = weighted_sum_sampler(d, theta);
    if (shifted) {
      sampler = [inner = std::move(sampler), shift](Rng& rng, std::span<double> out) {
        inner(rng, out);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= shift[i];
      };
    }
    r = discrepancy_mc(sampler, d.dimension(), cls, opt);
  }
  row.discrepancy = r.value;
  row.method = r.method;
  row.se = r.se;
  row.method_error = r.method_error;
  row.witness = r.witness;
  const double err = std::max(row.se, row.method_error);
  row.usable = row.discrepancy > 0.0 && 5.0 * err < row.discrepancy;
  return row;
}

}  // namespace

RateReport run_rate(const ExperimentConfig& config) {
  config.validate();
  RateReport report;
  report.config = config;
  const auto d = resolve_distribution(config.distribution, config.dimension, config.allow_unnormalized);
  if (d.dimension() != config.dimension) {
    throw DimensionMismatch("distribution has dimension " + std::to_string(d.dimension()) +
                            ", config says " + std::to_string(config.dimension));
  }
  report.distribution_label = d.label();
  const std::size_t k = d.dimension();
  SetClass cls = k == 1 ? SetClass::intervals() : SetClass::parse(config.set_class, k);
  cls.direction_seed = config.seed;
  report.set_class = k == 1 ? "intervals_1d(all half-lines)" : cls.describe();

  for (auto n : config.n_grid) {
    if (k >= 2 && n > config.mc_max_n) continue;
    report.n_grid.push_back(n);
  }
  if (k >= 2) {
    std::ostringstream w;
    w << "k >= 2 uses Monte Carlo over a finite set family with M = " << config.mc_samples
      << "; statistical noise near " << format17(1.0 / std::sqrt(static_cast<double>(config.mc_samples)))
      << " per set limits the visible rate";
    if (report.n_grid.size() < config.n_grid.size()) {
      w << "; grid capped at n <= " << config.mc_max_n;
    }
    report.warnings.push_back(w.str());
    std::cerr << "warning: " << report.warnings.back() << '\n';
  }
  if (report.n_grid.empty()) throw Error("rate: no grid point survives the n cap");

  std::vector<RateTask> tasks;
  for (auto p : config.policies) {
    for (auto n : report.n_grid) {
      const std::size_t reps = p == ThetaPolicy::equal ? 1 : config.replicates;
      for (std::size_t r = 0; r < reps; ++r) tasks.push_back({p, n, r});
    }
  }
  report.rows.resize(tasks.size());
  const unsigned threads = config.effective_threads();
  parallel_for(tasks.size(), threads,
               [&](std::size_t i) { report.rows[i] = rate_row(config, d, cls, tasks[i]); });

  if (k >= 2 && config.noise_floor) {
    MonteCarloOptions opt;
    opt.samples = config.mc_samples;
    opt.seed = mix({config.seed, 0x6e6f697365ULL});
    opt.threads = threads;
    const SumSampler gaussian = [](Rng& rng, std::span<double> out) {
      for (auto& v : out) v = rng.normal();
    };
    report.noise_floor = discrepancy_mc(gaussian, k, cls, opt).value;
  }

  for (auto p : config.policies) {
    PolicySummary s;
    s.policy = p;
    std::vector<std::pair<double, double>> points;
    for (auto n : report.n_grid) {
      RateCurvePoint pt;
      pt.n = n;
      std::vector<double> values;
      for (const auto& row : report.rows) {
        if (row.policy != p || row.n != n) continue;
        ++pt.total;
        if (row.usable) values.push_back(row.discrepancy);
      }
      pt.usable = values.size();
      if (!values.empty()) {
        pt.median = quantile(values, 0.5);
        pt.p90 = quantile(values, 0.9);
        points.emplace_back(static_cast<double>(n), pt.median);
      }
      s.curve.push_back(pt);
    }
    if (points.size() < 3) {
      s.flag = "fewer than 3 usable grid points; no slope fitted";
    } else {
      s.fit = fit_slope(points);
    }
    report.summaries.push_back(std::move(s));
  }

  for (auto& s : report.summaries) {
    for (auto& pt : s.curve) {
      pt.noise_limited = 2 * pt.usable < pt.total ||
                         (report.noise_floor && pt.median < 2.0 * *report.noise_floor);
      if (!pt.noise_limited || k == 1) continue;
      std::ostringstream w;
      w << to_string(s.policy) << " median at n = " << pt.n << " is noise limited (" << pt.usable
        << " of " << pt.total << " rows usable";
      if (report.noise_floor) w << ", noise floor " << format17(*report.noise_floor);
      w << ")";
      report.warnings.push_back(w.str());
    }
  }
  return report;
}

std::optional<ScalingComparison> scaling_comparison(const RateReport& report) {
  const auto* eq = report.summary(ThetaPolicy::equal);
  const auto* sa = report.summary(ThetaPolicy::sampled);
  if (!eq || !sa || sa->curve.size() < 2) return std::nullopt;
  ScalingComparison c;
  c.n_from = sa->curve.front().n;
  c.n_requested = sa->curve.back().n;
  std::size_t to = sa->curve.size() - 1;
  while (to > 0 && sa->curve[to].noise_limited) --to;
  if (to == 0) {
    c.n_to = c.n_requested;
    c.note = "sampled curve is noise limited beyond n = " + std::to_string(c.n_from);
    return c;
  }
  c.n_to = sa->curve[to].n;
  c.fallback = c.n_to != c.n_requested;
  const double e_from = eq->curve.front().median, e_to = eq->curve[to].median;
  const double s_from = sa->curve.front().median, s_to = sa->curve[to].median;
  c.equal_ratio = e_to > 0.0 ? e_from / e_to : 0.0;
  c.sampled_ratio = s_to > 0.0 ? s_from / s_to : 0.0;
  if (c.fallback) {
    c.note = "noise floor exceeds the signal at n = " + std::to_string(c.n_requested) +
             "; comparison uses n <= " + std::to_string(c.n_to);
  }
  return c;
}

std::string rate_csv(const RateReport& report) {
  std::ostringstream os;
  os << "policy,n,theta_id,discrepancy,method,se,method_error,delta_theta4,usable\n";
  for (const auto& r : report.rows) {
    os << to_string(r.policy) << ',' << r.n << ',' << r.theta_id << ',' << format17(r.discrepancy)
       << ',' << to_string(r.method) << ',' << format17(r.se) << ',' << format17(r.method_error)
       << ',' << format17(r.delta_theta4) << ',' << (r.usable ? 1 : 0) << '\n';
  }
  return os.str();
}

namespace {

ojson config_json(const ExperimentConfig& c) {
  ojson j;
  j["mode"] = to_string(c.mode);
  j["dimension"] = c.dimension;
  j["distribution"] = c.distribution;
  j["n_grid"] = c.n_grid;
  std::vector<std::string> p;
  for (auto x : c.policies) p.push_back(to_string(x));
  j["policies"] = p;
  j["replicates"] = c.replicates;
  j["mc"] = c.mc_samples;
  j["seed"] = c.seed;
  j["class"] = c.set_class;
  j["recenter"] = c.recenter;
  return j;
}

}  // namespace

std::string rate_json(const RateReport& report) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = "rate";
  j["rng"] = Rng::kName;
  j["config"] = config_json(report.config);
  j["distribution_label"] = report.distribution_label;
  j["class"] = report.set_class;
  j["class_note"] = "maximum over a finite set family; a lower bound of the convex-set supremum";
  j["n_grid_run"] = report.n_grid;
  j["replicates_R"] = report.config.replicates;
  j["noise_floor"] = report.noise_floor ? ojson(*report.noise_floor) : ojson(nullptr);
  j["warnings"] = report.warnings;
  ojson policies = ojson::array();
  for (const auto& s : report.summaries) {
    ojson p;
    p["policy"] = to_string(s.policy);
    ojson curve = ojson::array();
    for (const auto& pt : s.curve) {
      curve.push_back({{"n", pt.n},
                       {"usable", pt.usable},
                       {"total", pt.total},
                       {"median", pt.median},
                       {"p90", pt.p90},
                       {"noise_limited", pt.noise_limited}});
    }
    p["curve"] = curve;
    if (s.fit) {
      p["slope"] = s.fit->slope;
      p["intercept"] = s.fit->intercept;
      p["r_squared"] = s.fit->r_squared;
      p["residuals"] = s.fit->residuals;
    } else {
      p["slope"] = nullptr;
    }
    p["flag"] = s.flag;
    policies.push_back(p);
  }
  j["policies"] = policies;
  if (const auto c = scaling_comparison(report)) {
    j["scaling"] = {{"n_from", c->n_from},       {"n_to", c->n_to},
                    {"n_requested", c->n_requested}, {"fallback", c->fallback},
                    {"equal_ratio", c->equal_ratio}, {"sampled_ratio", c->sampled_ratio},
                    {"note", c->note}};
  }
  ojson rows = ojson::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"policy", to_string(r.policy)},
                    {"n", r.n},
                    {"theta_id", r.theta_id},
                    {"discrepancy", r.discrepancy},
                    {"method", to_string(r.method)},
                    {"se", r.se},
                    {"method_error", r.method_error},
                    {"delta_theta4", r.delta_theta4},
                    {"witness", r.witness},
                    {"usable", r.usable}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

namespace {

DistributionSpec two_point(double p) {
  const double q = 1.0 - p;
  return DistributionSpec(1, {{{std::sqrt(q / p)}, p}, {{-std::sqrt(p / q)}, q}},
                          "two_point(" + format17(p) + ")");
}

DistributionSpec product_law(const std::vector<DistributionSpec>& parts, const std::string& label) {
  std::vector<Atom> atoms{{{}, 1.0}};
  for (const auto& part : parts) {
    std::vector<Atom> next;
    for (const auto& a : atoms) {
      for (const auto& b : part.atoms()) {
        Atom c = a;
        c.point.insert(c.point.end(), b.point.begin(), b.point.end());
        c.prob *= b.prob;
        next.push_back(std::move(c));
      }
    }
    atoms = std::move(next);
  }
  return DistributionSpec(parts.size(), std::move(atoms), label);
}

// Rademacher product plus a rare pair of atoms ±a·e₁ of total mass p; the
// first coordinate is rescaled to keep unit variance.
DistributionSpec spiked_rademacher(std::size_t k, double p, double a) {
  std::vector<Atom> atoms;
  std::vector<double> spike(k, 0.0);
  spike[0] = a;
  atoms.push_back({spike, p / 2});
  spike[0] = -a;
  atoms.push_back({spike, p / 2});
  const double c1 = std::sqrt((1.0 - p * a * a) / (1.0 - p));
  const double c = 1.0 / std::sqrt(1.0 - p);
  const double mass = (1.0 - p) / static_cast<double>(std::size_t{1} << k);
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) x[i] = ((mask >> i) & 1U ? 1.0 : -1.0) * (i == 0 ? c1 : c);
    atoms.push_back({x, mass});
  }
  return DistributionSpec(k, std::move(atoms), "spiked_rademacher(k=" + std::to_string(k) + ")");
}

std::vector<DistributionSpec> lemma2_laws(std::size_t k) {
  const auto heavy = DistributionSpec::heavy_atom();
  const auto rare = two_point(0.05);
  const auto skew = DistributionSpec::skewed_three_point();
  const auto spiked = spiked_rademacher(k, 0.01, 5.0);
  if (k == 1) return {heavy, rare, skew, DistributionSpec::rademacher_product(1), spiked};
  std::vector<DistributionSpec> h(k, heavy), r(k, rare), m;
  for (std::size_t i = 0; i < k; ++i) m.push_back(i % 2 ? skew : heavy);
  return {product_law(h, "heavy_atom^" + std::to_string(k)),
          product_law(r, "two_point(0.05)^" + std::to_string(k)),
          product_law(m, "heavy/skewed product"), DistributionSpec::rademacher_product(k), spiked};
}

}  // namespace

Lemma2Record run_lemma2_suite(const ExperimentConfig& config) {
  static constexpr std::size_t kSizes[] = {8, 32, 128, 512, 2048};
  std::vector<std::vector<DistributionSpec>> laws;
  for (std::size_t k = 1; k <= 3; ++k) laws.push_back(lemma2_laws(k));

  Lemma2Record rec;
  while (rec.evaluated < config.lemma2_configs && rec.attempts < config.lemma2_max_attempts) {
    const std::size_t id = rec.attempts++;
    Rng rng(config.seed, 0x1e33a2, id);
    Lemma2Case c;
    c.id = id;
    c.k = 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
    const auto& family = laws[c.k - 1];
    const auto& d = family[static_cast<std::size_t>(rng.uniform() * family.size())];
    c.law = d.label();
    c.n = kSizes[static_cast<std::size_t>(rng.uniform() * 5.0)];
    const bool spiked = rng.uniform() < 0.5;
    c.theta_kind = spiked ? "spiked" : "uniform";
    std::vector<double> theta;
    if (spiked) {
      const double s = 0.15 + 0.15 * rng.uniform();
      const auto rest = sample_uniform(c.n - 1, config.seed, mix({0x5b1e, id}));
      theta.push_back(s);
      for (double v : rest.values()) theta.push_back(v * std::sqrt(1.0 - s * s));
    } else {
      const auto u = sample_uniform(c.n, config.seed, mix({0x0a1f, id}));
      theta.assign(u.values().begin(), u.values().end());
    }
    const double delta4 = d.delta4();
    for (double v : theta) c.delta_theta4 += v * v * v * v * delta4;
    c.passed_filter = c.delta_theta4 <= 1.0 / (8.0 * static_cast<double>(c.k));
    if (!c.passed_filter) {
      ++rec.filtered_out;
      rec.cases.push_back(std::move(c));
      continue;
    }
    ++rec.evaluated;
    std::vector<TruncatedSummand> summands;
    summands.reserve(theta.size());
    for (double v : theta) {
      summands.push_back(truncate(d, v));
      c.excluded_mass += summands.back().excluded_mass;
    }
    if (c.excluded_mass > 0.0) ++rec.truncation_active;
    try {
      const auto state = normalization(summands);
      c.check = check_covariance_bounds(state, c.k, rng, 100);
      if (!c.check.all_ok()) ++rec.violations;
      if (c.check.quadratic_form_bound > 0.0) {
        rec.max_quadratic_form_slack = std::max(
            rec.max_quadratic_form_slack, c.check.quadratic_form_ratio / c.check.quadratic_form_bound);
      }
      rec.max_d_minus_identity = std::max(rec.max_d_minus_identity, c.check.d_minus_identity_norm);
      rec.max_d_inverse = std::max(rec.max_d_inverse, c.check.d_inverse_norm);
    } catch (const Error& e) {
      c.error = e.what();
      ++rec.violations;
    }
    rec.cases.push_back(std::move(c));
  }
  return rec;
}

std::string lemma2_json(const ExperimentConfig& config, const Lemma2Record& rec) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = "lemma2";
  j["rng"] = Rng::kName;
  j["seed"] = config.seed;
  j["target_configurations"] = config.lemma2_configs;
  j["attempts"] = rec.attempts;
  j["filtered_out"] = rec.filtered_out;
  j["filtered_fraction"] =
      rec.attempts ? static_cast<double>(rec.filtered_out) / static_cast<double>(rec.attempts) : 0.0;
  j["evaluated"] = rec.evaluated;
  j["truncation_active"] = rec.truncation_active;
  j["violations"] = rec.violations;
  j["max_quadratic_form_ratio_over_bound"] = rec.max_quadratic_form_slack;
  j["max_norm_D_minus_I"] = rec.max_d_minus_identity;
  j["max_norm_D_inverse"] = rec.max_d_inverse;
  j["passed"] = rec.passed();
  ojson cases = ojson::array();
  for (const auto& c : rec.cases) {
    ojson e{{"id", c.id},
            {"k", c.k},
            {"law", c.law},
            {"n", c.n},
            {"theta", c.theta_kind},
            {"delta_theta4", c.delta_theta4},
            {"passed_filter", c.passed_filter}};
    if (c.passed_filter) {
      e["excluded_mass"] = c.excluded_mass;
      e["quadratic_form_ratio"] = c.check.quadratic_form_ratio;
      e["quadratic_form_bound"] = c.check.quadratic_form_bound;
      e["norm_D_minus_I"] = c.check.d_minus_identity_norm;
      e["norm_D_inverse"] = c.check.d_inverse_norm;
      e["ok"] = c.error.empty() && c.check.all_ok();
      if (!c.error.empty()) e["error"] = c.error;
    }
    cases.push_back(e);
  }
  j["cases"] = cases;
  return j.dump(2) + "\n";
}

std::string concentration_csv(const ConcentrationReport& r) {
  std::ostringstream os;
  os << "t,p_hat_S1,p_hat_S2\n";
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
    os << format17(r.t_grid[i]) << ',' << format17(r.p_hat_s1[i]) << ',' << format17(r.p_hat_s2[i])
       << '\n';
  }
  return os.str();
}

std::string concentration_json(const ExperimentConfig& config, const DistributionSpec& d,
                               const ConcentrationReport& r) {
  auto fit = [](const ExponentFit& f, bool subcritical) {
    ojson j;
    j["fitted"] = f.fitted;
    j["exponent"] = f.fitted ? ojson(f.exponent) : ojson(nullptr);
    j["log_constant"] = f.fitted ? ojson(f.log_constant) : ojson(nullptr);
    j["points"] = f.points;
    j["all_subcritical"] = subcritical;
    return j;
  };
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = "concentration";
  j["rng"] = Rng::kName;
  j["seed"] = config.seed;
  j["distribution"] = d.label();
  j["delta4"] = d.delta4();
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["nu"] = r.nu.to_string();
  j["fit_window"] = {{"p_min", 10.0 / static_cast<double>(r.replicates)}, {"p_max", 0.5}};
  j["S1"] = fit(r.fit_s1, r.s1_all_subcritical);
  j["S2"] = fit(r.fit_s2, r.s2_all_subcritical);
  j["max_S1"] = r.max_s1;
  j["reference_exponents"] = {{"S1", 2.0 / 3.0}, {"S2", 0.5}};
  return j.dump(2) + "\n";
}

EdgeworthPolynomial edgeworth_for_law(const DistributionSpec& d, unsigned r) {
  const auto m = exact_moments(d, r + 2);
  const auto c = cumulants_from_moments(m);
  const double one = 1.0;
  const auto weighted = weighted_cumulants(std::span<const CumulantTable>(&c, 1),
                                           std::span<const double>(&one, 1), r + 2);
  return build_P(r, weighted);
}

std::string edgeworth_csv(const EdgeworthPolynomial& p) {
  std::ostringstream os;
  os << "nu,coeff\n";
  for (const auto& [nu, coeff] : p.coefficients()) {
    os << '"' << nu.to_string() << "\"," << format17(coeff) << '\n';
  }
  return os.str();
}

std::string discrepancy_json(const DiscrepancyResult& r, const DistributionSpec& d,
                             const WeightVector& theta, std::uint64_t seed) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["value"] = r.value;
  j["method"] = to_string(r.method);
  j["witness"] = r.witness;
  j["se"] = r.se;
  j["class"] = r.set_class;
  j["max_se"] = r.max_se;
  j["samples"] = r.samples;
  j["method_error"] = r.method_error;
  j["distribution"] = d.label();
  j["theta"] = theta.describe();
  j["n"] = theta.size();
  j["seed"] = seed;
  j["rng"] = Rng::kName;
  return j.dump(2) + "\n";
}

std::string write_report(const std::string& dir, const std::string& name,
                         const std::string& content) {
  std::filesystem::create_directories(dir.empty() ? "." : dir);
  const auto path = (std::filesystem::path(dir.empty() ? "." : dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << content;
  if (!f) throw Error("write to '" + path + "' failed");
  return path;
}

}  // namespace wclt
