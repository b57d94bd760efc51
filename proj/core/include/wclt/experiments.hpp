#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wclt/discrepancy.hpp"
#include "wclt/distribution.hpp"
#include "wclt/edgeworth.hpp"
#include "wclt/multiindex.hpp"
#include "wclt/sphere.hpp"
#include "wclt/truncation.hpp"

namespace wclt {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentMode { rate, concentration, lemma2, edgeworth_table, discrepancy_single };
enum class ThetaPolicy { equal, sampled };

std::string to_string(ExperimentMode m);
std::string to_string(ThetaPolicy p);

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::rate;
  std::size_t dimension = 1;
  /// Path to a distribution document, or a family name (rademacher_product,
  /// uniform_cube_scaled, skewed_three_point, heavy_atom).
  std::string distribution = "rademacher_product";
  bool allow_unnormalized = false;
  std::vector<std::size_t> n_grid{64, 128, 256, 512, 1024, 2048, 4096};
  std::vector<ThetaPolicy> policies{ThetaPolicy::equal, ThetaPolicy::sampled};
  std::size_t replicates = 32;
  /// Monte Carlo budget for k ≥ 2.
  std::size_t mc_samples = 10'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0 selects the available parallelism
  std::string out_dir = ".";
  std::string set_class = "halfspaces:16";
  bool recenter = false;
  /// Largest n used for k ≥ 2 rate runs.
  std::size_t mc_max_n = 512;
  bool noise_floor = true;
  // concentration
  std::size_t conc_n = 256;
  std::size_t conc_replicates = 10'000;
  MultiIndex nu{3};
  std::vector<double> t_grid;
  // lemma2
  std::size_t lemma2_configs = 500;
  std::size_t lemma2_max_attempts = 20'000;
  // edgeworth
  unsigned edgeworth_order = 1;

  unsigned effective_threads() const;
  void validate() const;
};

/// `key = value` lines; `#` starts a comment; lists are comma separated.
/// Keys not mentioned keep the values of `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
/// Applies one assignment; throws ParseError on unknown keys or bad values.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Distribution from a file path or a family name.
DistributionSpec resolve_distribution(const std::string& spec, std::size_t dimension,
                                      bool allow_unnormalized = false);

/// θ from "equal:<n>", "sample:<n>:<seed>" or a file of numbers separated by
/// whitespace or commas.
WeightVector resolve_theta(const std::string& spec);

/// Geometric t grid used by the concentration experiment by default.
std::vector<double> default_t_grid();

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
};

/// Ordinary least squares on (ln n, ln value). Needs ≥ 3 rows, all values > 0.
SlopeFit fit_slope(std::span<const std::pair<double, double>> rows);

struct RateRow {
  ThetaPolicy policy = ThetaPolicy::equal;
  std::size_t n = 0;
  std::size_t theta_id = 0;
  double discrepancy = 0.0;
  DiscrepancyMethod method = DiscrepancyMethod::enumeration_exact;
  double se = 0.0;
  double method_error = 0.0;
  double delta_theta4 = 0.0;
  std::string witness;
  /// se and quadrature error both below discrepancy/5.
  bool usable = false;
};

struct RateCurvePoint {
  std::size_t n = 0;
  std::size_t usable = 0;
  std::size_t total = 0;
  double median = 0.0;
  double p90 = 0.0;
  /// Fewer than half the rows usable, or the median within twice the noise floor.
  bool noise_limited = false;
};

struct PolicySummary {
  ThetaPolicy policy = ThetaPolicy::equal;
  std::vector<RateCurvePoint> curve;
  std::optional<SlopeFit> fit;
  std::string flag;  ///< empty when the fit succeeded
};

struct RateReport {
  ExperimentConfig config;
  std::string distribution_label;
  std::string set_class;
  std::vector<std::size_t> n_grid;  ///< grid actually run
  std::vector<RateRow> rows;
  std::vector<PolicySummary> summaries;
  std::vector<std::string> warnings;
  /// Discrepancy of an exact Gaussian sample of the same size (k ≥ 2).
  std::optional<double> noise_floor;

  const PolicySummary* summary(ThetaPolicy p) const;
};

/// Decay of the median curves between two grid points.
struct ScalingComparison {
  std::size_t n_from = 0;
  std::size_t n_to = 0;
  /// n_to requested before falling back past noise-limited points.
  std::size_t n_requested = 0;
  bool fallback = false;
  double equal_ratio = 0.0;    ///< median(n_from) / median(n_to)
  double sampled_ratio = 0.0;
  std::string note;
};

/// Compares the first and last grid points; when the sampled curve is noise
/// limited at the last point, n_to moves down to the largest point that is not.
std::optional<ScalingComparison> scaling_comparison(const RateReport& report);

RateReport run_rate(const ExperimentConfig& config);
std::string rate_csv(const RateReport& report);
std::string rate_json(const RateReport& report);

struct Lemma2Case {
  std::size_t id = 0;
  std::size_t k = 0;
  std::string law;
  std::size_t n = 0;
  std::string theta_kind;
  double delta_theta4 = 0.0;
  double excluded_mass = 0.0;
  bool passed_filter = false;
  CovarianceBoundCheck check;
  std::string error;  ///< non-empty when normalization failed
};

struct Lemma2Record {
  std::size_t attempts = 0;
  std::size_t filtered_out = 0;
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  std::size_t truncation_active = 0;
  double max_quadratic_form_slack = 0.0;  ///< max of ratio / bound
  double max_d_minus_identity = 0.0;
  double max_d_inverse = 0.0;
  std::vector<Lemma2Case> cases;
  bool passed() const { return violations == 0 && evaluated > 0; }
};

/// Random (k, law, n, θ) configurations until `lemma2_configs` pass the
/// δ_θ⁴ ≤ 1/(8k) filter or `lemma2_max_attempts` is reached.
Lemma2Record run_lemma2_suite(const ExperimentConfig& config);
std::string lemma2_json(const ExperimentConfig& config, const Lemma2Record& record);

std::string concentration_csv(const ConcentrationReport& report);
std::string concentration_json(const ExperimentConfig& config, const DistributionSpec& d,
                               const ConcentrationReport& report);

/// Coefficient table of P_r: columns nu (quoted, comma joined), coeff.
std::string edgeworth_csv(const EdgeworthPolynomial& p);
/// P_r for a single summand with the law's own cumulants.
EdgeworthPolynomial edgeworth_for_law(const DistributionSpec& d, unsigned r);

std::string discrepancy_json(const DiscrepancyResult& result, const DistributionSpec& d,
                             const WeightVector& theta, std::uint64_t seed);

/// Writes `content` to `dir/name`, creating `dir`; returns the path.
std::string write_report(const std::string& dir, const std::string& name,
                         const std::string& content);

/// %.17g.
std::string format17(double v);

}  // namespace wclt
