// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes or fails only among the ids
// given to --known-unattainable, 2 otherwise, 1 on usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "wclt/charfun.hpp"
#include "wclt/distribution.hpp"
#include "wclt/edgeworth.hpp"
#include "wclt/experiments.hpp"
#include "wclt/moments.hpp"
#include "wclt/rng.hpp"
#include "wclt/sphere.hpp"

using wclt::DistributionSpec;
using wclt::MultiIndex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 7;
  unsigned threads = 0;
  std::string out_dir = "acceptance_reports";
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

DistributionSpec random_law(wclt::Rng& rng, std::size_t k, std::size_t atoms) {
  std::vector<wclt::Atom> a;
  double total = 0.0;
  for (std::size_t i = 0; i < atoms; ++i) {
    wclt::Atom at;
    for (std::size_t j = 0; j < k; ++j) at.point.push_back(rng.uniform() * 4.0 - 2.0);
    at.prob = 0.1 + rng.uniform();
    total += at.prob;
    a.push_back(at);
  }
  for (auto& at : a) at.prob /= total;
  return DistributionSpec(k, a, "random", true);
}

std::vector<unsigned> entries(const MultiIndex& nu) { return {nu.entries().begin(), nu.entries().end()}; }

Outcome edgeworth_oracle(const Options&) {
  wclt::Rng rng(0xed6e);
  double worst = 0.0;
  std::size_t coefficients = 0;
  for (int table = 0; table < 50; ++table) {
    for (std::size_t k = 1; k <= 3; ++k) {
      const wclt::CumulantTable kappa(k, 6, [&](const MultiIndex&) { return rng.uniform() * 4.0 - 2.0; });
      for (unsigned r = 0; r <= 4; ++r) {
        const auto p = wclt::build_P(r, kappa);
        const auto expected = oracle::formal_exponential_coefficient(
            k, r, [&](const oracle::Exponents& e) { return kappa[MultiIndex(std::vector<unsigned>(e))]; });
        double scale = 0.0;
        for (const auto& [e, c] : expected) scale = std::max(scale, std::abs(c));
        for (const auto& [e, c] : expected) {
          const double got = p.coefficient(MultiIndex(std::vector<unsigned>(e)));
          worst = std::max(worst, std::abs(got - c) / std::max(std::abs(c), 1e-12 * scale));
          ++coefficients;
        }
        for (const auto& [nu, c] : p.coefficients()) {
          if (!expected.count(entries(nu)) && c != 0.0) worst = std::max(worst, 1.0);
        }
      }
    }
  }
  return {worst <= 1e-10, "max relative coefficient error " + fmt(worst) + " over " +
                              std::to_string(coefficients) + " coefficients (r <= 4, k <= 3, 50 tables)"};
}

Outcome moments_and_monotonicity(const Options&) {
  wclt::Rng rng(0x303e);
  double roundtrip = 0.0, oracle_gap = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t k = 1 + rep % 3;
    const unsigned s = k == 1 ? 8 : (k == 2 ? 6 : 5);
    const auto law = random_law(rng, k, 2 + rep % 5);
    const auto m = wclt::exact_moments(law, s);
    const auto c = wclt::cumulants_from_moments(m);
    const auto back = wclt::moments_from_cumulants(c);
    const auto reference = oracle::cumulants_by_log_series(
        k, s, [&](const oracle::Exponents& e) { return m[MultiIndex(std::vector<unsigned>(e))]; });
    for (const auto& nu : m.indices()) {
      roundtrip = std::max(roundtrip, std::abs(back[nu] - m[nu]) / std::max(1.0, std::abs(m[nu])));
      const double want = reference.at(entries(nu));
      oracle_gap = std::max(oracle_gap, std::abs(c[nu] - want) / std::max(1.0, std::abs(want)));
    }
  }
  const auto rad = wclt::cumulants_from_moments(wclt::exact_moments(DistributionSpec::rademacher_product(1), 4));
  const double kappa4_error = std::abs(rad[MultiIndex{4}] + 2.0);

  std::size_t violations = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    const std::size_t k = 1 + rep % 3;
    std::vector<DistributionSpec> laws;
    std::vector<double> theta;
    for (std::size_t j = 0; j < n; ++j) {
      laws.push_back(random_law(rng, k, 2 + static_cast<std::size_t>(rng.uniform() * 4)));
      theta.push_back(rng.uniform() + 0.05);
    }
    const auto profile = wclt::moment_ratio_profile(laws, theta, 8);
    for (std::size_t i = 1; i < profile.size(); ++i) {
      if (profile[i] < profile[i - 1] * (1 - 1e-12)) ++violations;
    }
  }
  const bool pass = roundtrip <= 1e-12 && oracle_gap <= 1e-8 && kappa4_error <= 1e-12 && violations == 0;
  return {pass, "roundtrip " + fmt(roundtrip) + ", vs log-series " + fmt(oracle_gap) +
                    ", |kappa4 + 2| " + fmt(kappa4_error) + ", monotonicity violations " +
                    std::to_string(violations) + "/200 collections"};
}

Outcome lemma2(const Options& o) {
  wclt::ExperimentConfig c;
  c.seed = o.seed;
  const auto rec = wclt::run_lemma2_suite(c);
  wclt::write_report(o.out_dir, "lemma2.json", wclt::lemma2_json(c, rec));
  return {rec.passed() && rec.evaluated == 500,
          std::to_string(rec.evaluated) + " configurations (" + std::to_string(rec.filtered_out) +
              " filtered, " + std::to_string(rec.truncation_active) + " with truncation), " +
              std::to_string(rec.violations) + " violations"};
}

Outcome sphere_moments(const Options& o) {
  constexpr std::size_t kDraws = 1'000'000;
  std::ostringstream detail;
  bool pass = true;
  for (std::size_t n : {8, 64, 512}) {
    double s2 = 0, s2sq = 0, s4 = 0, s4sq = 0;
    for (std::size_t i = 0; i < kDraws; ++i) {
      const auto th = wclt::sample_uniform(n, o.seed, i);
      const double a = th[0] * th[0], b = a * a;
      s2 += a;
      s2sq += a * a;
      s4 += b;
      s4sq += b * b;
    }
    const double d = kDraws;
    const double m2 = s2 / d, m4 = s4 / d;
    const double se2 = std::sqrt((s2sq / d - m2 * m2) / d), se4 = std::sqrt((s4sq / d - m4 * m4) / d);
    const double z2 = (m2 - 1.0 / n) / se2;
    const double z4 = (m4 - 3.0 / (n * (n + 2.0))) / se4;
    pass = pass && std::abs(z2) <= 3 && std::abs(z4) <= 3;
    detail << "n=" << n << ": z2=" << fmt(z2, 3) << " z4=" << fmt(z4, 3) << "; ";
  }
  return {pass, detail.str() + "1e6 draws each"};
}

Outcome inversion_vs_enumeration(const Options& o) {
  const auto rad = DistributionSpec::rademacher_product(1);
  wclt::Rng rng(o.seed, 0x1ef, 0);
  double worst = 0.0;
  std::size_t rejected = 0;
  double widest_band = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto theta = wclt::sample_uniform(16, o.seed, 0x5000 + i);
    const std::vector<double> w(theta.values().begin(), theta.values().end());
    const auto law = oracle::rademacher_enumeration(w);
    const wclt::ProductCF p(rad, theta.values());
    const wclt::InversionGrid grid(p, wclt::InversionSettings{});
    // A jump of mass q at distance δ from x shifts the truncated integral by about q/(πTδ).
    const double band = std::ldexp(1.0, -16) / (std::numbers::pi * grid.T() * 1e-5);
    widest_band = std::max(widest_band, band);
    for (int accepted = 0; accepted < 100;) {
      const double x = rng.uniform() * 6 - 3;
      const auto it = std::lower_bound(law.begin(), law.end(), std::pair{x, 0.0});
      double nearest = 1e9;
      if (it != law.end()) nearest = it->first - x;
      if (it != law.begin()) nearest = std::min(nearest, x - std::prev(it)->first);
      if (nearest < band) {
        ++rejected;
        continue;
      }
      ++accepted;
      worst = std::max(worst, std::abs(grid.cdf(x) - oracle::cdf_from_enumeration(law, x)));
    }
  }
  return {worst <= 1e-5, "max |error| " + fmt(worst) + " at 20x100 points; " + std::to_string(rejected) +
                             " draws within " + fmt(widest_band, 2) + " of an atom redrawn"};
}

wclt::ExperimentConfig rate_config(const Options& o) {
  wclt::ExperimentConfig c;
  c.seed = o.seed;
  c.threads = o.threads;
  c.distribution = "rademacher_product";
  c.dimension = 1;
  return c;
}

struct Reports {
  std::vector<std::string> contents;
};

wclt::RateReport equal_run(const Options& o, Reports& out) {
  auto c = rate_config(o);
  c.policies = {wclt::ThetaPolicy::equal};
  auto r = wclt::run_rate(c);
  out.contents.push_back(wclt::rate_csv(r));
  out.contents.push_back(wclt::rate_json(r));
  return r;
}

Outcome equal_weights(const Options& o, Reports& out) {
  const auto r = equal_run(o, out);
  wclt::write_report(o.out_dir + "/equal", "rate.csv", out.contents[0]);
  wclt::write_report(o.out_dir + "/equal", "rate.json", out.contents[1]);
  const auto* s = r.summary(wclt::ThetaPolicy::equal);
  if (!s->fit) return {false, "no slope: " + s->flag};
  double lo = 1e300, hi = 0.0;
  for (const auto& pt : s->curve) {
    const double v = std::sqrt(static_cast<double>(pt.n)) * pt.median;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double spread = hi / lo - 1.0;
  const double slope = s->fit->slope;
  return {slope >= -0.6 && slope <= -0.4 && spread < 0.2,
          "slope " + fmt(slope) + ", sqrt(n)-scaled values in [" + fmt(lo) + ", " + fmt(hi) +
              "] (spread " + fmt(100 * spread, 3) + "%)"};
}

Outcome typical_weights(const Options& o, Reports& out) {
  Reports eq;
  const auto equal = equal_run(o, eq);
  auto c = rate_config(o);
  c.policies = {wclt::ThetaPolicy::sampled};
  c.replicates = 32;
  const auto r = wclt::run_rate(c);
  out.contents = {wclt::rate_csv(r), wclt::rate_json(r)};
  wclt::write_report(o.out_dir + "/sampled", "rate.csv", out.contents[0]);
  wclt::write_report(o.out_dir + "/sampled", "rate.json", out.contents[1]);
  const auto* s = r.summary(wclt::ThetaPolicy::sampled);
  if (!s->fit) return {false, "no slope: " + s->flag};
  const double eq_last = equal.summary(wclt::ThetaPolicy::equal)->curve.back().median;
  const auto& last = s->curve.back();
  const double ratio = last.median > 0 ? eq_last / last.median : 0.0;
  const double slope = s->fit->slope;
  return {slope >= -1.15 && slope <= -0.8 && ratio >= 8.0 && last.n == 4096,
          "median-curve slope " + fmt(slope) + " (R=32), equal/sampled at n=" + std::to_string(last.n) +
              " = " + fmt(ratio)};
}

Outcome two_dimensional(const Options& o, Reports& out) {
  auto c = rate_config(o);
  c.dimension = 2;
  c.n_grid = {32, 128, 512};
  c.mc_samples = 10'000'000;
  c.replicates = 32;
  c.set_class = "halfspaces:16";
  const auto r = wclt::run_rate(c);
  out.contents = {wclt::rate_csv(r), wclt::rate_json(r)};
  wclt::write_report(o.out_dir + "/k2", "rate.csv", out.contents[0]);
  wclt::write_report(o.out_dir + "/k2", "rate.json", out.contents[1]);
  const auto cmp = wclt::scaling_comparison(r);
  if (!cmp || cmp->n_to == cmp->n_from) return {false, cmp ? cmp->note : "no comparison available"};
  std::string detail = "n " + std::to_string(cmp->n_from) + " -> " + std::to_string(cmp->n_to) +
                       ": sampled decay " + fmt(cmp->sampled_ratio) + ", equal decay " +
                       fmt(cmp->equal_ratio) + ", noise floor " + fmt(r.noise_floor.value_or(0.0));
  if (cmp->fallback) detail += "; " + cmp->note;
  return {cmp->sampled_ratio >= 3.0 && cmp->equal_ratio <= 2.8, detail};
}

Outcome concentration(const Options& o, Reports& out) {
  wclt::ExperimentConfig c;
  c.seed = o.seed;
  c.threads = o.threads;
  const auto grid = wclt::default_t_grid();
  const auto skew = DistributionSpec::skewed_three_point();
  const auto r = wclt::concentration_experiment(256, 10'000, skew, MultiIndex{3}, grid, o.seed,
                                                c.effective_threads());
  const auto rad = DistributionSpec::rademacher_product(1);
  const auto sym = wclt::concentration_experiment(256, 1'000, rad, MultiIndex{3}, grid, o.seed,
                                                  c.effective_threads());
  out.contents = {wclt::concentration_csv(r), wclt::concentration_json(c, skew, r)};
  wclt::write_report(o.out_dir + "/concentration", "skewed.csv", out.contents[0]);
  wclt::write_report(o.out_dir + "/concentration", "skewed.json", out.contents[1]);
  auto nonincreasing = [](const std::vector<double>& v) {
    return std::is_sorted(v.rbegin(), v.rend());
  };
  const bool monotone = nonincreasing(r.p_hat_s1) && nonincreasing(r.p_hat_s2);
  const bool s1_zero = sym.max_s1 == 0.0 &&
                       std::all_of(sym.p_hat_s1.begin(), sym.p_hat_s1.end(), [](double p) { return p == 0.0; });
  const bool e1 = r.fit_s1.fitted && r.fit_s1.exponent >= 0.5 && r.fit_s1.exponent <= 0.9;
  const bool e2 = r.fit_s2.fitted && r.fit_s2.exponent >= 0.35 && r.fit_s2.exponent <= 0.7;
  auto show = [](const wclt::ExponentFit& f) { return f.fitted ? fmt(f.exponent) : std::string("unfitted"); };
  return {monotone && s1_zero && e1 && e2,
          std::string("monotone ") + (monotone ? "yes" : "no") + ", S1 exponent " + show(r.fit_s1) +
              " (band [0.5, 0.9]), S2 exponent " + show(r.fit_s2) + " (band [0.35, 0.7]), symmetric S1 == 0 " +
              (s1_zero ? "yes" : "no")};
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome(const Options&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  Options o;
  std::vector<int> known;
  std::vector<int> only;
  app.add_option("--seed", o.seed, "base seed");
  app.add_option("--threads", o.threads, "worker threads (0 = all)");
  app.add_option("--out-dir", o.out_dir, "directory for the generated reports");
  app.add_option("--known-unattainable", known, "criteria whose failure is documented")->delimiter(',');
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::vector<Reports> first(4), second(4);
  std::vector<Criterion> criteria{
      {1, "edgeworth polynomials vs formal exponential", 10, edgeworth_oracle},
      {2, "moment-cumulant roundtrip and ratio monotonicity", 5, moments_and_monotonicity},
      {3, "covariance bounds after truncation", 30, lemma2},
      {4, "sphere moments", 20, sphere_moments},
      {5, "inversion vs 2^16 enumeration", 30, inversion_vs_enumeration},
      {6, "equal-weights rate", 120, [&](const Options& x) { return equal_weights(x, first[0]); }},
      {7, "typical-weights rate", 1200, [&](const Options& x) { return typical_weights(x, first[1]); }},
      {8, "two-dimensional decay", 1800, [&](const Options& x) { return two_dimensional(x, first[2]); }},
      {9, "concentration exponents", 600, [&](const Options& x) { return concentration(x, first[3]); }},
      {10, "byte-identical reruns", 0, [&](const Options& x) {
         Options again = x;
         again.out_dir = x.out_dir + "/rerun";
         again.threads = x.threads == 1 ? 2 : 1;
         std::vector<std::string> differing;
         const std::vector<std::function<Outcome(const Options&)>> reruns{
             [&](const Options& y) { return equal_weights(y, second[0]); },
             [&](const Options& y) { return typical_weights(y, second[1]); },
             [&](const Options& y) { return two_dimensional(y, second[2]); },
             [&](const Options& y) { return concentration(y, second[3]); }};
         std::size_t compared = 0;
         for (std::size_t i = 0; i < reruns.size(); ++i) {
           if (first[i].contents.empty()) continue;
           reruns[i](again);
           ++compared;
           if (first[i].contents != second[i].contents) differing.push_back(std::to_string(6 + i));
         }
         if (compared == 0) return Outcome{false, "criteria 6-9 were not run"};
         std::string list;
         for (const auto& d : differing) list += (list.empty() ? "" : ",") + d;
         return Outcome{differing.empty(), std::to_string(compared) + " report sets rerun with " +
                                              std::to_string(again.threads) + " thread(s); " +
                                              (differing.empty() ? "all identical" : "differing: " + list)};
       }}};

  const std::set<int> known_set(known.begin(), known.end());
  const std::set<int> only_set(only.begin(), only.end());
  int unexpected = 0, failed = 0;
  for (const auto& c : criteria) {
    if (!only_set.empty() && !only_set.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run(o);
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt(seconds, 3) + " s";
    if (c.budget_seconds > 0) {
      timing += " of " + fmt(c.budget_seconds, 4) + " s";
      if (seconds > c.budget_seconds) {
        out.pass = false;
        out.detail += "; over time budget";
      }
    }
    std::string status = out.pass ? "PASS" : "FAIL";
    if (!out.pass) {
      ++failed;
      if (known_set.count(c.id)) {
        status += " (documented as unattainable)";
      } else {
        ++unexpected;
      }
    }
    std::cout << "criterion " << c.id << " " << status << " | " << c.name << " | " << out.detail << " | "
              << timing << std::endl;
  }
  std::cout << failed << " failed, " << unexpected << " unexpected" << std::endl;
  return unexpected == 0 ? 0 : 2;
}
