#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wclt/charfun.hpp"
#include "wclt/discrepancy.hpp"
#include "wclt/error.hpp"
#include "wclt/experiments.hpp"
#include "wclt/sphere.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSuiteFailure = 2;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
};

wclt::ExperimentConfig base_config(const Globals& g) {
  wclt::ExperimentConfig c;
  if (!g.config_path.empty()) c = wclt::load_config(g.config_path, c);
  if (g.seed) c.seed = *g.seed;
  if (g.out_dir) c.out_dir = *g.out_dir;
  if (g.threads) c.threads = *g.threads;
  return c;
}

std::string sibling_json(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted sums of random vectors: Edgeworth algebra, discrepancy rates, concentration"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--out-dir", g.out_dir, "report directory");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  // rate
  auto* rate = app.add_subcommand("rate", "discrepancy versus n for equal and sampled weights");
  rate->fallthrough();
  std::optional<std::string> rate_dist, rate_class, rate_grid, rate_policies;
  std::optional<std::size_t> rate_k, rate_reps, rate_mc;
  bool rate_recenter = false, rate_allow = false;
  rate->add_option("--dist", rate_dist, "distribution file or family name");
  rate->add_option("--k", rate_k, "dimension");
  rate->add_option("--n-grid", rate_grid, "comma separated n values");
  rate->add_option("--policies", rate_policies, "equal,sampled");
  rate->add_option("--replicates,-R", rate_reps, "sampled weight vectors per n");
  rate->add_option("--mc", rate_mc, "Monte Carlo samples (k >= 2)");
  rate->add_option("--class", rate_class, "halfspaces:<m> or balls (k >= 2)");
  rate->add_flag("--recenter", rate_recenter, "subtract the truncation mean A_n");
  rate->add_flag("--allow-unnormalized", rate_allow, "skip the mean 0 / covariance I check");

  // concentration
  auto* conc = app.add_subcommand("concentration", "tail curves of the cubic and quartic weight statistics");
  conc->fallthrough();
  std::optional<std::size_t> conc_n, conc_reps;
  std::string conc_dist, conc_nu = "3", conc_out;
  conc->add_option("--n", conc_n, "number of summands");
  conc->add_option("--reps", conc_reps, "number of weight draws M");
  conc->add_option("--dist", conc_dist, "distribution file or family name")->required();
  conc->add_option("--nu", conc_nu, "multi-index of order 3, e.g. 3 or 2,1");
  conc->add_option("--out", conc_out, "CSV path (JSON summary written alongside)");

  // lemma2
  auto* lemma2 = app.add_subcommand("lemma2", "covariance perturbation bounds on random configurations");
  lemma2->fallthrough();
  std::optional<std::size_t> lemma2_count;
  lemma2->add_option("--configs", lemma2_count, "configurations passing the filter");

  // edgeworth print
  auto* edge = app.add_subcommand("edgeworth", "Edgeworth polynomial tables");
  edge->require_subcommand(1);
  auto* edge_print = edge->add_subcommand("print", "coefficient table of P_r as CSV");
  std::string edge_dist;
  unsigned edge_r = 1;
  std::optional<std::size_t> edge_k;
  edge_print->add_option("--dist", edge_dist, "distribution file or family name")->required();
  edge_print->add_option("--r", edge_r, "order index r")->required()->check(CLI::Range(0U, wclt::kMaxEdgeworthOrder));
  edge_print->add_option("--k", edge_k, "dimension for family names");

  // discrepancy
  auto* disc = app.add_subcommand("discrepancy", "discrepancy of one weighted sum");
  disc->fallthrough();
  std::string disc_dist, disc_theta, disc_class = "intervals";
  std::size_t disc_mc = 0;
  std::optional<std::size_t> disc_k;
  disc->add_option("--dist", disc_dist, "distribution file or family name")->required();
  disc->add_option("--theta", disc_theta, "file | equal:<n> | sample:<n>:<seed>")->required();
  disc->add_option("--class", disc_class, "intervals | halfspaces:<m> | balls");
  disc->add_option("--mc", disc_mc, "Monte Carlo samples; 0 uses the exact 1D path");
  disc->add_option("--k", disc_k, "dimension for family names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    auto config = base_config(g);

    if (rate->parsed()) {
      config.mode = wclt::ExperimentMode::rate;
      if (rate_dist) config.distribution = *rate_dist;
      if (rate_k) config.dimension = *rate_k;
      if (rate_grid) wclt::apply_config_value(config, "n_grid", *rate_grid);
      if (rate_policies) wclt::apply_config_value(config, "policies", *rate_policies);
      if (rate_reps) config.replicates = *rate_reps;
      if (rate_mc) config.mc_samples = *rate_mc;
      if (rate_class) config.set_class = *rate_class;
      if (rate_recenter) config.recenter = true;
      if (rate_allow) config.allow_unnormalized = true;
      const auto report = wclt::run_rate(config);
      const auto csv = wclt::write_report(config.out_dir, "rate.csv", wclt::rate_csv(report));
      const auto json = wclt::write_report(config.out_dir, "rate.json", wclt::rate_json(report));
      for (const auto& s : report.summaries) {
        std::cout << wclt::to_string(s.policy) << ": ";
        if (s.fit) {
          std::cout << "slope " << s.fit->slope << " (r^2 " << s.fit->r_squared << ")\n";
        } else {
          std::cout << s.flag << '\n';
        }
      }
      std::cout << "wrote " << csv << " and " << json << '\n';
      return kExitOk;
    }

    if (conc->parsed()) {
      config.mode = wclt::ExperimentMode::concentration;
      if (conc_n) config.conc_n = *conc_n;
      if (conc_reps) config.conc_replicates = *conc_reps;
      config.nu = wclt::MultiIndex::parse(conc_nu);
      config.distribution = conc_dist;
      const auto d = wclt::resolve_distribution(conc_dist, config.nu.dimension(), config.allow_unnormalized);
      const auto grid = config.t_grid.empty() ? wclt::default_t_grid() : config.t_grid;
      const auto report = wclt::concentration_experiment(config.conc_n, config.conc_replicates, d,
                                                         config.nu, grid, config.seed,
                                                         config.effective_threads());
      const std::string csv_path =
          conc_out.empty() ? (std::filesystem::path(config.out_dir) / "concentration.csv").string()
                           : conc_out;
      const auto parent = std::filesystem::path(csv_path).parent_path().string();
      const auto name = std::filesystem::path(csv_path).filename().string();
      wclt::write_report(parent, name, wclt::concentration_csv(report));
      wclt::write_report(parent, std::filesystem::path(sibling_json(csv_path)).filename().string(),
                         wclt::concentration_json(config, d, report));
      auto show = [](const char* label, const wclt::ExponentFit& f) {
        std::cout << label << ": ";
        if (f.fitted) {
          std::cout << "exponent " << f.exponent << " over " << f.points << " points\n";
        } else {
          std::cout << "not fitted (" << f.points << " points in window)\n";
        }
      };
      show("S1", report.fit_s1);
      show("S2", report.fit_s2);
      return kExitOk;
    }

    if (lemma2->parsed()) {
      config.mode = wclt::ExperimentMode::lemma2;
      if (lemma2_count) config.lemma2_configs = *lemma2_count;
      const auto rec = wclt::run_lemma2_suite(config);
      const auto path = wclt::write_report(config.out_dir, "lemma2.json", wclt::lemma2_json(config, rec));
      std::cout << rec.evaluated << " configurations evaluated, " << rec.filtered_out
                << " filtered, " << rec.violations << " violations; wrote " << path << '\n';
      return rec.passed() ? kExitOk : kExitSuiteFailure;
    }

    if (edge_print->parsed()) {
      const auto d = wclt::resolve_distribution(edge_dist, edge_k.value_or(config.dimension),
                                                config.allow_unnormalized);
      std::cout << wclt::edgeworth_csv(wclt::edgeworth_for_law(d, edge_r));
      return kExitOk;
    }

    if (disc->parsed()) {
      const auto d = wclt::resolve_distribution(disc_dist, disc_k.value_or(config.dimension),
                                                config.allow_unnormalized);
      const auto theta = wclt::resolve_theta(disc_theta);
      wclt::DiscrepancyResult r;
      if (disc_mc == 0) {
        if (d.dimension() != 1) throw wclt::ParseError("k >= 2 needs --mc <M>");
        r = wclt::discrepancy_1d(d, theta);
      } else {
        auto cls = wclt::SetClass::parse(disc_class, d.dimension());
        cls.direction_seed = config.seed;
        wclt::MonteCarloOptions opt;
        opt.samples = disc_mc;
        opt.seed = config.seed;
        opt.threads = config.effective_threads();
        r = wclt::discrepancy_mc(d, theta, cls, opt);
      }
      std::cout << wclt::discrepancy_json(r, d, theta, config.seed);
      return kExitOk;
    }
  } catch (const wclt::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
