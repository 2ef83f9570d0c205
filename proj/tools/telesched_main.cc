// Command-line driver: experiment sweeps, single runs and theorem checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "telesched/config_io.h"
#include "telesched/experiments.h"
#include "telesched/oracle.h"

namespace {

using namespace telesched;

struct ExperimentCommand {
  CLI::App* app = nullptr;
  ExperimentSpec defaults;
  std::map<std::string, std::string> flags;
  std::string config_path;
  std::string svg_path;
};

void add_experiment_options(ExperimentCommand& cmd) {
  for (const auto& key : setting_keys()) {
    cmd.app->add_option("--" + key, cmd.flags[key], "override " + key);
  }
  cmd.app->add_option("--config", cmd.config_path, "key = value file; its entries override flags");
  cmd.app->add_option("--svg", cmd.svg_path, "also write a simple SVG plot");
}

ExperimentSpec resolve(ExperimentCommand& cmd) {
  ExperimentSpec spec = cmd.defaults;
  for (const auto& key : setting_keys()) {
    if (cmd.app->count("--" + key) > 0) apply_setting(spec, key, cmd.flags.at(key));
  }
  if (!cmd.config_path.empty()) apply_settings(spec, read_key_value_file(cmd.config_path));
  spec.validate();
  return spec;
}

std::string sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

void emit(const ExperimentSpec& spec, const std::vector<ResultRow>& rows, const std::vector<GapRow>& gaps) {
  if (spec.out.empty()) {
    write_rows_csv(std::cout, rows);
    if (!gaps.empty()) {
      std::cout << '\n';
      write_gaps_csv(std::cout, gaps);
    }
    return;
  }
  auto os = open_out(spec.out);
  write_rows_csv(os, rows);
  if (!gaps.empty()) {
    auto gs = open_out(sibling(spec.out, ".gaps.csv"));
    write_gaps_csv(gs, gaps);
  }
  auto ms = open_out(spec.out + ".manifest.json");
  auto m = manifest(spec, kResultColumns);
  if (!gaps.empty()) m["gap_columns"] = kGapColumns;
  ms << m.dump(2) << '\n';
  std::cerr << "wrote " << spec.out << '\n';
}

// Mean against the sweep axis, one series per (system or rate, policy).
void plot_sweep(const std::string& path, const std::string& title, const std::string& x_label,
                const std::vector<ResultRow>& rows, bool by_load) {
  std::map<std::string, PlotSeries> series;
  for (const auto& r : rows) {
    const std::string key = "b=" + std::to_string(r.batch_size) + " le=" + std::to_string(int(r.lambda_e)) + " " +
                            r.policy;
    auto& s = series[key];
    s.label = key;
    s.dashed = r.policy != "fqf";
    s.x.push_back(by_load ? r.load : static_cast<double>(r.batch_size));
    s.y.push_back(r.mean);
  }
  std::vector<PlotSeries> list;
  for (auto& [k, s] : series) list.push_back(s);
  auto os = open_out(path);
  write_svg_plot(os, title, x_label, "average Pr[e']", list);
}

int run_verify(std::uint64_t instances, std::size_t max_k, std::uint64_t max_rounds, double p_min, double p_max,
               std::uint64_t max_count, std::uint64_t seed) {
  bool ok = true;

  std::vector<double> grid;
  for (int i = 0; i < 25; ++i) grid.push_back(0.01 + 0.02 * i);
  const auto sweep = oracle::sweep_interchange(max_count, grid);
  const bool sweep_ok = sweep.non_positive == 0 && sweep.factor_non_positive == 0 && sweep.boundary_nonzero == 0 &&
                        sweep.max_factorization_error <= 1e-12;
  ok = ok && sweep_ok;
  std::printf("[%s] interchange inequality: %llu cases, min gap %.3e, max |gap - factored/2| %.3e, "
              "%llu equal-round cases with zero gap\n",
              sweep_ok ? "PASS" : "FAIL", static_cast<unsigned long long>(sweep.cases), sweep.min_gap,
              sweep.max_factorization_error, static_cast<unsigned long long>(sweep.boundary_cases));

  const auto adaptive = oracle::check_fqf_adaptive(instances, seed, max_k, max_rounds, p_min, p_max, 1e-12);
  const bool adaptive_ok = adaptive.failures == 0;
  ok = ok && adaptive_ok;
  std::printf("[%s] FQF vs optimal non-anticipative policy: %llu instances, %llu failures, worst shortfall %.3e\n",
              adaptive_ok ? "PASS" : "FAIL", static_cast<unsigned long long>(adaptive.instances),
              static_cast<unsigned long long>(adaptive.failures), adaptive.worst_shortfall);

  const auto hindsight = oracle::check_fqf_against_permutations(instances, seed, max_k, max_rounds, p_min, p_max,
                                                                1e-12);
  const bool hindsight_ok = hindsight.failures == 0;
  ok = ok && hindsight_ok;
  std::printf("[%s] FQF vs hindsight permutation maximum (fixed trajectories): %llu instances, %llu failures, "
              "worst shortfall %.3e\n",
              hindsight_ok ? "PASS" : "FAIL", static_cast<unsigned long long>(hindsight.instances),
              static_cast<unsigned long long>(hindsight.failures), hindsight.worst_shortfall);
  if (!hindsight_ok) std::printf("       first failure: %s\n", hindsight.first_failure.c_str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Syndrome-aware teleportation scheduling simulator"};
  app.require_subcommand(1);

  ExperimentCommand fig1{app.add_subcommand("fig1", "batch size sweep, single batch at t = 0"), fig1_defaults()};
  ExperimentCommand fig2{app.add_subcommand("fig2", "fidelity CDF for a stream with infinite buffer"),
                         fig2_defaults()};
  ExperimentCommand fig3{app.add_subcommand("fig3", "load sweep with batched arrivals and pushout"),
                         fig3_defaults()};
  ExperimentCommand single{app.add_subcommand("run", "free-form simulation"), run_defaults()};
  for (auto* cmd : {&fig1, &fig2, &fig3, &single}) add_experiment_options(*cmd);

  auto* verify = app.add_subcommand("verify-theorem", "check batch optimality of FQF");
  std::uint64_t instances = 1000;
  std::size_t max_k = 5;
  std::uint64_t max_rounds = 8;
  double p_min = 0.01;
  double p_max = 0.45;
  std::uint64_t max_count = 12;
  std::uint64_t verify_seed = 1;
  verify->add_option("--instances", instances, "random batch instances");
  verify->add_option("--max-k", max_k, "largest batch size");
  verify->add_option("--max-rounds", max_rounds, "largest round count at the last service");
  verify->add_option("--p-min", p_min);
  verify->add_option("--p-max", p_max);
  verify->add_option("--max-count", max_count, "largest count in the interchange grid");
  verify->add_option("--seed", verify_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      return run_verify(instances, max_k, max_rounds, p_min, p_max, max_count, verify_seed);
    }
    if (*fig1.app) {
      const auto spec = resolve(fig1);
      const auto result = run_fig1(spec);
      emit(spec, result.rows, result.gaps);
      if (!fig1.svg_path.empty()) plot_sweep(fig1.svg_path, "Average Pr[e'] per batch", "batch size", result.rows, false);
    } else if (*fig2.app) {
      const auto spec = resolve(fig2);
      const auto result = run_fig2(spec);
      std::vector<ResultRow> rows;
      for (const auto& p : result.policies) rows.push_back(p.row);
      emit(spec, rows, {});
      if (!spec.out.empty()) {
        auto cs = open_out(sibling(spec.out, ".cdf.csv"));
        write_cdf_csv(cs, result);
      }
      for (const auto& p : result.policies) {
        for (const auto& s : p.steps) {
          std::fprintf(stderr, "%s step x=%llu target=%.4f location=%.4f window_mass=%.4f\n",
                       std::string(policy_name(p.policy)).c_str(), static_cast<unsigned long long>(s.minus_count),
                       s.target, s.location, s.window_mass);
        }
      }
      if (!fig2.svg_path.empty()) {
        std::vector<PlotSeries> series;
        for (const auto& p : result.policies) {
          PlotSeries s{std::string(policy_name(p.policy)), {}, {}, p.policy != PolicyKind::kFqf};
          for (int i = 0; i <= 500; ++i) {
            s.x.push_back(0.5 + 0.001 * i);
            s.y.push_back(p.histogram.cdf(0.5 + 0.001 * i));
          }
          series.push_back(std::move(s));
        }
        auto os = open_out(fig2.svg_path);
        write_svg_plot(os, "CDF of Pr[e']", "Pr[e']", "CDF", series);
      }
    } else if (*fig3.app) {
      const auto spec = resolve(fig3);
      const auto result = run_fig3(spec);
      emit(spec, result.rows, result.gaps);
      if (!fig3.svg_path.empty()) plot_sweep(fig3.svg_path, "Average fidelity vs load", "load", result.rows, true);
    } else if (*single.app) {
      const auto spec = resolve(single);
      const auto seeds = replication_seeds(spec.base.seed, spec.replications);
      std::vector<ResultRow> rows;
      for (const auto policy : spec.policies) {
        SimConfig c = spec.base;
        c.policy = policy;
        const auto runs = run_replications(c, seeds, spec.threads);
        rows.push_back(make_row("run", c, runs, seeds, c.score_drops_as_zero));
      }
      emit(spec, rows, {});
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
