#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "telesched/config_io.h"
#include "telesched/experiments.h"
#include "telesched/oracle.h"
#include "telesched/scheduling.h"
#include "telesched/sim_engine.h"
#include "telesched/syndrome_analytics.h"

namespace py = pybind11;
using namespace telesched;

namespace {

using Settings = std::map<std::string, std::string>;

ExperimentSpec spec_from(ExperimentSpec spec, const Settings& settings) {
  for (const auto& [k, v] : settings) apply_setting(spec, k, v);
  spec.validate();
  return spec;
}

py::dict row_dict(const ResultRow& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  d["batch_size"] = r.batch_size;
  d["lambda_e"] = r.lambda_e;
  d["lambda_r"] = r.lambda_r;
  d["load"] = r.load;
  d["buffer"] = r.buffer == kUnboundedCapacity ? py::object(py::none()) : py::cast(r.buffer);
  d["policy"] = r.policy;
  d["mean"] = r.mean;
  d["ci95"] = r.ci95;
  d["drop_rate"] = r.drop_rate;
  d["replications"] = r.replications;
  d["departures"] = r.departures;
  d["seed_digest"] = r.seed_digest;
  return d;
}

py::dict gap_dict(const GapRow& g) {
  py::dict d;
  d["batch_size"] = g.batch_size;
  d["lambda_e"] = g.lambda_e;
  d["load"] = g.load;
  d["gap_mean"] = g.gap.mean;
  d["gap_ci95"] = g.gap.ci95;
  d["replications"] = g.gap.n;
  return d;
}

py::dict sweep_dict(const SweepResult& s) {
  py::list rows, gaps;
  for (const auto& r : s.rows) rows.append(row_dict(r));
  for (const auto& g : s.gaps) gaps.append(gap_dict(g));
  py::dict d;
  d["rows"] = rows;
  d["gaps"] = gaps;
  return d;
}

py::dict simulate(const Settings& settings) {
  const auto spec = spec_from(run_defaults(), settings);
  RunMetrics m;
  {
    py::gil_scoped_release release;
    m = run(spec.base);
  }
  py::dict d;
  d["mean_fidelity"] = m.mean_fidelity(spec.base.score_drops_as_zero);
  d["mean_realized_no_error"] = m.mean_realized_no_error();
  d["drop_rate"] = m.drop_rate();
  d["arrivals"] = m.arrivals_count;
  d["departures"] = m.departures_count;
  d["pushouts"] = m.pushout_count;
  d["residual_occupancy"] = m.residual_occupancy;
  d["mean_occupancy"] = m.mean_occupancy;
  d["end_time"] = m.end_time;
  d["fidelities"] = m.fidelity_samples();
  d["departure_times"] = m.departure_times();
  return d;
}

py::dict fig2(const Settings& settings) {
  const auto spec = spec_from(fig2_defaults(), settings);
  Fig2Result result;
  {
    py::gil_scoped_release release;
    result = run_fig2(spec);
  }
  py::dict out;
  for (const auto& p : result.policies) {
    py::dict d = row_dict(p.row);
    py::list steps;
    for (const auto& s : p.steps) {
      py::dict sd;
      sd["minus_count"] = s.minus_count;
      sd["target"] = s.target;
      sd["location"] = s.location;
      sd["window_mass"] = s.window_mass;
      steps.append(sd);
    }
    d["steps"] = steps;
    std::vector<double> grid, cdf;
    for (int i = 0; i <= 500; ++i) {
      grid.push_back(0.5 + 0.001 * i);
      cdf.push_back(p.histogram.cdf(grid.back()));
    }
    d["cdf_x"] = grid;
    d["cdf"] = cdf;
    out[py::str(std::string(policy_name(p.policy)))] = d;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Syndrome-aware teleportation scheduling simulator";
  m.attr("__version__") = TELESCHED_VERSION;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::invalid_argument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("phase_flip_prob", &phase_flip_prob, py::arg("gamma"), py::arg("t"));
  m.def("cond_error_given_plus", &cond_error_given_plus, py::arg("p"));
  m.def("cond_error_given_minus", &cond_error_given_minus, py::arg("p"));
  m.def(
      "success_prob",
      [](std::uint64_t n_plus, std::uint64_t n_minus, double p) {
        return success_prob({n_plus, n_minus}, CondErrorProbs::from_flip_prob(p));
      },
      py::arg("n_plus"), py::arg("n_minus"), py::arg("p"));
  m.def(
      "teleport_fidelity",
      [](std::uint64_t n_plus, std::uint64_t n_minus, double p) {
        return teleport_fidelity({n_plus, n_minus}, CondErrorProbs::from_flip_prob(p));
      },
      py::arg("n_plus"), py::arg("n_minus"), py::arg("p"));

  m.def(
      "select_for_service",
      [](const std::string& policy, const std::vector<std::tuple<double, std::uint64_t, std::uint64_t>>& qubits,
         double p) {
        std::vector<QubitRecord> buffer;
        for (std::size_t i = 0; i < qubits.size(); ++i) {
          auto q = QubitRecord::fresh(i, std::get<0>(qubits[i]));
          q.history = {std::get<1>(qubits[i]), std::get<2>(qubits[i])};
          buffer.push_back(q);
        }
        return service_index(parse_policy(policy), buffer, CondErrorProbs::from_flip_prob(p));
      },
      py::arg("policy"), py::arg("qubits"), py::arg("p"),
      "Index of the qubit to serve; qubits are (arrival_time, n_plus, n_minus).");

  m.def("simulate", &simulate, py::arg("settings") = Settings{});
  m.def(
      "fig1",
      [](const Settings& s) {
        const auto spec = spec_from(fig1_defaults(), s);
        py::gil_scoped_release release;
        auto r = run_fig1(spec);
        py::gil_scoped_acquire acquire;
        return sweep_dict(r);
      },
      py::arg("settings") = Settings{});
  m.def("fig2", &fig2, py::arg("settings") = Settings{});
  m.def(
      "fig3",
      [](const Settings& s) {
        const auto spec = spec_from(fig3_defaults(), s);
        py::gil_scoped_release release;
        auto r = run_fig3(spec);
        py::gil_scoped_acquire acquire;
        return sweep_dict(r);
      },
      py::arg("settings") = Settings{});

  m.def(
      "interchange_gap",
      [](std::uint64_t m1, std::uint64_t m2, std::uint64_t m1p, std::uint64_t nj, std::uint64_t nl, double p) {
        const auto g = oracle::interchange_gap(m1, m2, m1p, nj, nl, p);
        return py::make_tuple(g.gap, g.factored);
      },
      py::arg("m1"), py::arg("m2"), py::arg("m1p"), py::arg("nj"), py::arg("nl"), py::arg("p"),
      "Returns (gap, factored); factored equals 2 * gap.");
  m.def(
      "adaptive_batch_values",
      [](const std::vector<std::uint64_t>& serve_rounds, double p) {
        const auto v = oracle::adaptive_batch_values(serve_rounds.size(), serve_rounds, p);
        return py::make_tuple(v.optimal, v.fqf);
      },
      py::arg("serve_rounds"), py::arg("p"), "Returns (optimal, fqf) expected batch totals.");
  m.def(
      "verify_theorem",
      [](std::uint64_t instances, std::uint64_t seed, std::size_t max_k, std::uint64_t max_rounds) {
        const auto h = oracle::check_fqf_against_permutations(instances, seed, max_k, max_rounds, 0.01, 0.45, 1e-12);
        const auto a = oracle::check_fqf_adaptive(instances, seed, max_k, max_rounds, 0.01, 0.45, 1e-12);
        py::dict d;
        d["instances"] = instances;
        d["hindsight_failures"] = h.failures;
        d["hindsight_worst_shortfall"] = h.worst_shortfall;
        d["adaptive_failures"] = a.failures;
        d["adaptive_worst_shortfall"] = a.worst_shortfall;
        return d;
      },
      py::arg("instances") = 1000, py::arg("seed") = 1, py::arg("max_k") = 5, py::arg("max_rounds") = 8);
}
