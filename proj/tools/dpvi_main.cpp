// Copyright 2026 The dpvi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner for the differentially private SVI/SSP solvers:
//   calibrate      exact noise calibration reports
//   make-instance  emit problem-instance JSON files
//   solve          run NSEG or NISPP under a policy, dump point + step CSV
//   gap            evaluate a strong gap for a point file
//   stability      coupled-trajectory per-run bound trials
//   experiment     replicated gap/stability studies over an n-grid

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dpvi/gap.hpp"
#include "dpvi/json_io.hpp"
#include "dpvi/parallel.hpp"
#include "dpvi/privacy.hpp"
#include "dpvi/stability.hpp"

namespace dpvi {
namespace {

struct PolicyArgs {
  std::string solver = "nseg";
  std::string policy = "multipass";
  double eps = 1.0;
  double eta = 1e-5;
  std::string custom_file;
};

bool policy_is_private(const std::string& policy) {
  return policy == "single-pass" || policy == "multipass";
}

NsegConfig nseg_config_for(const PolicyArgs& p, const ProblemInstance& inst,
                           int n, std::uint64_t seed) {
  NsegConfig cfg;
  if (p.policy == "single-pass") {
    cfg = nseg_single_pass_policy(n, inst.dim(), p.eps, p.eta, inst.M, inst.L,
                                  inst.D);
  } else if (p.policy == "multipass") {
    cfg = nseg_multipass_policy(n, inst.dim(), p.eps, p.eta, inst.M, inst.L,
                                inst.D);
  } else if (p.policy == "multipass-nonprivate") {
    cfg = nseg_nonprivate_multipass_policy(n, inst.M, inst.L, inst.D);
  } else if (p.policy == "custom") {
    const Json j = load_json(p.custom_file);
    cfg.T = j.at("T").get<int>();
    cfg.gamma.assign(cfg.T, j.at("gamma").get<double>());
    cfg.batch_size.assign(cfg.T, j.value("batch_size", 1));
    cfg.sigma_sq.assign(cfg.T, j.value("sigma_sq", 0.0));
    cfg.mode = sampling_mode_from_name(j.at("sampling_mode").get<std::string>());
  } else {
    throw std::invalid_argument("unknown policy: " + p.policy);
  }
  cfg.seed = seed;
  return cfg;
}

NisppConfig nispp_config_for(const PolicyArgs& p, const ProblemInstance& inst,
                             int n, std::uint64_t seed) {
  NisppConfig cfg;
  if (p.policy == "single-pass") {
    cfg = nispp_single_pass_policy(n, inst.dim(), p.eps, p.eta, inst.M, inst.L,
                                   inst.D);
  } else if (p.policy == "multipass") {
    cfg = nispp_multipass_policy(n, inst.dim(), p.eps, p.eta, inst.M, inst.L,
                                 inst.D);
  } else if (p.policy == "multipass-nonprivate") {
    cfg = nispp_nonprivate_multipass_policy(n, inst.M, inst.L, inst.D);
  } else if (p.policy == "custom") {
    const Json j = load_json(p.custom_file);
    cfg.K = j.at("K").get<int>();
    cfg.gamma.assign(cfg.K + 1, j.value("gamma", 1.0));
    cfg.lambda.assign(cfg.K + 1, j.at("lambda").get<double>());
    cfg.batch = j.value("batch_size", 1);
    cfg.nu = j.at("nu").get<double>();
    cfg.sigma_sq.assign(cfg.K + 1, j.value("sigma_sq", 0.0));
    cfg.mode = sampling_mode_from_name(j.at("sampling_mode").get<std::string>());
  } else {
    throw std::invalid_argument("unknown policy: " + p.policy);
  }
  cfg.seed = seed;
  return cfg;
}

SolverClosure make_solver_closure(const std::string& solver,
                                  const PolicyArgs& p,
                                  const ProblemInstance& inst) {
  if (solver == "nseg") {
    return [&p, &inst](const Dataset& data, std::uint64_t seed) {
      NsegConfig cfg = nseg_config_for(p, inst, data.n(), seed);
      return nseg_run(inst, data, cfg).output;
    };
  }
  return [&p, &inst](const Dataset& data, std::uint64_t seed) {
    NisppConfig cfg = nispp_config_for(p, inst, data.n(), seed);
    return nispp_run(inst, data, cfg).output;
  };
}

// ---------------------------------------------------------------------------

int cmd_calibrate(const std::string& mechanism, double sensitivity, double eps,
                  double eta, int steps, int batch, int n, double c1,
                  const std::vector<double>& budget_list) {
  CalibrationReport rep;
  rep.budget = PrivacyBudget{eps, eta};
  rep.mechanism = mechanism;
  rep.sensitivity = sensitivity;
  if (mechanism == "gaussian") {
    rep.sigma_sq = gaussian_mechanism_variance(sensitivity, eps, eta);
    rep.composition = "single release";
  } else if (mechanism == "subsampled") {
    const SubsampledSigma s =
        subsampled_composition_sigma(steps, sensitivity, batch, n, eps, eta, c1);
    rep.sigma_sq = s.sigma * s.sigma;
    rep.regime_ok = s.regime_ok;
    rep.composition = "subsampled adaptive composition, " +
                      std::to_string(steps) + " steps, batch " +
                      std::to_string(batch) + " of " + std::to_string(n);
  } else if (mechanism == "parallel") {
    if (budget_list.size() < 2 || budget_list.size() % 2 != 0)
      throw std::invalid_argument(
          "parallel composition: --budgets needs eps,eta pairs");
    std::vector<PrivacyBudget> budgets;
    for (std::size_t i = 0; i + 1 < budget_list.size(); i += 2)
      budgets.push_back(PrivacyBudget{budget_list[i], budget_list[i + 1]});
    const PrivacyBudget combined = parallel_composition(budgets);
    rep.budget = combined;
    rep.sigma_sq = 0.0;
    rep.composition = "parallel composition of " +
                      std::to_string(budgets.size()) + " mechanisms";
  } else {
    throw std::invalid_argument("unknown mechanism: " + mechanism);
  }
  std::cout << calibration_report_to_json(rep).dump(2) << "\n";
  return 0;
}

int cmd_make_instance(const std::string& family, const std::string& out,
                      int dim, int dim2, double M, double radius, double bias,
                      double entry_noise, double vec_noise, double cap,
                      double c_halfwidth, double skew, std::uint64_t seed) {
  InstanceFile file;
  if (family == "constant-op") {
    DataDistribution dist;
    dist.family = Family::kConstantOp;
    dist.law = ConstantOpLaw{dim, M, bias};
    file.distribution = dist;
    file.instance =
        make_instance(dist, FeasibleSet::ball(Vector::Zero(dim), radius));
  } else if (family == "matching-pennies" || family == "bilinear") {
    BilinearLaw law;
    if (family == "matching-pennies") {
      Matrix A(2, 2);
      A << 1, -1, -1, 1;
      law.base = BilinearPayload{A, Vector::Zero(2), Vector::Zero(2)};
      law.op_norm_cap = 2.0 + 2.0 * entry_noise;
    } else {
      Rng rng(seed);
      Matrix A(dim, dim2);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim2; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
      const double nrm = op_norm_power_iteration(A);
      if (nrm > 0.0) A /= nrm;  // unit operator norm base game
      Vector a(dim), b(dim2);
      for (int i = 0; i < dim; ++i) a[i] = 0.25 * rng.uniform(-1.0, 1.0);
      for (int j = 0; j < dim2; ++j) b[j] = 0.25 * rng.uniform(-1.0, 1.0);
      law.base = BilinearPayload{A, a, b};
      law.op_norm_cap = 1.0 + 2.0 * entry_noise;
    }
    law.entry_noise = entry_noise;
    law.a_noise = vec_noise;
    law.b_noise = vec_noise;
    DataDistribution dist;
    dist.family = Family::kBilinearSp;
    dist.law = law;
    file.distribution = dist;
    std::vector<FeasibleSet> factors;
    factors.push_back(FeasibleSet::simplex(
        static_cast<int>(law.base.A.rows()), 1.0));
    factors.push_back(FeasibleSet::simplex(
        static_cast<int>(law.base.A.cols()), 1.0));
    file.instance = make_instance(dist, FeasibleSet::product(std::move(factors)));
  } else if (family == "quadratic") {
    DataDistribution dist;
    dist.family = Family::kQuadraticVi;
    dist.law = QuadraticLaw{dim, cap, c_halfwidth, skew};
    file.distribution = dist;
    file.instance =
        make_instance(dist, FeasibleSet::ball(Vector::Zero(dim), radius));
  } else {
    throw std::invalid_argument("unknown family: " + family);
  }
  save_json(out, instance_to_json(file));
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_solve(const std::string& instance_path, const PolicyArgs& p, int n,
              std::uint64_t seed, const std::string& out_prefix,
              int probe_every) {
  const InstanceFile file = load_instance(instance_path);
  const ProblemInstance& inst = file.instance;
  const Dataset data = sample_dataset(file.distribution, n, seed);
  const GapSource emp = GapSource::empirical(data);

  std::ofstream csv(out_prefix + ".csv");
  if (!csv) throw std::runtime_error("cannot write " + out_prefix + ".csv");
  Json result;

  if (p.solver == "nseg") {
    NsegConfig cfg;
    try {
      cfg = nseg_config_for(p, inst, n, seed);
    } catch (const std::invalid_argument& e) {
      std::cerr << "policy infeasible: " << e.what() << "\n";
      return 1;
    }
    csv << "step,u_norm,w_norm,emp_gap\n";
    NsegEngine engine(inst, data, cfg);
    Rng sample(derive_seed(cfg.seed, 1)), noise1(derive_seed(cfg.seed, 2)),
        noise2(derive_seed(cfg.seed, 3));
    NsegStepDraws draws;
    for (int t = 1; t <= cfg.T; ++t) {
      engine.draw_step(t, sample, noise1, noise2, draws);
      engine.step(t, draws);
      csv << t << "," << engine.u().norm() << "," << engine.w().norm() << ",";
      if (probe_every > 0 && t % probe_every == 0)
        csv << strong_gap(inst, emp, engine.output()).value;
      csv << "\n";
    }
    result["point"] = vector_to_json(engine.output());
    result["config"] = nseg_config_to_json(cfg);
  } else {
    NisppConfig cfg;
    try {
      cfg = nispp_config_for(p, inst, n, seed);
    } catch (const std::invalid_argument& e) {
      std::cerr << "policy infeasible: " << e.what() << "\n";
      return 1;
    }
    csv << "k,nu_actual,inner_iterations,noise_norm,emp_gap\n";
    NisppEngine engine(inst, data, cfg);
    Rng sample(derive_seed(cfg.seed, 1)), noise(derive_seed(cfg.seed, 4));
    NisppStepDraws draws;
    for (int k = 0; k <= cfg.K; ++k) {
      engine.draw_step(k, sample, noise, draws);
      const NisppStepInfo info = engine.step(k, draws);
      csv << k << "," << info.cert.nu_actual << ","
          << info.cert.inner_iterations << "," << info.noise_norm << ",";
      if (probe_every > 0 && (k + 1) % probe_every == 0)
        csv << strong_gap(inst, emp, engine.output()).value;
      csv << "\n";
    }
    result["point"] = vector_to_json(engine.output());
    result["config"] = nispp_config_to_json(cfg);
  }
  save_json(out_prefix + ".point.json", result);
  std::cout << result["config"].dump(2) << "\n";
  return 0;
}

int cmd_gap(const std::string& instance_path, const std::string& point_path,
            const std::string& source, int n, std::uint64_t seed) {
  const InstanceFile file = load_instance(instance_path);
  const Vector point = vector_from_json(load_json(point_path));
  GapValue value;
  if (source == "population") {
    value = strong_gap(file.instance, GapSource::population(), point);
  } else if (source == "empirical") {
    const Dataset data = sample_dataset(file.distribution, n, seed);
    value = strong_gap(file.instance, GapSource::empirical(data), point);
  } else {
    throw std::invalid_argument("gap source must be population or empirical");
  }
  std::cout << Json{{"value", value.value}, {"tier", gap_tier_name(value.tier)}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_stability(const std::string& instance_path, const PolicyArgs& p, int n,
                  int trials, std::uint64_t seed, const std::string& out,
                  int jobs, bool fixed_point_diag) {
  const InstanceFile file = load_instance(instance_path);
  const ProblemInstance& inst = file.instance;

  struct TrialRow {
    double delta = 0.0, bound = 0.0;
    int violations = 0;
    std::string error;
  };
  std::vector<TrialRow> rows(trials);
  parallel_for_indexed(trials, jobs, [&](int trial) {
    try {
      const Dataset S =
          sample_dataset(file.distribution, n, derive_seed(seed, 300, trial));
      Rng pick(derive_seed(seed, 400, trial));
      const int i = static_cast<int>(pick.uniform_index(n));
      const Datapoint repl = sample_datapoint(file.distribution, pick);
      CoupledRunReport rep;
      if (p.solver == "nseg") {
        NsegConfig cfg = nseg_config_for(p, inst, n, derive_seed(seed, 500, trial));
        rep = coupled_run_nseg(inst, S, i, repl, cfg, fixed_point_diag);
      } else {
        NisppConfig cfg = nispp_config_for(p, inst, n, derive_seed(seed, 500, trial));
        rep = coupled_run_nispp(inst, S, i, repl, cfg);
      }
      rows[trial] = TrialRow{rep.output_distance, rep.bound,
                             rep.bound_violations, ""};
    } catch (const std::exception& e) {
      rows[trial].error = e.what();
    }
  });

  std::ofstream csv(out);
  if (!csv) throw std::runtime_error("cannot write " + out);
  csv << "trial,delta_final,bound,violated,error\n";
  int total_violations = 0;
  for (int t = 0; t < trials; ++t) {
    const auto& r = rows[t];
    total_violations += r.violations + (r.error.empty() ? 0 : 1);
    csv << t << "," << r.delta << "," << r.bound << ","
        << (r.violations > 0 ? 1 : 0) << "," << r.error << "\n";
  }
  std::cout << "trials=" << trials << " violations=" << total_violations
            << " -> " << out << "\n";
  return total_violations == 0 ? 0 : 1;
}

struct ExperimentConfig {
  std::string id = "experiment";
  std::string instance;
  PolicyArgs policy;
  std::vector<int> n_grid;
  int replicas = 2;
  std::uint64_t seed = 0;
  std::string output;
  int jobs = 1;
  int uas_trials = 0;
  bool timings = false;
};

ExperimentConfig experiment_from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.id = j.value("experiment_id", std::string("experiment"));
  cfg.instance = j.at("instance").get<std::string>();
  cfg.policy.solver = j.at("solver").get<std::string>();
  cfg.policy.policy = j.at("policy").get<std::string>();
  cfg.policy.eps = j.value("eps", 1.0);
  cfg.policy.eta = j.value("eta", 1e-5);
  cfg.policy.custom_file = j.value("custom", std::string());
  for (const auto& v : j.at("n_grid")) cfg.n_grid.push_back(v.get<int>());
  cfg.replicas = j.at("replicas").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.output = j.at("output").get<std::string>();
  cfg.jobs = j.value("jobs", 1);
  cfg.uas_trials = j.value("uas_trials", 0);
  cfg.timings = j.value("timings", false);
  return cfg;
}

int cmd_experiment(const std::string& config_path) {
  const ExperimentConfig cfg = experiment_from_json(load_json(config_path));
  const InstanceFile file = load_instance(cfg.instance);
  const ProblemInstance& inst = file.instance;
  if (cfg.replicas < 1) throw std::invalid_argument("experiment: replicas must be >= 1");

  std::ofstream csv(cfg.output);
  if (!csv) throw std::runtime_error("cannot write " + cfg.output);
  csv << "experiment_id,n,d,eps,eta,solver,replica,emp_gap,pop_gap,weak_gap,"
         "weak_se,uas_mean,runtime_ms,seed,error\n";

  const bool priv = policy_is_private(cfg.policy.policy);
  struct Row {
    double emp = 0.0, pop = 0.0;
    long runtime_ms = 0;
    std::string error;
    Vector output;
  };
  struct Summary {
    int n = 0;
    double weak = 0.0, weak_se = 0.0, emp_mean = 0.0, emp_se = 0.0;
    double uas_mean = 0.0, uas_se = 0.0;
    bool has_uas = false;
  };
  std::vector<Summary> summaries;

  for (int n : cfg.n_grid) {
    std::vector<Row> rows(cfg.replicas);
    const std::uint64_t n_seed = derive_seed(cfg.seed, n);
    parallel_for_indexed(cfg.replicas, cfg.jobs, [&](int r) {
      auto& row = rows[r];
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const Dataset data =
            sample_dataset(file.distribution, n, derive_seed(n_seed, 100, r));
        Vector out;
        if (cfg.policy.solver == "nseg") {
          NsegConfig c = nseg_config_for(cfg.policy, inst, n,
                                         derive_seed(n_seed, 200, r));
          out = nseg_run(inst, data, c).output;
        } else {
          NisppConfig c = nispp_config_for(cfg.policy, inst, n,
                                           derive_seed(n_seed, 200, r));
          out = nispp_run(inst, data, c).output;
        }
        row.output = out;
        row.emp = strong_gap(inst, GapSource::empirical(data), out).value;
        row.pop = strong_gap(inst, GapSource::population(), out).value;
        row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    });

    std::vector<Vector> outputs;
    double emp_sum = 0.0;
    int ok = 0;
    for (int r = 0; r < cfg.replicas; ++r) {
      const auto& row = rows[r];
      csv << cfg.id << "," << n << "," << inst.dim() << ","
          << (priv ? std::to_string(cfg.policy.eps) : "") << ","
          << (priv ? std::to_string(cfg.policy.eta) : "") << ","
          << cfg.policy.solver << "," << r << ",";
      if (row.error.empty()) {
        csv << row.emp << "," << row.pop << ",,,,";
        outputs.push_back(row.output);
        emp_sum += row.emp;
        ++ok;
      } else {
        csv << ",,,,,";
      }
      if (cfg.timings && row.error.empty()) csv << row.runtime_ms;
      csv << "," << derive_seed(n_seed, 100, r) << "," << row.error << "\n";
    }

    Summary s;
    s.n = n;
    if (ok >= 2) {
      const WeakGapEstimate weak = weak_gap_from_outputs(inst, outputs);
      s.weak = weak.estimate;
      s.weak_se = weak.std_error;
      s.emp_mean = emp_sum / ok;
      double ss = 0.0;
      for (const auto& row : rows)
        if (row.error.empty()) ss += (row.emp - s.emp_mean) * (row.emp - s.emp_mean);
      s.emp_se = ok > 1 ? std::sqrt(ss / (ok - 1.0) / ok) : 0.0;
    }
    if (cfg.uas_trials >= 10) {
      UasConfig ucfg;
      if (cfg.policy.solver == "nseg")
        ucfg.solver_cfg = nseg_config_for(cfg.policy, inst, n, 0);
      else
        ucfg.solver_cfg = nispp_config_for(cfg.policy, inst, n, 0);
      const UasEstimate uas =
          uas_estimate(inst, file.distribution, n, ucfg, cfg.uas_trials,
                       derive_seed(n_seed, 900), cfg.jobs);
      s.uas_mean = uas.mean;
      s.uas_se = uas.std_error;
      s.has_uas = true;
    }
    summaries.push_back(s);
  }

  for (const auto& s : summaries) {
    csv << "# summary,n=" << s.n << ",emp_gap_mean=" << s.emp_mean
        << ",emp_gap_se=" << s.emp_se << ",weak_gap=" << s.weak
        << ",weak_se=" << s.weak_se;
    if (s.has_uas) csv << ",uas_mean=" << s.uas_mean << ",uas_se=" << s.uas_se;
    csv << "\n";
  }
  if (summaries.size() >= 2) {
    // Least-squares slope of log(weak gap) against log(n).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& s : summaries) {
      if (s.weak <= 0.0) continue;
      const double x = std::log(static_cast<double>(s.n));
      const double y = std::log(s.weak);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    if (m >= 2) {
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      csv << "# slope,weak_gap_vs_n," << slope << "\n";
    }
  }
  std::cout << "wrote " << cfg.output << "\n";
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Differentially private stochastic VI / saddle-point solvers"};
  app.require_subcommand(1);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "exact privacy calibration");
  std::string mechanism = "gaussian";
  double sensitivity = 1.0, eps = 1.0, eta = 1e-5, c1 = 1.0;
  int steps = 1, batch = 1, n = 1;
  std::vector<double> budgets;
  cal->add_option("--mechanism", mechanism, "gaussian|subsampled|parallel");
  cal->add_option("--sensitivity", sensitivity);
  cal->add_option("--eps", eps);
  cal->add_option("--eta", eta);
  cal->add_option("--steps", steps);
  cal->add_option("--batch", batch);
  cal->add_option("--n", n);
  cal->add_option("--c1", c1);
  cal->add_option("--budgets", budgets, "eps,eta pairs for parallel composition");

  // make-instance
  auto* mk = app.add_subcommand("make-instance", "emit a problem-instance file");
  std::string mk_family = "constant-op", mk_out = "instance.json";
  int mk_dim = 2, mk_dim2 = 2;
  double mk_M = 1.0, mk_radius = 1.0, mk_bias = 0.5, mk_entry_noise = 0.0,
         mk_vec_noise = 0.0, mk_cap = 1.0, mk_chw = 0.5, mk_skew = 0.0;
  std::uint64_t mk_seed = 0;
  mk->add_option("--family", mk_family,
                 "constant-op|matching-pennies|bilinear|quadratic");
  mk->add_option("--out", mk_out);
  mk->add_option("--dim", mk_dim);
  mk->add_option("--dim2", mk_dim2);
  mk->add_option("--M", mk_M);
  mk->add_option("--radius", mk_radius);
  mk->add_option("--bias", mk_bias);
  mk->add_option("--entry-noise", mk_entry_noise);
  mk->add_option("--vec-noise", mk_vec_noise);
  mk->add_option("--cap", mk_cap);
  mk->add_option("--c-halfwidth", mk_chw);
  mk->add_option("--skew", mk_skew);
  mk->add_option("--seed", mk_seed);

  // shared solver/policy options
  auto add_policy = [](CLI::App* cmd, PolicyArgs& p) {
    cmd->add_option("--solver", p.solver, "nseg|nispp");
    cmd->add_option("--policy", p.policy,
                    "single-pass|multipass|multipass-nonprivate|custom");
    cmd->add_option("--eps", p.eps);
    cmd->add_option("--eta", p.eta);
    cmd->add_option("--custom", p.custom_file, "custom schedule JSON");
  };

  // solve
  auto* sol = app.add_subcommand("solve", "run a solver on a sampled dataset");
  std::string sol_instance, sol_out = "solve";
  PolicyArgs sol_policy;
  int sol_n = 100, sol_probe = 0;
  std::uint64_t sol_seed = 0;
  sol->add_option("--instance", sol_instance)->required();
  add_policy(sol, sol_policy);
  sol->add_option("--n", sol_n);
  sol->add_option("--seed", sol_seed);
  sol->add_option("--out", sol_out, "output prefix");
  sol->add_option("--probe", sol_probe, "empirical gap probe interval (0 = off)");

  // gap
  auto* gap_cmd = app.add_subcommand("gap", "strong gap of a point file");
  std::string gap_instance, gap_point, gap_source = "population";
  int gap_n = 100;
  std::uint64_t gap_seed = 0;
  gap_cmd->add_option("--instance", gap_instance)->required();
  gap_cmd->add_option("--point", gap_point)->required();
  gap_cmd->add_option("--source", gap_source, "population|empirical");
  gap_cmd->add_option("--n", gap_n);
  gap_cmd->add_option("--seed", gap_seed);

  // stability
  auto* stab = app.add_subcommand("stability", "coupled per-run bound trials");
  std::string stab_instance, stab_out = "stability.csv";
  PolicyArgs stab_policy;
  int stab_n = 64, stab_trials = 10, stab_jobs = 1;
  std::uint64_t stab_seed = 0;
  bool stab_fp = false;
  stab->add_option("--instance", stab_instance)->required();
  add_policy(stab, stab_policy);
  stab->add_option("--n", stab_n);
  stab->add_option("--trials", stab_trials);
  stab->add_option("--seed", stab_seed);
  stab->add_option("--out", stab_out);
  stab->add_option("--jobs", stab_jobs);
  stab->add_flag("--fixed-point-diagnostics", stab_fp);

  // experiment
  auto* exp = app.add_subcommand("experiment", "replicated study from a config");
  std::string exp_config;
  exp->add_option("config", exp_config, "experiment config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (cal->parsed())
      return cmd_calibrate(mechanism, sensitivity, eps, eta, steps, batch, n,
                           c1, budgets);
    if (mk->parsed())
      return cmd_make_instance(mk_family, mk_out, mk_dim, mk_dim2, mk_M,
                               mk_radius, mk_bias, mk_entry_noise, mk_vec_noise,
                               mk_cap, mk_chw, mk_skew, mk_seed);
    if (sol->parsed())
      return cmd_solve(sol_instance, sol_policy, sol_n, sol_seed, sol_out,
                       sol_probe);
    if (gap_cmd->parsed())
      return cmd_gap(gap_instance, gap_point, gap_source, gap_n, gap_seed);
    if (stab->parsed()) {
      if (stab_trials < 1) {
        std::cerr << "stability: --trials must be >= 1\n";
        return 2;
      }
      return cmd_stability(stab_instance, stab_policy, stab_n, stab_trials,
                           stab_seed, stab_out, stab_jobs, stab_fp);
    }
    if (exp->parsed()) return cmd_experiment(exp_config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace
}  // namespace dpvi

int main(int argc, char** argv) { return dpvi::run_cli(argc, argv); }
