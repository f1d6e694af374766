// Copyright 2026 The Authors.
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

// `sensel` command line: select, simulate, sweep and example.
//
// Exit codes: 0 success; 1 usage error, missing or invalid scenario;
// 2 infeasible or oversized problem; 3 solver did not converge.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sensel/sensel.hpp"

namespace sensel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNotConverged = 3;

inline int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInfeasible:
    case ErrorCode::kInfeasibleConstraints:
    case ErrorCode::kTooLarge:
    case ErrorCode::kRoundingInfeasible:
      return kExitInfeasible;
    case ErrorCode::kNotConverged:
      return kExitNotConverged;
    default:
      return kExitUsage;
  }
}

struct CommonOptions {
  std::string scenario;
  std::string algo = "topk";
  std::string objective = "f3";
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t threads = 0;  // 0: SENSEL_THREADS or hardware concurrency
  double cap = kDefaultEnumerationCap;
};

struct SimOptions {
  std::size_t runs = 1;
  std::size_t windows = 1;
};

inline Objective parse_objective(const std::string& s) {
  if (s == "f1") return Objective::kF1Trace;
  if (s == "f2") return Objective::kF2Trace;
  return Objective::kF3;
}

inline std::size_t resolve_threads(std::size_t t) { return t == 0 ? default_threads() : t; }

inline PlanOptions plan_options(const CommonOptions& o) {
  PlanOptions p;
  p.algorithm = *parse_algorithm(o.algo);
  p.objective = parse_objective(o.objective);
  p.samples = o.samples;
  p.seed = o.seed;
  p.threads = resolve_threads(o.threads);
  p.enumeration_cap = o.cap;
  return p;
}

inline Json schedule_json(const SelectionSchedule& s) {
  Json steps = Json::array();
  for (std::size_t n = 0; n < s.steps(); ++n) steps.push_back(s.selected(n));
  return steps;
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kParseError, "cannot write " + path);
  f << text;
}

inline Scenario load_checked(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::kParseError, "scenario file not found: " + path);
  return load_scenario(path);
}

inline int cmd_select(const CommonOptions& o, std::ostream& out) {
  const Scenario s = load_checked(o.scenario);
  const PlanningProblem p = make_problem(s);
  const PlanOptions opt = plan_options(o);
  const Plan plan = plan_schedule(p, opt);
  Json j;
  j["scenario"] = s.name;
  j["algo"] = std::string(to_string(opt.algorithm));
  j["objective"] = std::string(to_string(opt.objective));
  j["schedule"] = schedule_json(plan.schedule);
  j["objective_value"] = objective_value(opt.objective, plan.schedule, p);
  j["f1_trace"] = objective_value(Objective::kF1Trace, plan.schedule, p);
  j["f2_trace"] = objective_value(Objective::kF2Trace, plan.schedule, p);
  j["f3"] = objective_f3(plan.schedule, p);
  j["feasible"] = check_feasibility(plan.schedule, p.constraints).all();
  j["solve_seconds"] = plan.seconds;
  if (plan.lp) {
    const auto& c = plan.lp->certificate;
    j["f_lp"] = c.f_lp;
    j["f_blp_hat"] = c.f_blp_hat;
    j["gap"] = c.gap;
    j["relative_gap"] = c.relative_gap;
    j["certified_optimal"] = c.optimal;
  }
  if (plan.sdr) {
    const auto& rel = plan.sdr->relaxation;
    j["sdp_objective"] = rel.solution.primal_objective;
    j["sdp_dual_objective"] = rel.solution.dual_objective;
    j["duality_gap"] = rel.solution.duality_gap();
    j["sdp_iterations"] = rel.solution.iterations;
    j["sdp_status"] = std::string(to_string(rel.solution.status));
    j["bqp_lower_bound"] = rel.bqp_lower_bound();
    j["samples"] = plan.sdr->rounding.samples;
    j["best_objective"] = plan.sdr->rounding.objective;
    j["best_sample"] = plan.sdr->rounding.best_sample;
  }
  write_output(o.out, j.dump(2) + "\n", out);
  if (!o.out.empty()) {
    out << s.name << ": " << to_string(opt.algorithm) << " selected " << plan.schedule.steps()
        << " step(s), " << to_string(opt.objective) << " = " << j["objective_value"].get<double>();
    if (plan.lp) out << ", gap = " << plan.lp->certificate.gap;
    out << " -> " << o.out << "\n";
  }
  return kExitOk;
}

inline RunConfig run_config(const CommonOptions& o, const SimOptions& so, Scenario s) {
  RunConfig cfg;
  cfg.scenario = std::move(s);
  cfg.plan = plan_options(o);
  cfg.runs = so.runs;
  cfg.windows = so.windows;
  cfg.seed = o.seed;
  cfg.threads = resolve_threads(o.threads);
  return cfg;
}

inline void summarize(const std::vector<RunResult>& results, std::ostream& out) {
  for (const auto& r : results) {
    out << to_string(r.algorithm);
    if (!std::isnan(r.param_value)) out << " @ " << r.param_value;
    out << ": runs = " << r.runs << ", mean RMSE = " << r.mean_rmse << ", f3 = " << r.f3_total
        << ", final trace(P) = " << (r.trace_p.empty() ? 0.0 : r.trace_p.back());
    if (r.gap) out << ", gap = " << *r.gap;
    out << "\n";
  }
}

inline int cmd_simulate(const CommonOptions& o, const SimOptions& so, std::ostream& out) {
  const RunResult r = run_closed_loop(run_config(o, so, load_checked(o.scenario)));
  std::ostringstream csv;
  write_csv(csv, {r});
  write_output(o.out, csv.str(), out);
  if (!o.out.empty()) summarize({r}, out);
  return kExitOk;
}

inline std::vector<double> parse_values(const std::vector<std::string>& raw) {
  std::vector<double> v;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok, &used);
      } catch (...) {
        used = 0;
      }
      if (used != tok.size()) throw Error(ErrorCode::kParseError, "--values: not a number: " + tok);
      v.push_back(x);
    }
  }
  return v;
}

inline int cmd_sweep(const CommonOptions& o, const SimOptions& so, const std::string& param,
                     const std::vector<std::string>& raw_values, std::ostream& out, std::ostream& err) {
  const auto p = parse_sweep_param(param);
  if (!p) {
    err << "unknown sweep parameter \"" << param << "\"; valid parameters: jammer_power, m_per_step, s_count\n";
    return kExitUsage;
  }
  const auto values = parse_values(raw_values);
  if (values.empty()) {
    err << "--values needs at least one number\n";
    return kExitUsage;
  }
  const auto results = sweep(run_config(o, so, load_checked(o.scenario)), *p, values);
  std::ostringstream csv;
  write_csv(csv, results);
  write_output(o.out, csv.str(), out);
  if (!o.out.empty()) summarize(results, out);
  return kExitOk;
}

inline int cmd_example(int id, std::optional<std::uint64_t> seed, const std::string& path, std::ostream& out) {
  Scenario s = example_scenario(id);
  if (seed) {
    switch (id) {
      case 1: s = example1(*seed); break;
      case 2: s = example2(*seed); break;
      case 3: s = example3(*seed); break;
      case 4: s = example4(*seed); break;
      case 5: s = example5(*seed); break;
      case 6: s = example6(*seed); break;
      default: s = example7(*seed); break;
    }
  }
  validate(s);
  write_output(path, dump_scenario(s), out);
  return kExitOk;
}

/// Entry point; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Sensor selection for linear-Gaussian target tracking"};
  app.require_subcommand(1);
  CommonOptions sel, sim, swp;
  SimOptions sim_opt, swp_opt;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  int example_id = 0;
  std::optional<std::uint64_t> example_seed;
  std::string example_out;

  const std::vector<std::string> algos{"topk", "lp", "sdr", "exhaustive", "ignore-dep"};
  auto add_common = [&](CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("scenario", o.scenario, "Scenario JSON file")->required();
    cmd->add_option("--algo", o.algo, "topk | lp | sdr | exhaustive | ignore-dep")
        ->check(CLI::IsMember(algos))
        ->capture_default_str();
    cmd->add_option("--objective", o.objective, "f1 | f2 | f3 (objective for sdr and exhaustive)")
        ->check(CLI::IsMember({"f1", "f2", "f3"}))
        ->capture_default_str();
    cmd->add_option("--samples", o.samples, "Gaussian randomization samples S for sdr")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--out", o.out, "Output file (stdout when omitted)");
    cmd->add_option("--threads", o.threads, "Worker threads (default: SENSEL_THREADS or all cores)");
    cmd->add_option("--cap", o.cap, "Largest schedule count exhaustive search may enumerate")
        ->capture_default_str();
  };
  auto add_sim = [&](CLI::App* cmd, SimOptions& so) {
    cmd->add_option("--runs", so.runs, "Monte Carlo runs")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--windows", so.windows, "Consecutive planning windows of N steps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  CLI::App* c_select = app.add_subcommand("select", "Plan one window and write the schedule with its certificate");
  add_common(c_select, sel);
  CLI::App* c_sim = app.add_subcommand("simulate", "Closed-loop Monte Carlo simulation; writes per-step CSV");
  add_common(c_sim, sim);
  add_sim(c_sim, sim_opt);
  CLI::App* c_sweep = app.add_subcommand("sweep", "Repeat simulate over values of one parameter");
  add_common(c_sweep, swp);
  add_sim(c_sweep, swp_opt);
  c_sweep->add_option("--param", sweep_param, "jammer_power | m_per_step | s_count")->required();
  c_sweep->add_option("--values", sweep_values, "Comma- or space-separated values")->required();
  CLI::App* c_example = app.add_subcommand("example", "Write a bundled study scenario (1-7) as JSON");
  c_example->add_option("id", example_id, "Example number")->required()->check(CLI::Range(1, 7));
  c_example->add_option("--seed", example_seed, "Override the documented seed");
  c_example->add_option("--out", example_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    if (!app.get_subcommands().empty()) err << "Run with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (c_select->parsed()) return cmd_select(sel, out);
    if (c_sim->parsed()) return cmd_simulate(sim, sim_opt, out);
    if (c_sweep->parsed()) return cmd_sweep(swp, swp_opt, sweep_param, sweep_values, out, err);
    if (c_example->parsed()) return cmd_example(example_id, example_seed, example_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace sensel::cli
