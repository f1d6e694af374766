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

// Monte Carlo harness: true trajectories, correlated measurement noise,
// closed-loop planning + filtering and per-step RMSE statistics.
//
// Random streams. Run r of a configuration with seed s uses
// derive_seed(s, r): stream 0 of that seed draws the true initial state and
// the process noise, stream 1 + w the measurement noise of window w. Noise
// for every sensor is drawn whether or not it is selected, so two
// algorithms run with the same seed see identical truths and noises.

#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/filter.hpp"
#include "sensel/linalg.hpp"
#include "sensel/measure.hpp"
#include "sensel/model.hpp"
#include "sensel/parallel.hpp"
#include "sensel/problem.hpp"
#include "sensel/rng.hpp"
#include "sensel/select_lp.hpp"
#include "sensel/select_sdr.hpp"
#include "sensel/select_separable.hpp"

namespace sensel {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      c_ += (sum_ - t) + v;
    } else {
      c_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

// ---------------------------------------------------------------------------
// Planning

enum class Algorithm { kTopK, kLpRound, kSdr, kIgnoreDep, kExhaustive };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kTopK: return "topk";
    case Algorithm::kLpRound: return "lp";
    case Algorithm::kSdr: return "sdr";
    case Algorithm::kIgnoreDep: return "ignore-dep";
    case Algorithm::kExhaustive: return "exhaustive";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (Algorithm a : {Algorithm::kTopK, Algorithm::kLpRound, Algorithm::kSdr, Algorithm::kIgnoreDep,
                      Algorithm::kExhaustive}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

struct PlanOptions {
  Algorithm algorithm = Algorithm::kTopK;
  Objective objective = Objective::kF3;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double enumeration_cap = kDefaultEnumerationCap;
  SdpOptions sdp;
};

struct Plan {
  SelectionSchedule schedule;
  std::optional<LpSelection> lp;
  std::optional<SdrSelection> sdr;
  double seconds = 0.0;
};

inline Plan plan_schedule(const PlanningProblem& p, const PlanOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Plan plan;
  switch (opt.algorithm) {
    case Algorithm::kTopK:
      plan.schedule = select_topk_schedule(p);
      break;
    case Algorithm::kLpRound:
      plan.lp = select_lp(p);
      plan.schedule = plan.lp->rounded.schedule;
      break;
    case Algorithm::kSdr:
      plan.sdr = select_sdr(p, SdrOptions{opt.samples, opt.seed, opt.objective, opt.threads, opt.sdp});
      plan.schedule = plan.sdr->rounding.schedule;
      break;
    case Algorithm::kIgnoreDep:
      plan.schedule = select_ignore_dependence(p);
      break;
    case Algorithm::kExhaustive:
      plan.schedule = exhaustive_opt(p, opt.objective, opt.enumeration_cap).schedule;
      break;
  }
  plan.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return plan;
}

// ---------------------------------------------------------------------------
// Trajectories and measurements

/// x_0 … x_T with x_0 = start and x_{t+1} = F x_t + w_t, w_t ~ N(0, Q).
/// Step t uses the scenario's model entry t mod N.
inline std::vector<Vector> simulate_truth(const Scenario& s, const Vector& start, std::size_t n_steps, Rng& rng) {
  std::vector<Vector> out{start};
  const std::size_t period = s.horizon() == 0 ? 1 : s.horizon();
  for (std::size_t t = 0; t < n_steps; ++t) {
    const std::size_t n = t % period;
    const Matrix l = cholesky(s.system.process_noise(n));
    out.push_back(s.system.transition(n) * out.back() + l * rng.normal_vector(l.cols()));
  }
  return out;
}

inline std::vector<Vector> simulate_truth(const Scenario& s, std::size_t n_steps, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_truth(s, s.x0, n_steps, rng);
}

/// Joint measurement noise covariance of step n at the true state.
inline Matrix true_noise_covariance(const Scenario& s, std::size_t n, const Vector& state) {
  if (s.noise.distance) return distance_noise(s, {state}, s.noise.distance->alpha1, n).front();
  return s.noise.covariance(n);
}

/// Full (all-sensor) measurement y = H x + v for step n.
inline Vector draw_full_measurement(const Scenario& s, std::size_t n, const Vector& state, Rng& rng) {
  const auto off = sensor_offsets(s.sensors);
  Vector y(off.back());
  for (std::size_t i = 0; i < s.sensors.size(); ++i) {
    y.segment(off[i], s.sensors[i].dim()) = s.sensors[i].measurement(n) * state;
  }
  const Matrix l = cholesky(true_noise_covariance(s, n, state));
  return y + l * rng.normal_vector(l.cols());
}

/// Masked measurements for truth[1..N] under `schedule`. R̃ is the joint
/// noise covariance at the true state.
inline std::vector<StackedMeasurement> simulate_measurements(const std::vector<Vector>& truth, const Scenario& s,
                                                             const SelectionSchedule& schedule, std::uint64_t seed) {
  Rng rng(seed);
  const auto off = sensor_offsets(s.sensors);
  std::vector<StackedMeasurement> out;
  for (std::size_t n = 0; n < schedule.steps() && n + 1 < truth.size(); ++n) {
    std::vector<Matrix> h;
    for (const auto& sensor : s.sensors) h.push_back(sensor.measurement(n));
    const Vector y = draw_full_measurement(s, n, truth[n + 1], rng);
    out.push_back(stack_measurement(h, true_noise_covariance(s, n, truth[n + 1]), off, schedule.column(n), y));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed loop

struct RunConfig {
  Scenario scenario;
  PlanOptions plan;
  std::size_t runs = 1;
  std::size_t windows = 1;  // consecutive planning windows of N steps
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct RunResult {
  Algorithm algorithm = Algorithm::kTopK;
  std::vector<double> trace_p;  // mean over runs of trace(P_{t|t})
  std::vector<double> rmse;     // position RMSE across runs
  std::vector<double> f3;       // mean per-step term ωₙ trace(H̃ᵀR̃⁺H̃)
  double f1_trace = 0.0;        // first-window plan
  double f2_trace = 0.0;
  double f3_total = 0.0;
  std::optional<double> gap;    // first-window LP gap
  double mean_rmse = 0.0;
  double solve_seconds = 0.0;   // mean wall-clock per plan
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  double param_value = std::numeric_limits<double>::quiet_NaN();
  SelectionSchedule first_schedule;
};

namespace detail {

struct RunTrace {
  std::vector<double> sq_error, trace_p, f3;
  double seconds = 0.0;
  std::size_t plans = 0;
};

inline RunTrace closed_loop_run(const RunConfig& cfg, std::size_t run, const PlanningProblem& first_problem,
                                const Plan& first_plan) {
  const Scenario& s = cfg.scenario;
  const std::size_t N = s.horizon();
  const std::uint64_t run_seed = derive_seed(cfg.seed, run);
  Rng truth_rng(derive_seed(run_seed, 0));
  const Vector x_start = truth_rng.gaussian(s.x0, cholesky(s.p0));
  const auto truth = simulate_truth(s, x_start, N * cfg.windows, truth_rng);
  const auto off = sensor_offsets(s.sensors);
  const auto pos = s.position_indices.empty() ? default_position_indices(s.system.state_dim) : s.position_indices;

  RunTrace out;
  FilterState est{s.x0, s.p0};
  for (std::size_t w = 0; w < cfg.windows; ++w) {
    PlanningProblem problem;
    Plan plan;
    if (w == 0) {
      problem = first_problem;
      plan = first_plan;
    } else {
      problem = make_problem(s, est.x, est.p);
      PlanOptions opt = cfg.plan;
      opt.seed = derive_seed(cfg.plan.seed, run * cfg.windows + w);
      opt.threads = 1;
      plan = plan_schedule(problem, opt);
      out.seconds += plan.seconds;
      ++out.plans;
    }
    Rng noise_rng(derive_seed(run_seed, 1 + w));
    for (std::size_t n = 0; n < N; ++n) {
      const Vector& x_true = truth[w * N + n + 1];
      const Vector y = draw_full_measurement(s, n, x_true, noise_rng);
      const Column col = plan.schedule.column(n);
      const auto m = stack_measurement(problem.h[n], problem.r[n], off, col, y);
      est = update_gif(predict(est, problem.f[n], problem.q[n]), m);
      const Vector e = est.x - x_true;
      double se = 0.0;
      for (Index k : pos) se += e(k) * e(k);
      out.sq_error.push_back(se);
      out.trace_p.push_back(est.p.trace());
      out.f3.push_back(problem.weights[n] == 0.0 ? 0.0 : problem.weights[n] * selected_gain(problem, n, col).trace());
    }
  }
  return out;
}

}  // namespace detail

inline RunResult run_closed_loop(const RunConfig& cfg) {
  if (cfg.runs < 1) throw Error(ErrorCode::kInvalidScenario, "runs must be at least 1");
  if (cfg.windows < 1) throw Error(ErrorCode::kInvalidScenario, "windows must be at least 1");
  const Scenario& s = cfg.scenario;
  RunResult res;
  res.algorithm = cfg.plan.algorithm;
  res.runs = cfg.runs;
  res.seed = cfg.seed;

  // The first window starts from the common estimate (x0, P0), so its plan
  // is shared by every run.
  const PlanningProblem first_problem = make_problem(s);
  PlanOptions first_opt = cfg.plan;
  first_opt.threads = cfg.threads;
  const Plan first_plan = plan_schedule(first_problem, first_opt);
  res.first_schedule = first_plan.schedule;
  res.f1_trace = objective_value(Objective::kF1Trace, first_plan.schedule, first_problem);
  res.f2_trace = objective_value(Objective::kF2Trace, first_plan.schedule, first_problem);
  res.f3_total = objective_f3(first_plan.schedule, first_problem);
  if (first_plan.lp) res.gap = first_plan.lp->certificate.gap;

  std::vector<detail::RunTrace> traces(cfg.runs);
  parallel_for(cfg.runs, cfg.threads, [&](std::size_t r) {
    traces[r] = detail::closed_loop_run(cfg, r, first_problem, first_plan);
  });

  const std::size_t T = s.horizon() * cfg.windows;
  double seconds = first_plan.seconds;
  std::size_t plans = 1;
  for (std::size_t t = 0; t < T; ++t) {
    CompensatedSum se, tp, f3;
    for (const auto& tr : traces) {
      se.add(tr.sq_error[t]);
      tp.add(tr.trace_p[t]);
      f3.add(tr.f3[t]);
    }
    const double runs = static_cast<double>(cfg.runs);
    res.rmse.push_back(std::sqrt(se.value() / runs));
    res.trace_p.push_back(tp.value() / runs);
    res.f3.push_back(f3.value() / runs);
  }
  for (const auto& tr : traces) {
    seconds += tr.seconds;
    plans += tr.plans;
  }
  CompensatedSum total;
  for (double v : res.rmse) total.add(v);
  res.mean_rmse = total.value() / static_cast<double>(T);
  res.solve_seconds = seconds / static_cast<double>(plans);
  return res;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParam { kJammerPower, kMPerStep, kSCount };

inline std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kJammerPower: return "jammer_power";
    case SweepParam::kMPerStep: return "m_per_step";
    case SweepParam::kSCount: return "s_count";
  }
  return "?";
}

inline std::optional<SweepParam> parse_sweep_param(std::string_view s) {
  for (SweepParam p : {SweepParam::kJammerPower, SweepParam::kMPerStep, SweepParam::kSCount}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

/// Template with `param` set to `value`.
inline RunConfig with_parameter(RunConfig cfg, SweepParam param, double value) {
  switch (param) {
    case SweepParam::kJammerPower: {
      if (!cfg.scenario.noise.jammer) {
        throw Error(ErrorCode::kInvalidScenario, "jammer_power sweep needs a scenario with a jammer");
      }
      const Jammer j = *cfg.scenario.noise.jammer;
      cfg.scenario = apply_jammer(std::move(cfg.scenario), value, j.alpha, j.n_exp, j.position, j.r0);
      break;
    }
    case SweepParam::kMPerStep: {
      const int m = static_cast<int>(std::lround(value));
      for (int& c : cfg.scenario.constraints.per_step) c = m;
      validate(cfg.scenario);
      break;
    }
    case SweepParam::kSCount:
      if (!(value >= 1.0)) throw Error(ErrorCode::kInvalidScenario, "s_count must be at least 1");
      cfg.plan.samples = static_cast<std::size_t>(std::lround(value));
      break;
  }
  return cfg;
}

inline std::vector<RunResult> sweep(const RunConfig& base, SweepParam param, const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidScenario, "sweep needs at least one value");
  std::vector<RunResult> out;
  for (double v : values) {
    RunResult r = run_closed_loop(with_parameter(base, param, v));
    r.param_value = v;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_csv_header(std::ostream& os) { os << "step,trace_p,rmse,f3,gap,algo,param_value,seed\n"; }

inline void write_csv_rows(std::ostream& os, const RunResult& r) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os.precision(17);
  for (std::size_t t = 0; t < r.rmse.size(); ++t) {
    os << (t + 1) << ',' << r.trace_p[t] << ',' << r.rmse[t] << ',' << r.f3[t] << ',';
    if (r.gap) os << *r.gap;
    os << ',' << to_string(r.algorithm) << ',';
    if (!std::isnan(r.param_value)) os << r.param_value;
    os << ',' << r.seed << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

inline void write_csv(std::ostream& os, const std::vector<RunResult>& results) {
  write_csv_header(os);
  for (const auto& r : results) write_csv_rows(os, r);
}

}  // namespace sensel
