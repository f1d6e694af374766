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

// Acceptance suite. Prints one PASS/FAIL line per criterion with its
// measured runtime and budget, plus indented diagnostics; exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "instances.hpp"
#include "sensel/sensel.hpp"

namespace sensel {
namespace {

using testing::InstanceSpec;
using testing::random_problem;

struct Outcome {
  bool pass = true;
  std::ostringstream notes;
  void fail(const std::string& why) {
    if (pass) notes << "    first failure: " << why << "\n";
    pass = false;
  }
};

bool g_all_pass = true;

void Criterion(int id, const std::string& title, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > budget_seconds) o.fail("runtime over budget");
  g_all_pass = g_all_pass && o.pass;
  std::printf("%s [%d] %s (%.2f s, budget %.0f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), elapsed,
              budget_seconds);
  std::fputs(o.notes.str().c_str(), stdout);
  std::fflush(stdout);
}

Column RandomColumn(Rng& rng, std::size_t L) {
  Column c(L);
  for (std::size_t i = 0; i < L; ++i) c[i] = rng.uniform() < 0.5;
  return c;
}

double Product(const std::vector<int>& counts, std::size_t L) {
  double total = 1.0;
  for (int m : counts) total *= binomial(L, static_cast<std::size_t>(m));
  return total;
}

// Lowers per-step counts until the plain enumeration count is at most cap.
// Dropping picks keeps every budget-feasible schedule feasible.
void LimitCounts(PlanningProblem& p, double cap) {
  auto& c = p.constraints.per_step;
  while (Product(c, p.sensors()) > cap) {
    std::size_t largest = 0;
    for (std::size_t n = 1; n < c.size(); ++n) largest = c[n] > c[largest] ? n : largest;
    if (c[largest] <= 1) break;
    --c[largest];
  }
}

double Rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

void Equivalence(Outcome& o) {
  Rng rng(1001);
  double worst_x = 0.0, worst_p = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    InstanceSpec spec;
    spec.sensors = 2 + static_cast<std::size_t>(trial % 4);
    spec.state_dim = 1 + static_cast<std::size_t>((trial / 4) % 4);
    spec.max_sensor_dim = 1 + static_cast<std::size_t>(trial % 3);
    spec.correlated = trial % 2 == 0;
    spec.steps = 1;
    const auto p = random_problem(rng, spec);
    const auto m = stack_measurement(p, 0, RandomColumn(rng, spec.sensors),
                                     testing::random_matrix(rng, p.offsets.back(), 1).col(0));
    const Vector x = testing::random_matrix(rng, static_cast<Index>(spec.state_dim), 1).col(0);
    const FilterState pred = predict(FilterState{x, p.p0}, p.f[0], p.q[0]);
    const auto a = update_kalman(pred, m);
    const auto b = update_gif(pred, m);
    const double ex = (a.x - b.x).norm() / std::max(a.x.norm(), 1e-300);
    const double ep = (a.p - b.p).norm() / a.p.norm();
    worst_x = std::max(worst_x, ex);
    worst_p = std::max(worst_p, ep);
    if (ex > 1e-8 || ep > 1e-8) o.fail("instance " + std::to_string(trial) + " differs");
  }
  o.notes << "    200 instances, worst relative difference x " << worst_x << ", P " << worst_p << "\n";
}

void TopKOptimality(Outcome& o) {
  Rng rng(1002);
  int dominant = 0, irregular = 0, irregular_match = 0;
  for (int trial = 0; trial < 100; ++trial) {
    InstanceSpec spec;
    spec.sensors = 3 + static_cast<std::size_t>(trial % 6);
    spec.steps = 1 + static_cast<std::size_t>(trial % 3);
    spec.state_dim = 1 + static_cast<std::size_t>((trial / 3) % 3);
    spec.max_sensor_dim = 1 + static_cast<std::size_t>(trial % 2);
    auto p = random_problem(rng, spec);
    LimitCounts(p, 2e4);
    const auto topk = select_topk_schedule(p);
    const double f1 = objective_value(Objective::kF1Trace, topk, p);
    const double f2 = objective_value(Objective::kF2Trace, topk, p);
    const auto b1 = exhaustive_opt(p, Objective::kF1Trace);
    const auto b2 = exhaustive_opt(p, Objective::kF2Trace);
    const bool match = Rel(f1, b1.value) <= 1e-12 && Rel(f2, b2.value) <= 1e-12;
    if (find_loewner_dominant(p)) {
      ++dominant;
      if (!match) {
        o.fail("instance " + std::to_string(trial) + ": top-k misses the f1/f2 optimum");
      }
    } else {
      ++irregular;
      irregular_match += match ? 1 : 0;
    }
  }
  o.notes << "    " << dominant << " instances with a Loewner-dominant schedule checked; " << irregular
          << " without one (regularity fails) reported: top-k still optimal on " << irregular_match << "\n";
  if (dominant == 0) o.fail("no instance had a dominant schedule");
}

void LpSandwich(Outcome& o) {
  Rng rng(1003);
  int checked = 0, rounding_failures = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    InstanceSpec spec;
    spec.sensors = 3 + static_cast<std::size_t>(trial % 8);
    spec.steps = 1 + static_cast<std::size_t>(trial % 3);
    spec.energy = true;
    auto p = random_problem(rng, spec);
    LimitCounts(p, 2e4);
    const auto best = exhaustive_opt(p, Objective::kF3);
    const auto lp = solve_lp(build_lp(p));
    if (lp.status != LpStatus::kOptimal) {
      o.fail("LP infeasible on a feasible instance");
      continue;
    }
    const double tol = 1e-8 * (1.0 + std::abs(best.value));
    if (best.value > lp.objective + tol) o.fail("f*_BLP above f*_LP on instance " + std::to_string(trial));
    RoundedSelection r;
    try {
      r = round_energy(lp, p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRoundingInfeasible) throw;
      ++rounding_failures;
      continue;
    }
    if (!check_feasibility(r.schedule, p.constraints).all()) o.fail("rounded schedule infeasible");
    if (r.f_blp_hat > best.value + tol) o.fail("f̂_BLP above f*_BLP on instance " + std::to_string(trial));
    worst_gap = std::max(worst_gap, r.gap / std::max(lp.objective, 1e-300));
    ++checked;
  }
  o.notes << "    " << checked << " sandwiches checked, largest relative gap " << worst_gap << "; "
          << rounding_failures << " instances where greedy rounding ran out of candidates\n";
}

void ExampleThree(Outcome& o) {
  const Scenario s = example3(3, 10, 10);
  const PlanningProblem p = make_problem(s);
  const auto start = std::chrono::steady_clock::now();
  const auto r = select_lp(p);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.rounded.gap < -1e-9 * (1.0 + r.relaxation.objective)) o.fail("negative gap");
  if (!r.certificate.feasibility.all()) o.fail("schedule infeasible");
  if (seconds >= 5.0) o.fail("LP solve took " + std::to_string(seconds) + " s");
  o.notes << "    L=" << p.sensors() << " N=" << p.steps() << ": f_LP " << r.relaxation.objective << ", f̂_BLP "
          << r.rounded.f_blp_hat << ", gap " << r.rounded.gap << ", relative gap " << r.certificate.relative_gap
          << ", LP " << r.relaxation.iterations << " pivots in " << seconds << " s\n";
}

double BruteForceBqp(const PlanningProblem& p, const BqpProblem& q) {
  const std::size_t L = p.sensors(), N = p.steps();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask < (1ul << (L * N)); ++mask) {
    SelectionSchedule s(L, N);
    for (std::size_t j = 0; j < L * N; ++j) s.set(j % L, j / L, (mask >> j) & 1ul);
    if (!check_feasibility(s, p.constraints).all()) continue;
    best = std::min(best, bqp_objective(q, s));
  }
  return best;
}

void SdrBound(Outcome& o) {
  Rng rng(1005);
  double worst_diag = 0.0, tightest = std::numeric_limits<double>::infinity();
  int max_iter = 0;
  for (int trial = 0; trial < 50; ++trial) {
    InstanceSpec spec;
    spec.sensors = 2 + static_cast<std::size_t>(trial % 5);
    spec.steps = 1 + static_cast<std::size_t>(trial % 2);
    spec.correlated = true;
    spec.energy = trial % 3 == 0;
    const auto p = random_problem(rng, spec);
    const auto rel = solve_relaxation(p);
    if (rel.solution.status != SdpStatus::kOptimal) {
      o.fail("SDP not optimal on instance " + std::to_string(trial));
      continue;
    }
    const double opt = BruteForceBqp(p, rel.bqp);
    const double bound = rel.bqp_lower_bound();
    if (bound > opt + 1e-6 * (1.0 + std::abs(opt))) o.fail("bound above BQP minimum on " + std::to_string(trial));
    const Matrix& x = rel.solution.x;
    const double diag = (x.diagonal() - Vector::Ones(x.rows())).cwiseAbs().maxCoeff();
    worst_diag = std::max(worst_diag, diag);
    if (diag > 1e-6) o.fail("diagonal off by " + std::to_string(diag));
    tightest = std::min(tightest, opt - bound);
    max_iter = std::max(max_iter, rel.solution.iterations);
  }
  o.notes << "    worst |diag(X)-1| " << worst_diag << ", smallest BQP-min minus bound " << tightest
          << ", at most " << max_iter << " IPM iterations\n";
}

void ExampleFour(Outcome& o) {
  for (std::size_t k = 0; k < std::size(kJammerPowers); ++k) {
    const double power = kJammerPowers[k];
    const PlanningProblem p = make_problem(example4(4, power));
    const double best = exhaustive_opt(p, Objective::kF3).value;
    const double ignore = objective_f3(select_ignore_dependence(p), p);
    const auto rel = solve_relaxation(p);
    int wins = 0;
    double mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const double rr = randomize_round(rel.solution.x, p, 100, seed, Objective::kF3).objective;
      if (rr > best * (1.0 + 1e-12)) o.fail("randomized rounding above the exhaustive optimum");
      wins += rr >= ignore * (1.0 - 1e-12) ? 1 : 0;
      mean += rr / 20.0;
    }
    const bool strong = k + 3 >= std::size(kJammerPowers);
    if (strong && wins < 18) {
      o.fail("at P0=" + std::to_string(power) + " rounding beat ignore-dependence in " + std::to_string(wins) +
             "/20 seeds");
    }
    o.notes << "    P0=" << power << ": exhaustive " << best << ", rr(S=100) mean " << mean << ", ignore-dep "
            << ignore << ", rr >= ignore in " << wins << "/20" << (strong ? " (asserted)" : "") << "\n";
  }
}

void Monotonicity(Outcome& o) {
  const PlanningProblem p = make_problem(example4(4, 1.5e6));
  const auto rel = solve_relaxation(p);
  double prev = -std::numeric_limits<double>::infinity();
  o.notes << "   ";
  for (std::size_t s : {20u, 100u, 2000u}) {
    const double v = randomize_round(rel.solution.x, p, s, 4, Objective::kF3).objective;
    if (v < prev) o.fail("best objective dropped at S=" + std::to_string(s));
    prev = v;
    o.notes << " S=" << s << ": " << v;
  }
  o.notes << "\n";
}

void ExampleSeven(Outcome& o) {
  RunConfig cfg;
  cfg.scenario = example7();
  cfg.runs = 200;
  cfg.seed = 7;
  cfg.threads = default_threads();
  cfg.plan.seed = 7;
  cfg.plan.samples = 2000;
  cfg.plan.algorithm = Algorithm::kSdr;
  const RunResult sdr = run_closed_loop(cfg);
  cfg.plan.algorithm = Algorithm::kIgnoreDep;
  const RunResult ign = run_closed_loop(cfg);
  if (!(sdr.mean_rmse <= ign.mean_rmse)) o.fail("sdr mean RMSE above ignore-dependence");
  o.notes << "    mean position RMSE over 200 runs: sdr(S=2000) " << sdr.mean_rmse << " m, ignore-dep "
          << ign.mean_rmse << " m\n";
}

void Identities(Outcome& o) {
  Rng rng(1009);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    InstanceSpec spec;
    spec.sensors = 2 + static_cast<std::size_t>(trial % 6);
    spec.steps = 1 + static_cast<std::size_t>(trial % 3);
    spec.state_dim = 1 + static_cast<std::size_t>(trial % 4);
    spec.max_sensor_dim = 1 + static_cast<std::size_t>(trial % 3);
    const auto p = random_problem(rng, spec);
    SelectionSchedule s(p.sensors(), p.steps());
    for (std::size_t n = 0; n < p.steps(); ++n) s.set_column(n, RandomColumn(rng, p.sensors()));
    for (std::size_t n = 0; n < p.steps(); ++n) {
      const auto m = stack_measurement(p, n, s.column(n), Vector::Zero(p.offsets.back()));
      double sum = 0.0;
      for (std::size_t i : s.selected(n)) sum += sensor_measure(p.h[n][i], p.sensor_noise(n, i));
      const double e = Rel(gain_trace(m.h_tilde, m.r_tilde), sum);
      worst = std::max(worst, e);
      if (e > 1e-9) o.fail("gain trace differs from the sum of measures");
    }
    const double bqp = bqp_objective(build_bqp(p), s);
    const double blp = blp_objective(info_table(p), s);
    const double e = Rel(bqp, -blp);
    worst = std::max(worst, e);
    if (e > 1e-9) o.fail("BQP objective differs from -BLP objective");
  }
  o.notes << "    100 instances, worst relative difference " << worst << "\n";
}

}  // namespace
}  // namespace sensel

int main() {
  using namespace sensel;
  Criterion(1, "GIF equals Kalman update on 200 random instances (1e-8 relative)", 10, Equivalence);
  Criterion(2, "top-k attains f1/f2 optimum where a Loewner-dominant schedule exists", 60, TopKOptimality);
  Criterion(3, "f^_BLP <= f*_BLP <= f*_LP on 100 energy-constrained instances (1e-8)", 60, LpSandwich);
  Criterion(4, "grid replica L=100, N=5, m=10, budget 2: gap >= 0, feasible, LP < 5 s", 60, ExampleThree);
  Criterion(5, "SDP bound <= BQP minimum and unit diagonal on 50 instances (1e-6)", 120, SdrBound);
  Criterion(6, "jammer study: exhaustive >= rr(S=100) >= ignore-dependence", 300, ExampleFour);
  Criterion(7, "best objective monotone in S at P0=1.5e6 (S=20, 100, 2000)", 60, Monotonicity);
  Criterion(8, "tracking study: mean RMSE sdr(S=2000) <= ignore-dependence over 200 runs", 600, ExampleSeven);
  Criterion(9, "uncorrelated identities on 100 instances (1e-9)", 30, Identities);
  return g_all_pass ? 0 : 1;
}
