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

// Analytic selection for uncorrelated noise with per-step counts (pick the m
// sensors with the largest trace(Hᵀ R⁻¹ H)), and the exhaustive search used
// as the reference optimum everywhere else.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/filter.hpp"
#include "sensel/measure.hpp"
#include "sensel/problem.hpp"

namespace sensel {

/// Top-m indices of `score` restricted to `candidates`; larger scores first,
/// equal scores by lower index.
inline std::vector<std::size_t> top_m(std::span<const double> score, const std::vector<std::size_t>& candidates,
                                      std::size_t m) {
  std::vector<std::size_t> order = candidates;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  if (order.size() > m) order.resize(m);
  std::sort(order.begin(), order.end());
  return order;
}

inline std::vector<double> sensor_measures(const PlanningProblem& p, std::size_t step) {
  std::vector<double> a;
  for (std::size_t i = 0; i < p.sensors(); ++i) a.push_back(sensor_measure(p.h[step][i], p.sensor_noise(step, i)));
  return a;
}

inline Column select_topk(const PlanningProblem& p, std::size_t step) {
  if (!is_block_diagonal(p.r[step], p.offsets)) {
    throw Error(ErrorCode::kNotSeparableNoise,
                "step " + std::to_string(step + 1) + " noise is correlated across sensors");
  }
  const auto a = sensor_measures(p, step);
  std::vector<std::size_t> all(p.sensors());
  std::iota(all.begin(), all.end(), 0);
  Column col(p.sensors(), false);
  for (std::size_t i : top_m(a, all, static_cast<std::size_t>(p.constraints.per_step[step]))) col[i] = true;
  return col;
}

inline SelectionSchedule select_topk_schedule(const PlanningProblem& p) {
  SelectionSchedule s(p.sensors(), p.steps());
  for (std::size_t n = 0; n < p.steps(); ++n) s.set_column(n, select_topk(p, n));
  return s;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (std::size_t j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
  return std::round(c);
}

/// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    out.push_back(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

inline constexpr double kDefaultEnumerationCap = 1e7;

struct EnumerationOptions {
  bool covariances = true;  // provide P_{k+n|k+n} to the visitor
  double cap = kDefaultEnumerationCap;
};

/// Visits every schedule satisfying counts, energy budgets and linear rows,
/// in increasing schedule_precedes order. Partial schedules that exhaust a
/// budget are pruned. The visitor receives the schedule, its posterior
/// covariances (empty unless requested) and its f3 value.
template <typename Visitor>
void enumerate_schedules(const PlanningProblem& p, const EnumerationOptions& opt, Visitor&& visit) {
  const std::size_t L = p.sensors();
  const std::size_t N = p.steps();
  double total = 1.0;
  for (std::size_t n = 0; n < N; ++n) total *= binomial(L, static_cast<std::size_t>(p.constraints.per_step[n]));
  if (total > opt.cap) {
    std::ostringstream msg;
    msg << "exhaustive search over " << total << " schedules exceeds the cap of " << opt.cap;
    throw Error(ErrorCode::kTooLarge, msg.str());
  }
  std::vector<std::vector<std::vector<std::size_t>>> combos(N);
  std::vector<std::vector<double>> traces(N);
  std::vector<std::vector<Matrix>> gains(N);
  for (std::size_t n = 0; n < N; ++n) {
    combos[n] = combinations(L, static_cast<std::size_t>(p.constraints.per_step[n]));
    for (const auto& c : combos[n]) {
      Column col(L, false);
      for (std::size_t i : c) col[i] = true;
      Matrix g = selected_gain(p, n, col);
      traces[n].push_back(g.trace());
      if (opt.covariances) gains[n].push_back(std::move(g));
    }
  }
  std::vector<int> budget = p.constraints.energy ? *p.constraints.energy : std::vector<int>(L, static_cast<int>(N));
  SelectionSchedule sched(L, N);
  std::vector<Matrix> post(opt.covariances ? N : 0);

  std::function<void(std::size_t, double, const Matrix&)> dfs = [&](std::size_t n, double f3, const Matrix& prev) {
    if (n == N) {
      if (!p.constraints.linear.empty()) {
        const Vector g = sched.stacked();
        for (const auto& row : p.constraints.linear) {
          if (!satisfies(row, g)) return;
        }
      }
      visit(static_cast<const SelectionSchedule&>(sched), std::span<const Matrix>(post), f3);
      return;
    }
    Matrix pred;
    if (opt.covariances) pred = symmetrize(p.f[n] * prev * p.f[n].transpose() + p.q[n]);
    for (std::size_t c = 0; c < combos[n].size(); ++c) {
      const auto& pick = combos[n][c];
      if (std::any_of(pick.begin(), pick.end(), [&](std::size_t i) { return budget[i] <= 0; })) continue;
      for (std::size_t i : pick) {
        --budget[i];
        sched.set(i, n, true);
      }
      if (opt.covariances) post[n] = posterior_covariance(pred, gains[n][c]);
      dfs(n + 1, f3 + p.weights[n] * traces[n][c], opt.covariances ? post[n] : prev);
      for (std::size_t i : pick) {
        ++budget[i];
        sched.set(i, n, false);
      }
    }
  };
  dfs(0, 0.0, p.p0);
}

struct ExhaustiveResult {
  SelectionSchedule schedule;
  double value = 0.0;
  std::size_t evaluated = 0;
};

inline double objective_from_trajectory(Objective o, std::span<const Matrix> post, double f3) {
  switch (o) {
    case Objective::kF1Trace: return post.back().trace();
    case Objective::kF2Trace: {
      double s = 0.0;
      for (const auto& m : post) s += m.trace();
      return s / static_cast<double>(post.size());
    }
    case Objective::kF3: return f3;
  }
  return 0.0;
}

/// Optimal schedule for `objective` (maximize f3, minimize trace f1/f2).
/// Ties go to the schedule that comes first in schedule_precedes order.
inline ExhaustiveResult exhaustive_opt(const PlanningProblem& p, Objective objective,
                                       double cap = kDefaultEnumerationCap) {
  ExhaustiveResult best;
  bool found = false;
  EnumerationOptions opt{objective != Objective::kF3, cap};
  enumerate_schedules(p, opt, [&](const SelectionSchedule& s, std::span<const Matrix> post, double f3) {
    ++best.evaluated;
    const double v = objective_from_trajectory(objective, post, f3);
    if (!found || compare_objective(objective, v, best.value) > 0) {
      best.schedule = s;
      best.value = v;
      found = true;
    }
  });
  if (!found) throw Error(ErrorCode::kInfeasible, "no schedule satisfies the constraints");
  return best;
}

/// Schedule whose final covariance is Loewner-below that of every feasible
/// schedule, if one exists.
inline std::optional<SelectionSchedule> find_loewner_dominant(const PlanningProblem& p, double tol = 1e-9,
                                                              double cap = kDefaultEnumerationCap) {
  const auto best = exhaustive_opt(p, Objective::kF1Trace, cap);
  const Matrix target = objective_f1(best.schedule, p);
  bool dominant = true;
  enumerate_schedules(p, EnumerationOptions{true, cap},
                      [&](const SelectionSchedule&, std::span<const Matrix> post, double) {
                        if (dominant && !loewner_leq(target, post.back(), tol)) dominant = false;
                      });
  if (!dominant) return std::nullopt;
  return best.schedule;
}

}  // namespace sensel
