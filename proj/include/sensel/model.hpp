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

// Data model: linear-Gaussian dynamics, sensors, joint measurement noise,
// selection constraints and schedules, plus the scenario generators.
//
// Time-varying quantities (F, Q, H, R) are stored as lists holding either a
// single entry (constant model) or one entry per step of the horizon.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sensel/error.hpp"
#include "sensel/linalg.hpp"
#include "sensel/rng.hpp"

namespace sensel {

using Position = Eigen::Vector2d;

namespace detail {

template <typename T>
const T& step_entry(const std::vector<T>& list, std::size_t step) {
  return list.size() == 1 ? list.front() : list.at(step);
}

}  // namespace detail

struct DynamicSystem {
  Index state_dim = 0;
  std::vector<Matrix> f;  // transition into step n (F_{k+n-1})
  std::vector<Matrix> q;

  const Matrix& transition(std::size_t step) const { return detail::step_entry(f, step); }
  const Matrix& process_noise(std::size_t step) const { return detail::step_entry(q, step); }
};

struct SensorModel {
  std::vector<Matrix> h;
  Position position = Position::Zero();  // meters

  const Matrix& measurement(std::size_t step) const { return detail::step_entry(h, step); }
  Index dim() const { return h.front().rows(); }
};

/// Jammer signal v⁰ entering sensor i scaled by βᵢ = p0 / (1 + α·dᵢ₀ⁿ).
struct Jammer {
  double p0 = 0.0;
  double alpha = 1.0;
  double n_exp = 2.0;
  Position position = Position::Zero();
  Matrix r0;
};

/// State-dependent diagonal term α₁·dᵢₙ·I, with dᵢₙ the distance between
/// sensor i and the (predicted) target position at step n.
struct DistanceNoise {
  double alpha1 = 0.0;
};

struct NoiseModel {
  std::vector<Matrix> r_base;  // natural sensor noises, one or N entries (PSD with a distance term)
  std::optional<Jammer> jammer;
  std::optional<DistanceNoise> distance;
  std::vector<Matrix> r_full;  // r_base plus the jammer term; kept in sync

  const Matrix& covariance(std::size_t step) const { return detail::step_entry(r_full, step); }
};

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

inline const char* to_string(Relation rel) {
  switch (rel) {
    case Relation::kLessEqual: return "<=";
    case Relation::kEqual: return "=";
    case Relation::kGreaterEqual: return ">=";
  }
  return "?";
}

/// Linear row aᵀγ ⊵ b over the stacked selection vector γ = vec(Γ), whose
/// entry n·L + i is sensor i at step n.
struct LinearConstraint {
  Vector a;
  Relation relation = Relation::kLessEqual;
  double b = 0.0;
};

inline bool satisfies(const LinearConstraint& c, const Vector& gamma, double tol = 1e-8) {
  const double lhs = c.a.dot(gamma);
  switch (c.relation) {
    case Relation::kLessEqual: return lhs <= c.b + tol;
    case Relation::kEqual: return std::abs(lhs - c.b) <= tol;
    case Relation::kGreaterEqual: return lhs >= c.b - tol;
  }
  return false;
}

struct ConstraintSet {
  std::vector<int> per_step;                 // m_{k+n}, length N
  std::optional<std::vector<int>> energy;    // m_k^i, length L
  std::vector<LinearConstraint> linear;
};

using Column = std::vector<bool>;

/// Boolean L×N matrix Γ.
class SelectionSchedule {
 public:
  SelectionSchedule() = default;
  SelectionSchedule(std::size_t sensors, std::size_t steps)
      : sensors_(sensors), steps_(steps), gamma_(sensors * steps, false) {}

  std::size_t sensors() const { return sensors_; }
  std::size_t steps() const { return steps_; }

  bool at(std::size_t sensor, std::size_t step) const { return gamma_[step * sensors_ + sensor]; }
  void set(std::size_t sensor, std::size_t step, bool value) {
    gamma_[step * sensors_ + sensor] = value;
  }

  Column column(std::size_t step) const {
    return Column(gamma_.begin() + static_cast<std::ptrdiff_t>(step * sensors_),
                  gamma_.begin() + static_cast<std::ptrdiff_t>((step + 1) * sensors_));
  }
  void set_column(std::size_t step, const Column& col) {
    for (std::size_t i = 0; i < sensors_; ++i) set(i, step, col[i]);
  }

  /// Stacked vector γ = (γ_{k+1}ᵀ, …, γ_{k+N}ᵀ)ᵀ.
  Vector stacked() const {
    Vector v(static_cast<Index>(gamma_.size()));
    for (std::size_t j = 0; j < gamma_.size(); ++j) v(static_cast<Index>(j)) = gamma_[j] ? 1.0 : 0.0;
    return v;
  }

  std::size_t count(std::size_t step) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < sensors_; ++i) c += at(i, step) ? 1 : 0;
    return c;
  }
  std::size_t uses(std::size_t sensor) const {
    std::size_t c = 0;
    for (std::size_t n = 0; n < steps_; ++n) c += at(sensor, n) ? 1 : 0;
    return c;
  }

  /// Selected sensor indices of a step in increasing order.
  std::vector<std::size_t> selected(std::size_t step) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sensors_; ++i) {
      if (at(i, step)) out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const SelectionSchedule&, const SelectionSchedule&) = default;

 private:
  std::size_t sensors_ = 0;
  std::size_t steps_ = 0;
  std::vector<bool> gamma_;  // column-major
};

/// Tie order between schedules: compare the selected-index lists step by
/// step; the lexicographically smaller list wins ({0,1} before {0,2}).
inline bool schedule_precedes(const SelectionSchedule& a, const SelectionSchedule& b) {
  for (std::size_t n = 0; n < a.steps(); ++n) {
    auto sa = a.selected(n);
    auto sb = b.selected(n);
    if (sa != sb) return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
  }
  return false;
}

struct FeasibilityReport {
  bool counts = true;
  bool energy = true;
  std::vector<bool> linear;
  bool all() const {
    return counts && energy && std::all_of(linear.begin(), linear.end(), [](bool v) { return v; });
  }
};

inline FeasibilityReport check_feasibility(const SelectionSchedule& s, const ConstraintSet& c) {
  FeasibilityReport r;
  for (std::size_t n = 0; n < s.steps(); ++n) {
    if (static_cast<int>(s.count(n)) != c.per_step.at(n)) r.counts = false;
  }
  if (c.energy) {
    for (std::size_t i = 0; i < s.sensors(); ++i) {
      if (static_cast<int>(s.uses(i)) > (*c.energy)[i]) r.energy = false;
    }
  }
  const Vector g = s.stacked();
  for (const auto& row : c.linear) r.linear.push_back(satisfies(row, g));
  return r;
}

struct Scenario {
  std::string name;
  DynamicSystem system;
  std::vector<SensorModel> sensors;
  NoiseModel noise;
  ConstraintSet constraints;
  std::vector<double> weights;
  Vector x0;
  Matrix p0;
  std::uint64_t seed = 0;
  std::vector<Index> position_indices;  // state components holding (x, y) in meters

  std::size_t num_sensors() const { return sensors.size(); }
  std::size_t horizon() const { return constraints.per_step.size(); }
};

inline std::vector<Index> sensor_offsets(const std::vector<SensorModel>& sensors) {
  std::vector<Index> off;
  Index o = 0;
  for (const auto& s : sensors) {
    off.push_back(o);
    o += s.dim();
  }
  off.push_back(o);
  return off;
}

inline std::vector<Index> default_position_indices(Index state_dim) {
  if (state_dim == 4) return {0, 2};
  if (state_dim >= 2) return {0, 1};
  return {0};
}

inline Position position_of(const Vector& state, const std::vector<Index>& idx) {
  Position p = Position::Zero();
  for (std::size_t j = 0; j < idx.size() && j < 2; ++j) p(static_cast<Index>(j)) = state(idx[j]);
  return p;
}

/// True when every off-diagonal sensor block of r is exactly zero.
inline bool is_block_diagonal(const Matrix& r, const std::vector<Index>& offsets) {
  const std::size_t L = offsets.size() - 1;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      if (i == j) continue;
      const Index ri = offsets[i + 1] - offsets[i];
      const Index rj = offsets[j + 1] - offsets[j];
      if (!r.block(offsets[i], offsets[j], ri, rj).isZero(0.0)) return false;
    }
  }
  return true;
}

inline Matrix sensor_block(const Matrix& r, const std::vector<Index>& offsets,
                           std::size_t i, std::size_t j) {
  return r.block(offsets[i], offsets[j], offsets[i + 1] - offsets[i], offsets[j + 1] - offsets[j]);
}

/// Zero every off-diagonal sensor block.
inline Matrix strip_cross_blocks(const Matrix& r, const std::vector<Index>& offsets) {
  Matrix out = Matrix::Zero(r.rows(), r.cols());
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    const Index d = offsets[i + 1] - offsets[i];
    out.block(offsets[i], offsets[i], d, d) = r.block(offsets[i], offsets[i], d, d);
  }
  return out;
}

inline double jammer_gain(const Jammer& j, const Position& sensor) {
  const double d = (sensor - j.position).norm();
  return j.p0 / (1.0 + j.alpha * std::pow(d, j.n_exp));
}

/// R̆^{ij} = R^{ij} + βᵢβⱼR⁰ applied to a joint covariance.
inline Matrix jammed_covariance(const Matrix& base, const std::vector<SensorModel>& sensors,
                                const Jammer& jammer) {
  const auto off = sensor_offsets(sensors);
  Matrix out = base;
  std::vector<double> beta;
  for (const auto& s : sensors) beta.push_back(jammer_gain(jammer, s.position));
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    for (std::size_t j = 0; j < sensors.size(); ++j) {
      if (sensors[i].dim() != jammer.r0.rows() || sensors[j].dim() != jammer.r0.rows()) {
        throw Error(ErrorCode::kInvalidScenario, "jammer.R0 dimension differs from sensor measurement dimension");
      }
      out.block(off[i], off[j], sensors[i].dim(), sensors[j].dim()) += beta[i] * beta[j] * jammer.r0;
    }
  }
  return symmetrize(out);
}

inline void require_pd(const Matrix& m, const std::string& field) {
  Eigen::LLT<Matrix> llt(symmetrize(m));
  if (!m.allFinite() || llt.info() != Eigen::Success ||
      (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kNotPositiveDefinite, field + " is not symmetric positive definite");
  }
}

/// Positive semidefinite is enough when a distance term is added later.
inline void require_psd(const Matrix& m, const std::string& field) {
  if (!m.allFinite() || !is_psd(m) ||
      (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kNotPSD, field + " is not symmetric positive semidefinite");
  }
}

/// Recompute r_full from r_base and the jammer (if any).
inline void refresh_noise(NoiseModel& noise, const std::vector<SensorModel>& sensors) {
  noise.r_full.clear();
  for (const auto& base : noise.r_base) {
    noise.r_full.push_back(noise.jammer ? jammed_covariance(base, sensors, *noise.jammer) : base);
  }
}

inline Scenario apply_jammer(Scenario scenario, double p0, double alpha, double n_exp,
                             const Position& position, const Matrix& r0) {
  if (!(p0 >= 0.0)) throw Error(ErrorCode::kInvalidScenario, "jammer.p0 must be non-negative");
  scenario.noise.jammer = Jammer{p0, alpha, n_exp, position, r0};
  refresh_noise(scenario.noise, scenario.sensors);
  for (std::size_t n = 0; n < scenario.noise.r_full.size(); ++n) {
    if (scenario.noise.distance) {
      require_psd(scenario.noise.r_full[n], "noise.R (jammed)");
    } else {
      require_pd(scenario.noise.r_full[n], "noise.R (jammed)");
    }
  }
  return scenario;
}

/// Per-step joint covariance under state-dependent noise: the (jammed)
/// covariance plus α₁·dᵢₙ·I on each diagonal block.
inline std::vector<Matrix> distance_noise(const Scenario& scenario,
                                          const std::vector<Vector>& predicted_states,
                                          double alpha1, std::size_t step_offset = 0) {
  if (!(alpha1 > 0.0)) throw Error(ErrorCode::kInvalidScenario, "distance.alpha1 must be positive");
  const auto off = sensor_offsets(scenario.sensors);
  std::vector<Matrix> out;
  for (std::size_t n = 0; n < predicted_states.size(); ++n) {
    Matrix r = scenario.noise.covariance(step_offset + n);
    const Position target = position_of(predicted_states[n], scenario.position_indices);
    for (std::size_t i = 0; i < scenario.sensors.size(); ++i) {
      const double d = (scenario.sensors[i].position - target).norm();
      const Index k = scenario.sensors[i].dim();
      r.block(off[i], off[i], k, k) += alpha1 * d * Matrix::Identity(k, k);
    }
    require_pd(r, "noise.R (distance-dependent, step " + std::to_string(n + 1) + ")");
    out.push_back(std::move(r));
  }
  return out;
}

/// Exact feasibility of "select m_n per step, sensor i at most c_i times":
/// a 0/1 matrix with those column sums exists iff, for every k, the k largest
/// counts sum to at most Σᵢ min(cᵢ, k).
inline bool counts_and_budgets_feasible(const std::vector<int>& per_step,
                                        const std::vector<int>& budgets) {
  std::vector<int> m = per_step;
  std::sort(m.begin(), m.end(), std::greater<>());
  long long prefix = 0;
  for (std::size_t k = 1; k <= m.size(); ++k) {
    prefix += m[k - 1];
    long long cap = 0;
    for (int c : budgets) cap += std::min<long long>(std::max(c, 0), static_cast<long long>(k));
    if (prefix > cap) return false;
  }
  return true;
}

/// Full invariant check; each failure names the offending field.
inline void validate(const Scenario& s) {
  const Index r = s.system.state_dim;
  if (r <= 0) throw Error(ErrorCode::kInvalidScenario, "state_dim must be positive");
  const std::size_t N = s.horizon();
  const std::size_t L = s.num_sensors();
  if (N == 0) throw Error(ErrorCode::kInvalidScenario, "constraints.per_step must be non-empty");
  if (L == 0) throw Error(ErrorCode::kInvalidScenario, "sensors must be non-empty");
  auto check_list = [&](std::size_t size, const std::string& field) {
    if (size != 1 && size != N) {
      throw Error(ErrorCode::kInvalidScenario, field + " must hold 1 or " + std::to_string(N) + " entries");
    }
  };
  check_list(s.system.f.size(), "F");
  check_list(s.system.q.size(), "Q");
  for (const auto& f : s.system.f) {
    if (f.rows() != r || f.cols() != r || !f.allFinite()) {
      throw Error(ErrorCode::kInvalidScenario, "F must be a finite state_dim x state_dim matrix");
    }
    Eigen::FullPivLU<Matrix> lu(f);
    if (lu.rank() < r) throw Error(ErrorCode::kInvalidScenario, "F must be invertible");
  }
  for (const auto& q : s.system.q) {
    if (q.rows() != r || q.cols() != r) throw Error(ErrorCode::kInvalidScenario, "Q has wrong dimensions");
    require_pd(q, "Q");
  }
  for (std::size_t i = 0; i < L; ++i) {
    const auto& sensor = s.sensors[i];
    const std::string field = "sensors[" + std::to_string(i) + "].H";
    if (sensor.h.empty()) throw Error(ErrorCode::kInvalidScenario, field + " is missing");
    check_list(sensor.h.size(), field);
    for (const auto& h : sensor.h) {
      if (h.rows() < 1 || h.cols() != r || !h.allFinite() || h.rows() != sensor.dim()) {
        throw Error(ErrorCode::kInvalidScenario, field + " must be finite with state_dim columns");
      }
    }
  }
  const auto off = sensor_offsets(s.sensors);
  check_list(s.noise.r_base.size(), "noise.R");
  if (s.noise.r_full.size() != s.noise.r_base.size()) {
    throw Error(ErrorCode::kInternal, "noise.r_full out of sync with noise.r_base");
  }
  for (const auto& rf : s.noise.r_full) {
    if (rf.rows() != off.back() || rf.cols() != off.back()) {
      throw Error(ErrorCode::kInvalidScenario, "noise.R dimension must equal the stacked measurement size");
    }
    if (s.noise.distance) {
      require_psd(rf, "noise.R");
    } else {
      require_pd(rf, "noise.R");
    }
  }
  if (s.noise.distance && !(s.noise.distance->alpha1 > 0.0)) {
    throw Error(ErrorCode::kInvalidScenario, "noise.distance.alpha1 must be positive");
  }
  for (std::size_t n = 0; n < N; ++n) {
    const int m = s.constraints.per_step[n];
    if (m <= 0 || static_cast<std::size_t>(m) > L) {
      throw Error(ErrorCode::kPerStepCountOutOfRange,
                  "constraints.per_step[" + std::to_string(n) + "] = " + std::to_string(m) +
                      " must lie in [1, " + std::to_string(L) + "]");
    }
  }
  if (s.constraints.energy) {
    const auto& e = *s.constraints.energy;
    if (e.size() != L) throw Error(ErrorCode::kInvalidScenario, "constraints.energy must have one entry per sensor");
    for (int c : e) {
      if (c < 0) throw Error(ErrorCode::kInvalidScenario, "constraints.energy entries must be non-negative");
    }
    const long long need = std::accumulate(s.constraints.per_step.begin(), s.constraints.per_step.end(), 0LL);
    const long long have = std::accumulate(e.begin(), e.end(), 0LL);
    if (need > have || !counts_and_budgets_feasible(s.constraints.per_step, e)) {
      throw Error(ErrorCode::kInfeasibleConstraints,
                  "constraints.energy cannot accommodate constraints.per_step");
    }
  }
  for (std::size_t p = 0; p < s.constraints.linear.size(); ++p) {
    const auto& row = s.constraints.linear[p];
    if (row.a.size() != static_cast<Index>(N * L) || !row.a.allFinite() || !std::isfinite(row.b)) {
      throw Error(ErrorCode::kInvalidScenario,
                  "constraints.linear[" + std::to_string(p) + "].a must have N*L finite entries");
    }
  }
  if (s.weights.size() != N) throw Error(ErrorCode::kInvalidScenario, "weights must have one entry per step");
  for (double w : s.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::kInvalidScenario, "weights must be finite and >= 0");
  }
  if (s.x0.size() != r || !s.x0.allFinite()) throw Error(ErrorCode::kInvalidScenario, "x0 must have state_dim entries");
  if (s.p0.rows() != r || s.p0.cols() != r) throw Error(ErrorCode::kInvalidScenario, "P0 has wrong dimensions");
  require_pd(s.p0, "P0");
  for (Index idx : s.position_indices) {
    if (idx < 0 || idx >= r) throw Error(ErrorCode::kInvalidScenario, "position_indices out of range");
  }
}

// ---------------------------------------------------------------------------
// Generators

/// Constant-velocity model in the plane, state (x, ẋ, y, ẏ).
inline DynamicSystem tracking_system(double T) {
  DynamicSystem sys;
  sys.state_dim = 4;
  Matrix f = Matrix::Identity(4, 4);
  f(0, 1) = T;
  f(2, 3) = T;
  Matrix qb(2, 2);
  qb << T * T * T / 3.0, T * T / 2.0, T * T / 2.0, T;
  Matrix q = Matrix::Zero(4, 4);
  q.block(0, 0, 2, 2) = qb;
  q.block(2, 2, 2, 2) = qb;
  sys.f = {f};
  sys.q = {q};
  return sys;
}

/// Position-only measurement of the tracking state.
inline Matrix position_measurement() {
  Matrix h = Matrix::Zero(2, 4);
  h(0, 0) = 1.0;
  h(1, 2) = 1.0;
  return h;
}

/// Per-component uniform ranges for diagonal sensor noise variances.
struct DiagonalNoiseSpec {
  std::vector<std::pair<double, double>> ranges;
};

/// Everything a generated scenario shares apart from sensor placement/noise.
struct ScenarioTemplate {
  std::string name;
  DynamicSystem system;
  Matrix h;
  ConstraintSet constraints;  // energy, if set, is broadcast from energy[0]
  std::vector<double> weights;
  Vector x0;
  Matrix p0;
  Position origin = Position::Zero();
};

namespace detail {

inline Scenario assemble(const ScenarioTemplate& tpl, const std::vector<Position>& positions,
                         const DiagonalNoiseSpec& noise, Rng& rng, std::uint64_t seed) {
  Scenario s;
  s.name = tpl.name;
  s.system = tpl.system;
  s.constraints = tpl.constraints;
  s.weights = tpl.weights;
  s.x0 = tpl.x0;
  s.p0 = tpl.p0;
  s.seed = seed;
  s.position_indices = default_position_indices(tpl.system.state_dim);
  if (static_cast<Index>(noise.ranges.size()) != tpl.h.rows()) {
    throw Error(ErrorCode::kInvalidScenario, "noise ranges must give one range per measurement component");
  }
  std::vector<Matrix> blocks;
  for (const auto& p : positions) {
    s.sensors.push_back(SensorModel{{tpl.h}, p});
    Vector d(tpl.h.rows());
    for (Index c = 0; c < d.size(); ++c) {
      const auto [lo, hi] = noise.ranges[static_cast<std::size_t>(c)];
      d(c) = rng.uniform(lo, hi);
    }
    blocks.push_back(d.asDiagonal());
  }
  if (tpl.constraints.energy) {
    const int budget = tpl.constraints.energy->empty() ? 0 : tpl.constraints.energy->front();
    s.constraints.energy = std::vector<int>(positions.size(), budget);
  }
  s.noise.r_base = {block_diagonal(blocks)};
  refresh_noise(s.noise, s.sensors);
  return s;
}

}  // namespace detail

/// grid×grid sensors on a uniform lattice spanning the square
/// [origin, origin + area]²; a 1×1 grid puts its sensor at the center.
inline Scenario gen_grid_scenario(std::size_t grid, double area, const DiagonalNoiseSpec& noise,
                                  std::uint64_t seed, const ScenarioTemplate& tpl) {
  if (grid < 1) throw Error(ErrorCode::kInvalidScenario, "grid must be at least 1x1");
  std::vector<Position> pos;
  const double step = grid > 1 ? area / static_cast<double>(grid - 1) : 0.0;
  for (std::size_t row = 0; row < grid; ++row) {
    for (std::size_t col = 0; col < grid; ++col) {
      Position p = grid > 1 ? Position(col * step, row * step) : Position(area / 2, area / 2);
      pos.push_back(tpl.origin + p);
    }
  }
  Rng rng(derive_seed(seed, 1));
  return detail::assemble(tpl, pos, noise, rng, seed);
}

/// `count` sensors i.i.d. uniform over the square [origin, origin + area]².
inline Scenario gen_uniform_scenario(std::size_t count, double area, const DiagonalNoiseSpec& noise,
                                     std::uint64_t seed, const ScenarioTemplate& tpl) {
  Rng rng(derive_seed(seed, 1));
  std::vector<Position> pos;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = rng.uniform(0.0, area);
    const double y = rng.uniform(0.0, area);
    pos.push_back(tpl.origin + Position(x, y));
  }
  return detail::assemble(tpl, pos, noise, rng, seed);
}

}  // namespace sensel
