// Copyright 2026 The qrcsim Authors
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

#include "qrc/sde.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace qrc {

std::size_t IntegratorConfig::n_steps() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
  if (!(t_final >= dt)) throw std::invalid_argument("IntegratorConfig: t_final must be >= dt");
  if (store_stride < 1) throw std::invalid_argument("IntegratorConfig: store_stride must be >= 1");
  if (scheme != "euler_maruyama") throw std::invalid_argument("IntegratorConfig: unknown scheme " + scheme);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

inline double unit_open(std::uint64_t h) {
  // (0, 1]
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

inline void box_muller(std::uint64_t key, double& z0, double& z1) {
  const std::uint64_t h1 = mix64(key);
  const std::uint64_t h2 = mix64(key ^ 0x5851f42d4c957f2dULL);
  const double r = std::sqrt(-2.0 * std::log(unit_open(h1)));
  const double th = 2.0 * std::numbers::pi * unit_open(h2);
  z0 = r * std::cos(th);
  z1 = r * std::sin(th);
}

inline std::uint64_t step_key(std::uint64_t seed, std::uint64_t traj, std::uint64_t step, std::uint32_t ch) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ traj);
  h = mix64(h ^ step);
  return mix64(h ^ (static_cast<std::uint64_t>(ch) + 0x632be59bd9b4e019ULL));
}

}  // namespace

double NoiseStream::normal(std::uint64_t step, std::uint32_t channel, std::uint32_t quad) const {
  double z0, z1;
  box_muller(step_key(seed_, traj_, step, channel), z0, z1);
  return quad == 0 ? z0 : z1;
}

void NoiseStream::increments(std::uint64_t step, std::size_t n_channels, double dt, double* dW) const {
  const double s = std::sqrt(dt);
  for (std::size_t ch = 0; ch < n_channels; ++ch) {
    double z0, z1;
    box_muller(step_key(seed_, traj_, step, static_cast<std::uint32_t>(ch)), z0, z1);
    dW[2 * ch] = s * z0;
    dW[2 * ch + 1] = s * z1;
  }
}

Stepper::Stepper(const Model& model, bool conditional) : model_(&model), conditional_(conditional) {
  n_ = static_cast<Eigen::Index>(model.n_modes());
  m_ = CVec::Zero(2 * n_);
  dm_ = CVec::Zero(2 * n_);
  c_ = CMat::Zero(2 * n_, 2 * n_);
  dc_ = CMat::Zero(2 * n_, n_);
}

void Stepper::set_state(const CumulantState& s) {
  if (static_cast<Eigen::Index>(s.n_modes()) != n_) throw std::invalid_argument("Stepper: state size mismatch");
  m_ = qrc::doubled_mean(s);
  c_ = doubled_cumulants(s);
}

void Stepper::rebuild_doubled() {
  const Eigen::Index n = n_;
  m_.tail(n) = m_.head(n).conjugate();
  // c_bb: mirror the upper triangle; c_bdb: Hermitian from its upper triangle.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      c_(j, i) = c_(i, j);
      c_(n + j, i) = std::conj(c_(n + i, j));
    }
    c_(n + i, i) = c_(n + i, i).real();
  }
  c_.topRightCorner(n, n) = c_.bottomLeftCorner(n, n).transpose();
  c_.bottomRightCorner(n, n) = c_.topLeftCorner(n, n).conjugate();
}

void Stepper::step(double dt, const double* dW) {
  const Eigen::Index n = n_;
  model_->drift_doubled(m_, c_, dm_, dc_);
  if (conditional_) model_->add_backaction_doubled(c_, dc_);
  m_.head(n) += dt * dm_.head(n);
  if (conditional_ && dW != nullptr) {
    for (std::size_t ch = 0; ch < model_->n_channels(); ++ch) {
      model_->innovation_doubled(c_, ch, xi_x_, xi_p_);
      m_.head(n) += xi_x_ * dW[2 * ch] + xi_p_ * dW[2 * ch + 1];
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      c_(i, j) += dt * dc_(i, j);
      c_(n + i, j) += dt * dc_(n + i, j);
    }
  rebuild_doubled();
}

void Stepper::current_means(double* out) const {
  const auto& chans = model_->chain().channels;
  for (std::size_t ch = 0; ch < chans.size(); ++ch) {
    const cplx mu = m_(static_cast<Eigen::Index>(chans[ch].mode));
    const double a = std::sqrt(chans[ch].gamma / 2.0);
    out[2 * ch] = 2.0 * a * mu.real();
    out[2 * ch + 1] = 2.0 * a * mu.imag();
  }
}

double Stepper::drift_norm() {
  model_->drift_doubled(m_, c_, dm_, dc_);
  if (conditional_) model_->add_backaction_doubled(c_, dc_);
  return std::max(dm_.cwiseAbs().maxCoeff(), dc_.cwiseAbs().maxCoeff());
}

void run_conditional(const Model& model, const IntegratorConfig& cfg, const CumulantState& initial,
                     const NoiseSource& noise, const StepObserver& observer) {
  cfg.validate();
  Stepper st(model, true);
  st.set_state(initial);
  const std::size_t nch = model.n_channels();
  std::vector<double> dW(2 * nch), J(2 * nch);
  const std::size_t steps = cfg.n_steps();
  for (std::size_t s = 0; s < steps; ++s) {
    noise(s, dW.data());
    st.current_means(J.data());
    for (std::size_t i = 0; i < 2 * nch; ++i) J[i] += dW[i] / cfg.dt;
    st.step(cfg.dt, dW.data());
    if (!st.finite()) {
      std::ostringstream os;
      os << "non-finite state at step " << s << " (t=" << (s + 1) * cfg.dt << ")";
      throw NumericalFailure(os.str());
    }
    if (observer) observer(s, (s + 1) * cfg.dt, st, J.data());
  }
}

TrajectoryResult simulate_trajectory(const Model& model, const IntegratorConfig& cfg, std::uint64_t traj,
                                     const CumulantState& initial) {
  cfg.validate();
  const std::size_t nch = model.n_channels();
  TrajectoryResult r;
  r.record.seed = cfg.seed;
  r.record.trajectory = traj;
  r.record.dt = cfg.dt;
  r.record.stride = cfg.store_stride;
  r.record.jx.assign(nch, {});
  r.record.jp.assign(nch, {});
  std::vector<double> acc(2 * nch, 0.0);
  std::size_t in_block = 0;
  NoiseStream ns(cfg.seed, traj);
  auto noise = [&](std::uint64_t step, double* dW) { ns.increments(step, nch, cfg.dt, dW); };
  auto obs = [&](std::size_t, double t, const Stepper& st, const double* J) {
    for (std::size_t i = 0; i < 2 * nch; ++i) acc[i] += J[i];
    if (++in_block == cfg.store_stride) {
      r.record.times.push_back(t);
      for (std::size_t ch = 0; ch < nch; ++ch) {
        r.record.jx[ch].push_back(acc[2 * ch] / static_cast<double>(in_block));
        r.record.jp[ch].push_back(acc[2 * ch + 1] / static_cast<double>(in_block));
      }
      r.states.push_back(st.state());
      std::fill(acc.begin(), acc.end(), 0.0);
      in_block = 0;
    }
  };
  run_conditional(model, cfg, initial, noise, obs);
  return r;
}

TrajectoryResult simulate_trajectory(const ChainSpec& chain, const IntegratorConfig& cfg, std::uint64_t traj) {
  Model model(chain);
  return simulate_trajectory(model, cfg, traj, vacuum(chain.network));
}

std::vector<CumulantState> evolve_unconditional(const ChainSpec& chain, const IntegratorConfig& cfg,
                                                const CumulantState& initial, DriftOptions opts) {
  cfg.validate();
  Model model(chain, opts);
  Stepper st(model, false);
  st.set_state(initial);
  std::vector<CumulantState> out;
  const std::size_t steps = cfg.n_steps();
  for (std::size_t s = 0; s < steps; ++s) {
    st.step(cfg.dt, nullptr);
    if (!st.finite()) throw NumericalFailure("non-finite state in unconditional evolution");
    if ((s + 1) % cfg.store_stride == 0) out.push_back(st.state());
  }
  return out;
}

CumulantState steady_state(const ChainSpec& chain, const SteadyStateOptions& opts, const CumulantState& initial) {
  Model model(chain, opts.drift);
  Stepper st(model, false);
  st.set_state(initial);
  const std::size_t max_steps = static_cast<std::size_t>(opts.t_max / opts.dt);
  for (std::size_t s = 0; s < max_steps; ++s) {
    if (s % 64 == 0) {
      const double dn = st.drift_norm();
      if (!std::isfinite(dn)) throw NumericalFailure("non-finite state while seeking steady state");
      if (dn < opts.tol) return st.state();
    }
    st.step(opts.dt, nullptr);
  }
  std::ostringstream os;
  os << "steady_state: no convergence within t=" << opts.t_max << " (residual " << st.drift_norm() << ")";
  throw NoConvergence(os.str());
}

CumulantState steady_state(const ChainSpec& chain, double tol) {
  SteadyStateOptions o;
  o.tol = tol;
  return steady_state(chain, o, vacuum(chain.network));
}

namespace {

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char b[sizeof(T)];
  is.read(reinterpret_cast<char*>(b), sizeof(T));
  if (!is) throw std::runtime_error("STEO: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_steo(std::ostream& os, const TrajectoryResult& r) {
  const std::size_t n = r.states.empty() ? 0 : r.states.front().n_modes();
  const std::size_t nch = r.record.n_channels();
  os.write("STEO", 4);
  put<std::uint16_t>(os, kSteoVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(n));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(nch));
  put<double>(os, r.record.dt);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(r.record.stride));
  put<std::uint64_t>(os, r.record.seed);
  put<std::uint64_t>(os, r.record.trajectory);
  put<std::uint64_t>(os, r.record.size());
  for (std::size_t i = 0; i < r.record.size(); ++i) {
    put<double>(os, r.record.times[i]);
    for (double v : serialize(r.states[i])) put<double>(os, v);
    for (std::size_t ch = 0; ch < nch; ++ch) {
      put<double>(os, r.record.jx[ch][i]);
      put<double>(os, r.record.jp[ch][i]);
    }
  }
}

TrajectoryResult read_steo(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "STEO", 4) != 0) throw std::runtime_error("STEO: bad magic");
  const auto ver = get<std::uint16_t>(is);
  if (ver != kSteoVersion) throw std::runtime_error("STEO: unsupported version");
  TrajectoryResult r;
  const std::size_t n = get<std::uint32_t>(is);
  const std::size_t nch = get<std::uint32_t>(is);
  r.record.dt = get<double>(is);
  r.record.stride = get<std::uint32_t>(is);
  r.record.seed = get<std::uint64_t>(is);
  r.record.trajectory = get<std::uint64_t>(is);
  const std::size_t count = get<std::uint64_t>(is);
  r.record.jx.assign(nch, {});
  r.record.jp.assign(nch, {});
  std::vector<double> flat(flat_size(n));
  for (std::size_t i = 0; i < count; ++i) {
    r.record.times.push_back(get<double>(is));
    for (auto& v : flat) v = get<double>(is);
    r.states.push_back(deserialize(flat, n));
    for (std::size_t ch = 0; ch < nch; ++ch) {
      r.record.jx[ch].push_back(get<double>(is));
      r.record.jp[ch].push_back(get<double>(is));
    }
  }
  return r;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryResult& r) {
  const std::size_t n = r.states.empty() ? 0 : r.states.front().n_modes();
  const std::size_t nch = r.record.n_channels();
  os << "t";
  for (std::size_t k = 0; k < n; ++k) os << ",mu_re_" << k << ",mu_im_" << k;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) os << ",cbb_re_" << i << j << ",cbb_im_" << i << j;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      os << ",cbdb_re_" << i << j;
      if (j != i) os << ",cbdb_im_" << i << j;
    }
  for (std::size_t ch = 0; ch < nch; ++ch) os << ",JX_" << ch << ",JP_" << ch;
  os << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < r.record.size(); ++i) {
    const auto& s = r.states[i];
    os << r.record.times[i];
    for (std::size_t k = 0; k < n; ++k) os << "," << s.mu[k].real() << "," << s.mu[k].imag();
    const auto flat = serialize(s);
    for (std::size_t p = 2 * n; p < flat.size(); ++p) os << "," << flat[p];
    for (std::size_t ch = 0; ch < nch; ++ch) os << "," << r.record.jx[ch][i] << "," << r.record.jp[ch][i];
    os << "\n";
  }
}

}  // namespace qrc
