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

#include "qrc/fock.hpp"

#include <Eigen/LU>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qrc {

namespace {

const cplx I(0.0, 1.0);

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

SpMat identity(std::size_t d) {
  SpMat m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m.setIdentity();
  return m;
}

SpMat single_annihilator(int d) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (int n = 1; n < d; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  SpMat a(d, d);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SpMat kron(const SpMat& A, const SpMat& B) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (Eigen::Index i = 0; i < A.outerSize(); ++i)
    for (SpMat::InnerIterator ia(A, i); ia; ++ia)
      for (Eigen::Index k = 0; k < B.outerSize(); ++k)
        for (SpMat::InnerIterator ib(B, k); ib; ++ib)
          t.emplace_back(ia.row() * B.rows() + ib.row(), ia.col() * B.cols() + ib.col(), ia.value() * ib.value());
  SpMat out(A.rows() * B.rows(), A.cols() * B.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SpMat dag(const SpMat& A) { return SpMat(A.adjoint()); }
SpMat mul(const SpMat& A, const SpMat& B) { return SpMat(A * B); }

}  // namespace

FockModel::FockModel(const ChainSpec& chain, std::vector<int> cutoffs) : chain_(chain), cutoffs_(std::move(cutoffs)) {
  chain_.validate();
  const std::size_t n = chain_.network.size();
  if (n == 0 || n > 2) throw std::invalid_argument("FockModel: supports one or two modes");
  if (cutoffs_.size() != n) throw std::invalid_argument("FockModel: one cutoff per mode required");
  dim_ = 1;
  for (int c : cutoffs_) {
    if (c < 2) throw std::invalid_argument("FockModel: cutoff must be >= 2");
    dim_ *= static_cast<std::size_t>(c);
  }
  if (dim_ > kFockMaxDim) throw std::invalid_argument("FockModel: Hilbert dimension exceeds 1600");

  for (std::size_t k = 0; k < n; ++k) {
    SpMat op = single_annihilator(cutoffs_[k]);
    if (n == 2) op = k == 0 ? kron(op, identity(cutoffs_[1])) : kron(identity(cutoffs_[0]), op);
    a_.push_back(op);
  }
  const double r2 = std::sqrt(2.0);
  auto X = [&](std::size_t k) { return SpMat(SpMat(a_[k] + dag(a_[k])) / r2); };
  auto P = [&](std::size_t k) { return SpMat(SpMat(SpMat(-I * a_[k]) + SpMat(I * dag(a_[k]))) / r2); };

  const Eigen::Index d = static_cast<Eigen::Index>(dim_);
  H_ = SpMat(d, d);
  std::vector<std::pair<Channel, SpMat>> monitored;
  for (const auto& blk : chain_.blocks) {
    std::visit(overloaded{
                   [&](const Detuning& x) { H_ += SpMat(-x.delta * mul(dag(a_[x.mode]), a_[x.mode])); },
                   [&](const Kerr& x) {
                     const SpMat& a = a_[x.mode];
                     H_ += SpMat(-0.5 * x.lambda * mul(mul(dag(a), dag(a)), mul(a, a)));
                   },
                   [&](const CoherentDrive& x) { H_ += SpMat(x.eta * dag(a_[x.mode])) + SpMat(std::conj(x.eta) * a_[x.mode]); },
                   [&](const BeamSplitter& x) {
                     H_ += SpMat(x.g * (mul(a_[x.i], dag(a_[x.j])) + mul(dag(a_[x.i]), a_[x.j])));
                   },
                   [&](const DegenerateParametric& x) {
                     const cplx e = 0.5 * x.G * std::exp(I * x.phase);
                     const SpMat& a = a_[x.mode];
                     H_ += SpMat(e * mul(a, a)) + SpMat(std::conj(e) * mul(dag(a), dag(a)));
                   },
                   [&](const NonDegenerateParametric& x) {
                     const cplx e = x.G * std::exp(I * x.phase);
                     H_ += SpMat(e * mul(a_[x.i], a_[x.j])) + SpMat(std::conj(e) * mul(dag(a_[x.i]), dag(a_[x.j])));
                   },
                   [&](const Loss& x) {
                     jumps_.push_back(SpMat(std::sqrt(x.gamma) * a_[x.mode]));
                     if (x.monitored) monitored.emplace_back(Channel{x.mode, x.gamma}, jumps_.back());
                   },
                   [&](const DirectionalAmpCoupling& x) {
                     H_ += SpMat(-x.g_c * mul(P(x.to), X(x.from)));
                     jumps_.push_back(SpMat(std::sqrt(x.Gamma_c) * (X(x.from) + SpMat(I * P(x.to)))));
                   },
                   [&](const CirculatorCoupling& x) {
                     const SpMat t = mul(dag(a_[x.from]), a_[x.to]);
                     H_ += SpMat(0.5 * I * x.g_c * t) - SpMat(0.5 * I * x.g_c * dag(t));
                     jumps_.push_back(SpMat(std::sqrt(x.Gamma_c) * (a_[x.from] + a_[x.to])));
                   }},
               blk);
  }
  Heff_ = H_;
  for (const auto& L : jumps_) Heff_ += SpMat(-0.5 * I * mul(dag(L), L));
  Heff_.prune(cplx(0.0));

  for (const auto& ch : chain_.channels) {
    channel_ops_.push_back(SpMat(std::sqrt(ch.gamma) * a_[ch.mode]));
    int idx = -1;
    for (std::size_t j = 0; j < jumps_.size(); ++j) {
      for (const auto& [mc, op] : monitored)
        if (mc.mode == ch.mode && mc.gamma == ch.gamma && SpMat(op - jumps_[j]).norm() == 0.0) idx = static_cast<int>(j);
      if (idx >= 0) break;
    }
    channel_jump_.push_back(idx);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      pair_bb_.push_back(mul(a_[i], a_[j]));
      pair_bdb_.push_back(mul(dag(a_[i]), a_[j]));
    }
}

RhoMat FockModel::lindblad(const RhoMat& rho) const {
  RhoMat x = Heff_ * rho;
  RhoMat out = -I * (x - x.adjoint());
  for (const auto& L : jumps_) {
    RhoMat y = L * rho;
    RhoMat yt = y.adjoint();
    out += (L * yt).adjoint();
  }
  return out;
}

void FockModel::step(RhoMat& rho, double dt, const double* dW) const {
  // rho += G + G^dag with G the non-Hermitian half of the increment
  acc_.noalias() = Heff_ * rho;
  acc_ *= -I * dt;
  const double s = std::sqrt(0.5);
  auto measure = [&](std::size_t ch) {
    // y_ holds c rho
    const cplx tr = y_.trace();
    const double wx = dW[2 * ch] * s, wp = dW[2 * ch + 1] * s;
    acc_ += (wx - I * wp) * y_;
    acc_ -= (wx * tr.real() + wp * tr.imag()) * rho;
  };
  std::vector<bool> done(chain_.channels.size(), false);
  for (std::size_t j = 0; j < jumps_.size(); ++j) {
    const SpMat& L = jumps_[j];
    // rho is Hermitian, so rho L^dag = (L rho)^dag
    y_.noalias() = L * rho;
    yt_ = y_.adjoint();
    acc_.noalias() += (0.5 * dt) * (L * yt_);
    if (dW == nullptr) continue;
    for (std::size_t ch = 0; ch < channel_jump_.size(); ++ch)
      if (channel_jump_[ch] == static_cast<int>(j) && !done[ch]) {
        measure(ch);
        done[ch] = true;
      }
  }
  if (dW != nullptr)
    for (std::size_t ch = 0; ch < done.size(); ++ch)
      if (!done[ch]) {
        y_.noalias() = channel_ops_[ch] * rho;
        measure(ch);
      }
  rho += acc_;
  rho += acc_.adjoint();
  const double tr = rho.trace().real();
  if (!std::isfinite(tr) || tr <= 0.0) throw NumericalFailure("Fock SME: non-finite or non-positive trace");
  rho /= tr;
}

cplx FockModel::expect(const SpMat& op, const RhoMat& rho) const {
  cplx s = 0.0;
  for (Eigen::Index r = 0; r < op.outerSize(); ++r)
    for (SpMat::InnerIterator it(op, r); it; ++it) s += it.value() * rho(it.col(), r);
  return s;
}

CumulantState FockModel::cumulants(const RhoMat& rho) const {
  const Eigen::Index n = static_cast<Eigen::Index>(a_.size());
  CumulantState st;
  st.mu.resize(n);
  st.c_bb.resize(n, n);
  st.c_bdb.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) st.mu(k) = expect(a_[k], rho);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      st.c_bb(i, j) = expect(pair_bb_[i * n + j], rho) - st.mu(i) * st.mu(j);
      st.c_bdb(i, j) = expect(pair_bdb_[i * n + j], rho) - std::conj(st.mu(i)) * st.mu(j);
    }
  return st;
}

double FockModel::top_level_population(const RhoMat& rho) const {
  double worst = 0.0;
  const std::size_t n = a_.size();
  for (std::size_t k = 0; k < n; ++k) {
    double p = 0.0;
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      const std::size_t digit = (n == 2 && k == 0) ? idx / static_cast<std::size_t>(cutoffs_[1])
                                                   : idx % static_cast<std::size_t>(cutoffs_[k]);
      if (static_cast<int>(digit) == cutoffs_[k] - 1) p += rho(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)).real();
    }
    worst = std::max(worst, p);
  }
  return worst;
}

RhoMat FockModel::vacuum() const {
  const Eigen::Index d = static_cast<Eigen::Index>(dim_);
  RhoMat rho = RhoMat::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

RhoMat FockModel::coherent(const CVec& alphas) const {
  if (static_cast<std::size_t>(alphas.size()) != a_.size()) throw std::invalid_argument("FockModel::coherent: size");
  std::vector<CVec> single;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    CVec v(cutoffs_[k]);
    cplx c = 1.0;
    for (int m = 0; m < cutoffs_[k]; ++m) {
      if (m > 0) c *= alphas(static_cast<Eigen::Index>(k)) / std::sqrt(static_cast<double>(m));
      v(m) = c;
    }
    v.normalize();
    single.push_back(v);
  }
  CVec psi = single[0];
  if (single.size() == 2) {
    psi.resize(static_cast<Eigen::Index>(dim_));
    for (Eigen::Index i = 0; i < single[0].size(); ++i)
      for (Eigen::Index j = 0; j < single[1].size(); ++j) psi(i * single[1].size() + j) = single[0](i) * single[1](j);
  }
  return psi * psi.adjoint();
}

RhoMat FockModel::steady_state_dense() const {
  const Eigen::Index d = static_cast<Eigen::Index>(dim_);
  if (d > 40) throw std::invalid_argument("steady_state_dense: dimension too large for a dense solve");
  const CMat He = CMat(Heff_);
  const CMat Id = CMat::Identity(d, d);
  auto kr = [](const CMat& A, const CMat& B) {
    CMat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
  };
  // column-stacked vec: vec(A rho B) = (B^T kron A) vec(rho)
  CMat Lsup = -I * kr(Id, He) + I * kr(He.conjugate(), Id);
  for (const auto& L : jumps_) {
    const CMat Ld = CMat(L);
    Lsup += kr(Ld.conjugate(), Ld);
  }
  CVec rhs = CVec::Zero(d * d);
  // replace one equation by the trace condition
  for (Eigen::Index j = 0; j < d * d; ++j) Lsup(0, j) = (j % (d + 1) == 0) ? cplx(1.0) : cplx(0.0);
  rhs(0) = 1.0;
  const CVec v = Lsup.fullPivLu().solve(rhs);
  RhoMat rho(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) rho(r, c) = v(c * d + r);
  RhoMat h = 0.5 * (rho + RhoMat(rho.adjoint()));
  return h / h.trace().real();
}

TrajectoryResult simulate_fock_trajectory(const ChainSpec& chain, const FockTrajectoryOptions& opts,
                                          std::uint64_t traj, const CVec* initial_alphas, double* max_top) {
  const IntegratorConfig& cfg = opts.integrator;
  cfg.validate();
  FockModel fm(chain, opts.cutoffs);
  RhoMat rho = initial_alphas ? fm.coherent(*initial_alphas) : fm.vacuum();
  const std::size_t nch = chain.channels.size();
  TrajectoryResult r;
  r.record.seed = cfg.seed;
  r.record.trajectory = traj;
  r.record.dt = cfg.dt;
  r.record.stride = cfg.store_stride;
  r.record.jx.assign(nch, {});
  r.record.jp.assign(nch, {});
  NoiseStream ns(cfg.seed, traj);
  std::vector<double> dW(2 * nch), acc(2 * nch, 0.0);
  std::size_t in_block = 0;
  const std::size_t steps = cfg.n_steps();
  if (max_top) *max_top = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    ns.increments(s, nch, cfg.dt, dW.data());
    if (opts.conditional) {
      for (std::size_t ch = 0; ch < nch; ++ch) {
        const cplx mu = fm.expect(fm.annihilator(chain.channels[ch].mode), rho);
        const double a = std::sqrt(chain.channels[ch].gamma / 2.0);
        acc[2 * ch] += 2.0 * a * mu.real() + dW[2 * ch] / cfg.dt;
        acc[2 * ch + 1] += 2.0 * a * mu.imag() + dW[2 * ch + 1] / cfg.dt;
      }
    }
    fm.step(rho, cfg.dt, opts.conditional ? dW.data() : nullptr);
    if ((s + 1) % opts.leak_check_stride == 0 || s + 1 == steps) {
      const double top = fm.top_level_population(rho);
      if (max_top) *max_top = std::max(*max_top, top);
      if (top > opts.leak_tol) {
        std::ostringstream os;
        os << "Fock cutoff leakage " << top << " at t=" << (s + 1) * cfg.dt << ": increase cutoff";
        throw CutoffLeakage(os.str());
      }
    }
    if (++in_block == cfg.store_stride) {
      r.record.times.push_back((s + 1) * cfg.dt);
      for (std::size_t ch = 0; ch < nch; ++ch) {
        r.record.jx[ch].push_back(acc[2 * ch] / static_cast<double>(in_block));
        r.record.jp[ch].push_back(acc[2 * ch + 1] / static_cast<double>(in_block));
      }
      r.states.push_back(fm.cumulants(rho));
      std::fill(acc.begin(), acc.end(), 0.0);
      in_block = 0;
    }
  }
  return r;
}

}  // namespace qrc
