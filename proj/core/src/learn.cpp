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

#include "qrc/learn.hpp"

#include <algorithm>
#include <Eigen/LU>
#include <cmath>
#include <istream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qrc {

RVec QuadratureSeries::features(std::size_t i) const {
  RVec x(2 * static_cast<Eigen::Index>(n_channels()));
  for (std::size_t ch = 0; ch < n_channels(); ++ch) {
    x(2 * static_cast<Eigen::Index>(ch)) = ix[ch].at(i);
    x(2 * static_cast<Eigen::Index>(ch) + 1) = ip[ch].at(i);
  }
  return x;
}

QuadratureSeries boxcar_filter(const HeterodyneRecord& rec, double t0) {
  if (rec.size() == 0) throw std::invalid_argument("boxcar_filter: empty record");
  if (t0 < 0.0) throw std::invalid_argument("boxcar_filter: t0 must be >= 0");
  const std::size_t nch = rec.n_channels();
  QuadratureSeries out;
  out.ix.assign(nch, {});
  out.ip.assign(nch, {});
  std::vector<double> sx(nch, 0.0), sp(nch, 0.0);
  double prev = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double t = rec.times[i];
    // J is the block average over (prev, t]
    const double w = std::max(0.0, t - std::max(prev, t0));
    for (std::size_t ch = 0; ch < nch; ++ch) {
      sx[ch] += w * rec.jx[ch][i];
      sp[ch] += w * rec.jp[ch][i];
    }
    prev = t;
    if (t - t0 <= 1e-12 * std::max(1.0, t)) continue;
    out.times.push_back(t);
    for (std::size_t ch = 0; ch < nch; ++ch) {
      out.ix[ch].push_back(sx[ch] / (t - t0));
      out.ip[ch].push_back(sp[ch] / (t - t0));
    }
  }
  return out;
}

QuadratureSeries ensemble_average(const std::vector<QuadratureSeries>& shots) {
  if (shots.empty()) throw std::invalid_argument("ensemble_average: no shots");
  QuadratureSeries out = shots.front();
  for (std::size_t s = 1; s < shots.size(); ++s) {
    const auto& q = shots[s];
    if (q.times != out.times || q.n_channels() != out.n_channels())
      throw std::invalid_argument("ensemble_average: shots do not share a grid");
    for (std::size_t ch = 0; ch < q.n_channels(); ++ch)
      for (std::size_t i = 0; i < q.size(); ++i) {
        out.ix[ch][i] += q.ix[ch][i];
        out.ip[ch][i] += q.ip[ch][i];
      }
  }
  const double inv = 1.0 / static_cast<double>(shots.size());
  for (std::size_t ch = 0; ch < out.n_channels(); ++ch)
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.ix[ch][i] *= inv;
      out.ip[ch][i] *= inv;
    }
  return out;
}

RVec project_phi(const RVec& x, const std::vector<double>& phi) {
  if (x.size() != 2 * static_cast<Eigen::Index>(phi.size()))
    throw std::invalid_argument("project_phi: feature length must be 2K");
  RVec y(static_cast<Eigen::Index>(phi.size()));
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const Eigen::Index i = static_cast<Eigen::Index>(k);
    y(i) = std::cos(phi[k]) * x(2 * i) + std::sin(phi[k]) * x(2 * i + 1);
  }
  return y;
}

std::vector<std::vector<std::size_t>> partition_pool(std::size_t pool, std::size_t n_shots) {
  if (n_shots == 0) throw std::invalid_argument("partition_pool: n_shots must be >= 1");
  std::vector<std::vector<std::size_t>> g(pool / n_shots);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t s = 0; s < n_shots; ++s) g[i].push_back(i * n_shots + s);
  return g;
}

std::vector<std::vector<std::size_t>> bootstrap_pool(std::size_t pool, std::size_t n_shots, std::size_t n_groups,
                                                     std::uint64_t seed) {
  if (n_shots == 0 || pool == 0) throw std::invalid_argument("bootstrap_pool: empty pool or group");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> g(n_groups);
  for (auto& v : g)
    for (std::size_t s = 0; s < n_shots; ++s) v.push_back(static_cast<std::size_t>(rng() % pool));
  return g;
}

void Dataset::validate() const {
  if (static_cast<std::size_t>(X.cols()) != labels.size()) throw std::invalid_argument("Dataset: X/labels size mismatch");
  if (n_classes < 1) throw std::invalid_argument("Dataset: n_classes must be >= 1");
  for (int l : labels)
    if (l < 1 || l > n_classes) throw std::invalid_argument("Dataset: label out of range");
  if (!X.allFinite()) throw std::invalid_argument("Dataset: non-finite features");
}

RVec softmax(const RVec& z) {
  const double m = z.maxCoeff();
  RVec e = (z.array() - m).exp();
  return e / e.sum();
}

namespace {

RMat project_all(const RMat& X, const std::vector<double>& phi) {
  if (phi.empty()) return X;
  RMat out(static_cast<Eigen::Index>(phi.size()), X.cols());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const Eigen::Index i = static_cast<Eigen::Index>(k);
    out.row(i) = std::cos(phi[k]) * X.row(2 * i) + std::sin(phi[k]) * X.row(2 * i + 1);
  }
  return out;
}

RMat one_hot(const std::vector<int>& labels, int C) {
  RMat Y = RMat::Zero(C, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) Y(labels[i] - 1, static_cast<Eigen::Index>(i)) = 1.0;
  return Y;
}

RMat softmax_cols(const RMat& A) {
  RMat P(A.rows(), A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) P.col(j) = softmax(A.col(j));
  return P;
}

double loss_and_grad(const RMat& W, const RVec& b, const RMat& Z, const RMat& Y, RMat* gW, RVec* gb) {
  const double n = static_cast<double>(Z.cols());
  RMat A = W * Z;
  A.colwise() += b;
  const RMat P = softmax_cols(A);
  const RMat R = P - Y;
  const double L = R.squaredNorm() / n;
  if (gW) {
    const RMat G = (2.0 / n) * R;
    const RMat PG = P.cwiseProduct(G);
    // softmax Jacobian: dA = P .* (G - 1 sum_c P G)
    const RMat dA = PG - P.cwiseProduct(RVec::Ones(P.rows()) * PG.colwise().sum());
    *gW = dA * Z.transpose();
    *gb = dA.rowwise().sum();
  }
  return L;
}

struct Fit {
  RMat W;
  RVec b;
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

Fit gradient_descent(RMat W, RVec b, const RMat& Z, const RMat& Y, int max_iter, double tol, bool keep_history,
                     bool fit_bias) {
  Fit f;
  RMat gW;
  RVec gb;
  double L = loss_and_grad(W, b, Z, Y, &gW, &gb);
  if (!fit_bias) gb.setZero();
  if (keep_history) f.history.push_back(L);
  double alpha = 1.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    const double g2 = gW.squaredNorm() + gb.squaredNorm();
    if (std::sqrt(g2) < tol) {
      f.converged = true;
      break;
    }
    alpha = std::min(alpha * 2.0, 1e4);
    bool accepted = false;
    while (alpha > 1e-14) {
      const RMat W2 = W - alpha * gW;
      const RVec b2 = b - alpha * gb;
      const double L2 = loss_and_grad(W2, b2, Z, Y, nullptr, nullptr);
      if (L2 <= L - 1e-4 * alpha * g2) {
        W = W2;
        b = b2;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // no further decrease representable; treat as stationary
      f.converged = std::sqrt(g2) < std::sqrt(tol);
      break;
    }
    L = loss_and_grad(W, b, Z, Y, &gW, &gb);
    if (!fit_bias) gb.setZero();
    if (keep_history) f.history.push_back(L);
  }
  f.W = W;
  f.b = b;
  f.loss = L;
  f.iterations = it;
  return f;
}

struct Standardizer {
  RVec mean, scale;
  // center = false keeps the origin fixed (needed when biases are not trained)
  Standardizer(const RMat& X, bool center) {
    mean = center ? RVec(X.rowwise().mean()) : RVec::Zero(X.rows());
    scale.resize(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      const double v = (X.row(r).array() - mean(r)).square().mean();
      scale(r) = v > 0.0 ? std::sqrt(v) : 1.0;
    }
  }
  RMat apply(const RMat& X) const {
    RMat Z = X.colwise() - mean;
    return scale.cwiseInverse().asDiagonal() * Z;
  }
};

}  // namespace

double training_loss(const OutputLayer& layer, const Dataset& data) {
  const RMat Z = project_all(data.X, layer.phi);
  return loss_and_grad(layer.W, layer.b, Z, one_hot(data.labels, layer.n_classes()), nullptr, nullptr);
}

OutputLayer train(const Dataset& data, const TrainOptions& opts) {
  data.validate();
  const int C = data.n_classes;
  for (int c = 1; c <= C; ++c)
    if (std::find(data.labels.begin(), data.labels.end(), c) == data.labels.end())
      throw std::invalid_argument("train: every class needs at least one sample");
  const RMat Y = one_hot(data.labels, C);
  OutputLayer layer;
  std::vector<double> phi;
  if (opts.train_phi) {
    if (data.X.rows() % 2 != 0) throw std::invalid_argument("train: phase training needs 2K features");
    const std::size_t K = static_cast<std::size_t>(data.X.rows() / 2);
    phi.assign(K, 0.0);
    // phase search on a deterministic subsample
    const Eigen::Index n = data.X.cols();
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / 4000);
    std::vector<int> sub_labels;
    RMat Xs(data.X.rows(), (n + stride - 1) / stride);
    Eigen::Index m = 0;
    for (Eigen::Index j = 0; j < n; j += stride) {
      Xs.col(m++) = data.X.col(j);
      sub_labels.push_back(data.labels[static_cast<std::size_t>(j)]);
    }
    Xs.conservativeResize(Eigen::NoChange, m);
    const RMat Ys = one_hot(sub_labels, C);
    auto eval = [&](const std::vector<double>& ph) {
      const RMat P = project_all(Xs, ph);
      const Standardizer st(P, opts.fit_bias);
      const Fit f = gradient_descent(RMat::Zero(C, P.rows()), RVec::Zero(C), st.apply(P), Ys, opts.phi_inner_iter,
                                     opts.grad_tol, false, opts.fit_bias);
      return f.loss;
    };
    const double two_pi = 2.0 * std::numbers::pi;
    const double h = two_pi / opts.phi_grid;
    for (int sweep = 0; sweep < opts.phi_sweeps; ++sweep) {
      for (std::size_t k = 0; k < K; ++k) {
        double best = std::numeric_limits<double>::infinity(), best_phi = phi[k];
        for (int j = 0; j < opts.phi_grid; ++j) {
          phi[k] = h * j;
          const double L = eval(phi);
          if (L < best) {
            best = L;
            best_phi = phi[k];
          }
        }
        // golden-section refinement inside one grid cell on either side
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = best_phi - h, bnd = best_phi + h;
        double x1 = bnd - gr * (bnd - a), x2 = a + gr * (bnd - a);
        phi[k] = x1;
        double f1 = eval(phi);
        phi[k] = x2;
        double f2 = eval(phi);
        for (int it = 0; it < 20; ++it) {
          if (f1 < f2) {
            bnd = x2;
            x2 = x1;
            f2 = f1;
            x1 = bnd - gr * (bnd - a);
            phi[k] = x1;
            f1 = eval(phi);
          } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (bnd - a);
            phi[k] = x2;
            f2 = eval(phi);
          }
        }
        double cand = f1 < f2 ? x1 : x2;
        if (std::min(f1, f2) > best) cand = best_phi;
        cand = std::fmod(cand, two_pi);
        if (cand < 0.0) cand += two_pi;
        phi[k] = cand;
      }
    }
  }
  const RMat P = project_all(data.X, phi);
  const Standardizer st(P, opts.fit_bias);
  const RMat Z = st.apply(P);
  const Fit f =
      gradient_descent(RMat::Zero(C, Z.rows()), RVec::Zero(C), Z, Y, opts.max_iter, opts.grad_tol, true, opts.fit_bias);
  // back to raw feature units
  layer.W = f.W * st.scale.cwiseInverse().asDiagonal();
  layer.b = f.b - layer.W * st.mean;
  layer.phi = phi;
  layer.converged = f.converged;
  layer.iterations = f.iterations;
  layer.loss = f.loss;
  layer.loss_history = f.history;
  layer.train_accuracy = accuracy(layer, data);
  return layer;
}

RVec scores(const OutputLayer& layer, const RVec& x) {
  const RVec y = layer.phi.empty() ? x : project_phi(x, layer.phi);
  return softmax(layer.W * y + layer.b);
}

int predict(const OutputLayer& layer, const RVec& x) {
  const RVec y = layer.phi.empty() ? x : project_phi(x, layer.phi);
  const RVec z = layer.W * y + layer.b;
  int best = 0;
  for (Eigen::Index c = 1; c < z.size(); ++c)
    if (z(c) > z(best)) best = static_cast<int>(c);
  return best + 1;
}

double accuracy(const OutputLayer& layer, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (predict(layer, data.X.col(static_cast<Eigen::Index>(i))) == data.labels[i]) ++ok;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

Hyperplane decision_boundary(const OutputLayer& layer, int i, int j) {
  const int C = layer.n_classes();
  if (i < 1 || j < 1 || i > C || j > C || i == j) throw std::invalid_argument("decision_boundary: bad class pair");
  Hyperplane h;
  h.normal = (layer.W.row(i - 1) - layer.W.row(j - 1)).transpose();
  h.offset = layer.b(i - 1) - layer.b(j - 1);
  h.degenerate = h.normal.norm() == 0.0;
  return h;
}

ClassificationMetrics metrics(const std::vector<double>& curve, double threshold, double tie_tol) {
  ClassificationMetrics m;
  m.curve = curve;
  m.threshold = threshold;
  if (curve.empty()) return m;
  m.c_max = *std::max_element(curve.begin(), curve.end());
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (curve[i] >= m.c_max - tie_tol) {
      m.argfirst_max = static_cast<int>(i);
      break;
    }
  if (m.c_max >= threshold) m.index_at_threshold = m.argfirst_max;
  return m;
}

OutputLayer train_on_means_baseline(const Dataset& data) {
  data.validate();
  const Eigen::Index D = data.X.rows();
  const int C = data.n_classes;
  RMat means = RMat::Zero(D, C);
  std::vector<double> count(static_cast<std::size_t>(C), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    means.col(data.labels[i] - 1) += data.X.col(static_cast<Eigen::Index>(i));
    count[static_cast<std::size_t>(data.labels[i] - 1)] += 1.0;
  }
  OutputLayer layer;
  layer.W.resize(C, D);
  layer.b.resize(C);
  for (int c = 0; c < C; ++c) {
    if (count[static_cast<std::size_t>(c)] == 0.0) throw std::invalid_argument("baseline: empty class");
    const RVec mu = means.col(c) / count[static_cast<std::size_t>(c)];
    layer.W.row(c) = mu.transpose();
    layer.b(c) = -0.5 * mu.squaredNorm();
  }
  layer.kind = "means_baseline";
  layer.converged = true;
  layer.train_accuracy = accuracy(layer, data);
  return layer;
}

namespace {

// Steady mean; linear chains solve M m + c = 0 directly.
cplx steady_mean(const ChainSpec& chain, std::size_t mode) {
  if (chain.has_kerr()) return steady_state(chain).mu(static_cast<Eigen::Index>(mode));
  const LinearGenerator g = build_linear_generator(chain);
  const CVec m = g.M.fullPivLu().solve(-g.c);
  return m(static_cast<Eigen::Index>(mode));
}

}  // namespace

double b12_metric(const ChainSpec& chain1, const ChainSpec& chain2, std::size_t mode) {
  return std::abs(steady_mean(chain1, mode) - steady_mean(chain2, mode));
}

void write_dataset_csv(std::ostream& os, const Dataset& d) {
  os << "# qrc-dataset v1 classes=" << d.n_classes << "\n";
  os << "t,sigma,q";
  for (Eigen::Index r = 0; r < d.X.rows(); ++r) os << ",x" << r;
  os << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < d.size(); ++i) {
    os << (i < d.t.size() ? d.t[i] : 0.0) << ',' << d.labels[i] << ',' << (i < d.q.size() ? d.q[i] : 0);
    for (Eigen::Index r = 0; r < d.X.rows(); ++r) os << ',' << d.X(r, static_cast<Eigen::Index>(i));
    os << "\n";
  }
}

Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  Dataset d;
  if (!std::getline(is, line) || line.rfind("# qrc-dataset v1", 0) != 0)
    throw std::runtime_error("dataset CSV: missing version header");
  const auto pos = line.find("classes=");
  if (pos == std::string::npos) throw std::runtime_error("dataset CSV: missing class count");
  d.n_classes = std::stoi(line.substr(pos + 8));
  if (!std::getline(is, line)) throw std::runtime_error("dataset CSV: missing column header");
  const std::size_t D = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) - 2;
  std::vector<std::vector<double>> cols;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != D + 3) throw std::runtime_error("dataset CSV: bad row width");
    d.t.push_back(v[0]);
    d.labels.push_back(static_cast<int>(v[1]));
    d.q.push_back(static_cast<int>(v[2]));
    cols.emplace_back(v.begin() + 3, v.end());
  }
  d.X.resize(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t r = 0; r < D; ++r) d.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = cols[j][r];
  return d;
}

std::string layer_to_json(const OutputLayer& layer, const std::string& metadata_json) {
  nlohmann::json j;
  j["format"] = "qrc-layer";
  j["version"] = 1;
  j["kind"] = layer.kind;
  std::vector<std::vector<double>> W(static_cast<std::size_t>(layer.W.rows()));
  for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
    for (Eigen::Index c = 0; c < layer.W.cols(); ++c) W[static_cast<std::size_t>(r)].push_back(layer.W(r, c));
  j["W"] = W;
  j["b"] = std::vector<double>(layer.b.data(), layer.b.data() + layer.b.size());
  j["phi"] = layer.phi;
  j["converged"] = layer.converged;
  j["iterations"] = layer.iterations;
  j["loss"] = layer.loss;
  j["train_accuracy"] = layer.train_accuracy;
  j["metadata"] = nlohmann::json::parse(metadata_json);
  return j.dump(2);
}

OutputLayer layer_from_json(const std::string& s) {
  const nlohmann::json j = nlohmann::json::parse(s);
  if (j.value("format", "") != "qrc-layer") throw std::runtime_error("layer JSON: wrong format tag");
  OutputLayer l;
  const auto W = j.at("W").get<std::vector<std::vector<double>>>();
  const auto b = j.at("b").get<std::vector<double>>();
  const Eigen::Index C = static_cast<Eigen::Index>(W.size());
  const Eigen::Index D = C > 0 ? static_cast<Eigen::Index>(W[0].size()) : 0;
  l.W.resize(C, D);
  for (Eigen::Index r = 0; r < C; ++r) {
    if (static_cast<Eigen::Index>(W[static_cast<std::size_t>(r)].size()) != D)
      throw std::runtime_error("layer JSON: ragged W");
    for (Eigen::Index c = 0; c < D; ++c) l.W(r, c) = W[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  if (static_cast<Eigen::Index>(b.size()) != C) throw std::runtime_error("layer JSON: b size mismatch");
  l.b = Eigen::Map<const RVec>(b.data(), C);
  l.phi = j.value("phi", std::vector<double>{});
  l.kind = j.value("kind", "trained");
  l.converged = j.value("converged", false);
  l.iterations = j.value("iterations", 0);
  l.loss = j.value("loss", 0.0);
  l.train_accuracy = j.value("train_accuracy", 0.0);
  return l;
}

}  // namespace qrc
