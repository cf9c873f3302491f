// Copyright 2026 The DONAS Authors.
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

#include "donas/metrics.h"

#include <algorithm>
#include <cmath>

namespace donas::metrics {
namespace {

Matrix Center(const Matrix& x) { return x.rowwise() - x.colwise().mean(); }

Eigen::Matrix2d Regularize(const Eigen::Matrix2d& cov) {
  if (cov.determinant() > 0.0) return cov;
  return cov + 1e-9 * Eigen::Matrix2d::Identity();
}

}  // namespace

CkaResult LinearCka(const Matrix& x, const Matrix& y) {
  DONAS_REQUIRE(x.rows() == y.rows(), "LinearCka: example counts differ");
  DONAS_REQUIRE(x.rows() >= 2, "LinearCka: need at least two examples");
  if (!x.allFinite() || !y.allFinite()) throw InputError("LinearCka: non-finite activations");
  const Matrix xc = Center(x);
  const Matrix yc = Center(y);
  const double xx = (xc.transpose() * xc).norm();
  const double yy = (yc.transpose() * yc).norm();
  if (xx == 0.0 || yy == 0.0) return {0.0, true};
  const double xy = (yc.transpose() * xc).squaredNorm();
  return {xy / (xx * yy), false};
}

std::vector<Matrix> LayerActivations(const nn::Network& net, const Matrix& probe) {
  return net.Trace(probe).post;
}

Matrix CkaGrid(const nn::Network& a, const nn::Network& b, const Matrix& probe) {
  const std::vector<Matrix> fa = LayerActivations(a, probe);
  const std::vector<Matrix> fb = LayerActivations(b, probe);
  Matrix g(fa.size(), fb.size());
  for (size_t i = 0; i < fa.size(); ++i)
    for (size_t j = 0; j < fb.size(); ++j) g(i, j) = LinearCka(fa[i], fb[j]).value;
  return g;
}

CkaReport CkaHeatmap(const std::vector<nn::Network>& nets, const Matrix& probe) {
  DONAS_REQUIRE(probe.rows() >= 2, "CkaHeatmap: probe set needs at least two rows");
  CkaReport report;
  std::vector<std::vector<Matrix>> acts;
  int depth = nets.empty() ? 0 : nets.front().num_layers();
  for (const nn::Network& n : nets) {
    acts.push_back(LayerActivations(n, probe));
    depth = std::min(depth, n.num_layers());
  }
  for (const auto& a : acts) {
    Matrix g(a.size(), a.size());
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < a.size(); ++j) g(i, j) = LinearCka(a[i], a[j]).value;
    report.within.push_back(std::move(g));
  }
  report.cross_mean = Matrix::Zero(depth, depth);
  int pairs = 0;
  for (size_t p = 0; p < acts.size(); ++p) {
    for (size_t q = 0; q < acts.size(); ++q) {
      if (p == q) continue;
      for (int i = 0; i < depth; ++i)
        for (int j = 0; j < depth; ++j)
          report.cross_mean(i, j) += LinearCka(acts[p][i], acts[q][j]).value;
      ++pairs;
    }
  }
  if (pairs > 0) report.cross_mean /= pairs;
  return report;
}

Moments2d FitMoments(const Matrix& samples) {
  DONAS_REQUIRE(samples.cols() == 2, "FitMoments: samples must be two-dimensional");
  DONAS_REQUIRE(samples.rows() >= 3, "FitMoments: need at least three samples");
  if (!samples.allFinite()) throw InputError("FitMoments: non-finite samples");
  Moments2d m;
  m.mean = samples.colwise().mean().transpose();
  const Matrix c = Center(samples);
  m.cov = (c.transpose() * c) / static_cast<double>(samples.rows() - 1);
  return m;
}

double Frechet2d(const Moments2d& a, const Moments2d& b) {
  const Eigen::Matrix2d sa = Regularize(a.cov);
  const Eigen::Matrix2d sb = Regularize(b.cov);
  const Eigen::Matrix2d m = sa * sb;
  // M is similar to a PSD matrix, so its eigenvalues l1, l2 are >= 0 and
  // Tr sqrt(M) = sqrt(l1) + sqrt(l2) = sqrt(tr M + 2 sqrt(det M)).
  const double det = std::max(0.0, m.determinant());
  const double tr_sqrt = std::sqrt(std::max(0.0, m.trace() + 2.0 * std::sqrt(det)));
  const double d = (a.mean - b.mean).squaredNorm() + sa.trace() + sb.trace() - 2.0 * tr_sqrt;
  return std::max(0.0, d);
}

double Frechet2d(const Matrix& a, const Matrix& b) {
  return Frechet2d(FitMoments(a), FitMoments(b));
}

ModeCoverageResult ModeCoverageDetail(const Matrix& samples, const Matrix& centers,
                                      double sigma_mode, double min_frac) {
  DONAS_REQUIRE(centers.rows() >= 1, "ModeCoverage: no centers");
  DONAS_REQUIRE(samples.cols() == centers.cols(), "ModeCoverage: dimension mismatch");
  ModeCoverageResult r;
  r.counts.assign(centers.rows(), 0);
  const double radius = 3.0 * sigma_mode;
  for (int i = 0; i < samples.rows(); ++i) {
    int best = 0;
    double best_d = (samples.row(i) - centers.row(0)).squaredNorm();
    for (int k = 1; k < centers.rows(); ++k) {
      const double d = (samples.row(i) - centers.row(k)).squaredNorm();
      if (d < best_d) {
        best = k;
        best_d = d;
      }
    }
    if (std::sqrt(best_d) <= radius) {
      ++r.counts[best];
      ++r.high_quality;
    }
  }
  const double need = min_frac * static_cast<double>(samples.rows());
  for (int c : r.counts)
    if (samples.rows() > 0 && c > 0 && c >= need) ++r.covered;
  return r;
}

int ModeCoverage(const Matrix& samples, const Matrix& centers, double sigma_mode,
                 double min_frac) {
  return ModeCoverageDetail(samples, centers, sigma_mode, min_frac).covered;
}

}  // namespace donas::metrics
