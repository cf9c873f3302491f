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

#ifndef DONAS_METRICS_H_
#define DONAS_METRICS_H_

#include <vector>

#include "donas/common.h"
#include "donas/diffnet.h"

namespace donas::metrics {

struct CkaResult {
  double value = 0.0;
  // Set when either centered input has zero variance; value is then 0.
  bool degenerate = false;
};

// ||Y^T X||_F^2 / (||X^T X||_F ||Y^T Y||_F) on column-centered inputs.
// Throws ContractError if the row counts differ.
CkaResult LinearCka(const Matrix& x, const Matrix& y);

// Post-activation output of every layer on `probe`.
std::vector<Matrix> LayerActivations(const nn::Network& net, const Matrix& probe);

struct CkaReport {
  std::vector<Matrix> within;  // per network, layer x layer
  // Layer x layer CKA averaged over ordered pairs of distinct networks;
  // its diagonal is the per-layer cross-network similarity.
  Matrix cross_mean;
};

// Networks may differ in depth; the cross grid uses the shortest depth.
CkaReport CkaHeatmap(const std::vector<nn::Network>& nets, const Matrix& probe);

// Layer x layer grid between two networks.
Matrix CkaGrid(const nn::Network& a, const nn::Network& b, const Matrix& probe);

struct Moments2d {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

// Sample mean and unbiased covariance; requires >= 3 two-column rows.
Moments2d FitMoments(const Matrix& samples);

// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}) with the closed-form
// 2x2 trace of the square root. A singular covariance gets 1e-9 I added.
double Frechet2d(const Moments2d& a, const Moments2d& b);
double Frechet2d(const Matrix& a, const Matrix& b);

struct ModeCoverageResult {
  int covered = 0;
  std::vector<int> counts;  // samples assigned within 3 sigma, per center
  int high_quality = 0;     // samples within 3 sigma of their nearest center
};

// Nearest-center assignment (lowest index on ties); a mode is covered when
// at least min_frac of all samples land within 3 sigma_mode of it.
ModeCoverageResult ModeCoverageDetail(const Matrix& samples, const Matrix& centers,
                                      double sigma_mode, double min_frac);
int ModeCoverage(const Matrix& samples, const Matrix& centers, double sigma_mode,
                 double min_frac);

}  // namespace donas::metrics

#endif  // DONAS_METRICS_H_
