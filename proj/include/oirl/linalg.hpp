// Copyright 2026 The OnlineIRL Authors
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


#ifndef OIRL_LINALG_HPP_
#define OIRL_LINALG_HPP_

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace oirl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest eigenvalue of a symmetric matrix. Returns 0 for an empty matrix.
inline double min_eigenvalue(const Mat& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double max_eigenvalue(const Mat& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(sym.rows() - 1);
}

// Spectral condition number of a symmetric positive semidefinite matrix.
// Singular or indefinite input yields +inf.
inline double spd_condition_number(const Mat& sym) {
  if (sym.size() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(sym.rows() - 1);
  if (!(lo > 0.0) || !std::isfinite(hi)) return kInf;
  return hi / lo;
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace oirl

#endif  // OIRL_LINALG_HPP_
