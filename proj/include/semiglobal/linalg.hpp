// Copyright 2026 The semiglobal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMIGLOBAL_LINALG_HPP
#define SEMIGLOBAL_LINALG_HPP

#include <Eigen/Dense>

namespace semiglobal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Singular values below this fraction of the largest one are treated as zero.
inline constexpr double kRelativeRankCutoff = 1e-10;

/// Numerical rank with the library-wide relative singular-value cutoff.
int numerical_rank(const Matrix &a, double relative_cutoff = kRelativeRankCutoff);

/// Moore-Penrose pseudo-inverse using the same cutoff as numerical_rank.
Matrix pseudo_inverse(const Matrix &a, double relative_cutoff = kRelativeRankCutoff);

/// Orthonormal basis (columns) of the null space of `a`; `absolute_cutoff` is applied to singular values.
Matrix null_space(const Matrix &a, double absolute_cutoff);

/// Largest |a_ij - a_ji|.
double max_asymmetry(const Matrix &a);

}  // namespace semiglobal

#endif
