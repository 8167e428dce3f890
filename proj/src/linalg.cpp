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

#include "semiglobal/linalg.hpp"

#include <Eigen/SVD>

namespace semiglobal {

int numerical_rank(const Matrix &a, double relative_cutoff) {
    if (a.size() == 0) {
        return 0;
    }
    Eigen::BDCSVD<Matrix> svd(a);
    const auto &s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    const double cutoff = relative_cutoff * s(0);
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > cutoff) {
            ++rank;
        }
    }
    return rank;
}

Matrix pseudo_inverse(const Matrix &a, double relative_cutoff) {
    Matrix result = Matrix::Zero(a.cols(), a.rows());
    if (a.size() == 0) {
        return result;
    }
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    if (s(0) == 0.0) {
        return result;
    }
    const double cutoff = relative_cutoff * s(0);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > cutoff) {
            result.noalias() += (svd.matrixV().col(k) / s(k)) * svd.matrixU().col(k).transpose();
        }
    }
    return result;
}

Matrix null_space(const Matrix &a, double absolute_cutoff) {
    const Eigen::Index n = a.cols();
    if (a.rows() == 0) {
        return Matrix::Identity(n, n);
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const auto &s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > absolute_cutoff) {
            ++rank;
        }
    }
    return svd.matrixV().rightCols(n - rank);
}

double max_asymmetry(const Matrix &a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace semiglobal
