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

#include "semiglobal/crystal.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <string>

#include "semiglobal/errors.hpp"

namespace semiglobal {

namespace {

constexpr int kNewtonIterationCap = 200;
constexpr double kGradientTolerance = 1e-10;
constexpr double kOrthonormalityTolerance = 1e-10;

double chain_potential(const Vector &u) {
    double v = 0.5 * u.squaredNorm();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        for (Eigen::Index j = i + 1; j < u.size(); ++j) {
            v += 1.0 / std::abs(u(i) - u(j));
        }
    }
    return v;
}

bool strictly_increasing(const Vector &u) {
    for (Eigen::Index i = 1; i < u.size(); ++i) {
        if (!(u(i) > u(i - 1))) {
            return false;
        }
    }
    return true;
}

}  // namespace

void TrapConfig::validate() const {
    if (num_ions < 2) {
        throw ValidationError("num_ions must be >= 2, got " + std::to_string(num_ions));
    }
    if (!(axial_frequency > 0.0) || !std::isfinite(axial_frequency)) {
        throw ValidationError("axial_frequency must be positive");
    }
    if (!(lamb_dicke_scale > 0.0) || !std::isfinite(lamb_dicke_scale)) {
        throw ValidationError("lamb_dicke_scale must be positive");
    }
}

void IonCrystal::validate() const {
    const Eigen::Index n = positions.size();
    if (n < 2) {
        throw ValidationError("a crystal needs at least 2 ions, got " + std::to_string(n));
    }
    if (mode_freqs.size() != n || lamb_dicke.size() != n || mode_vectors.rows() != n || mode_vectors.cols() != n) {
        throw ValidationError("inconsistent crystal dimensions");
    }
    if (!positions.allFinite() || !mode_freqs.allFinite() || !mode_vectors.allFinite() || !lamb_dicke.allFinite()) {
        throw ValidationError("crystal contains non-finite values");
    }
    if (!strictly_increasing(positions)) {
        throw ValidationError("positions must be strictly increasing");
    }
    if (!(mode_freqs.minCoeff() > 0.0)) {
        throw ValidationError("mode frequencies must be positive");
    }
    if (!strictly_increasing(mode_freqs)) {
        throw ValidationError("mode frequencies must be sorted ascending");
    }
    if (!(lamb_dicke.minCoeff() > 0.0)) {
        throw ValidationError("Lamb-Dicke parameters must be positive");
    }
    const Matrix gram = mode_vectors.transpose() * mode_vectors;
    double worst = 0.0;
    Eigen::Index worst_a = 0;
    Eigen::Index worst_b = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a; b < n; ++b) {
            const double dev = std::abs(gram(a, b) - (a == b ? 1.0 : 0.0));
            if (dev > worst) {
                worst = dev;
                worst_a = a;
                worst_b = b;
            }
        }
    }
    if (worst > kOrthonormalityTolerance) {
        std::ostringstream msg;
        msg.precision(3);
        msg << "mode vectors are not orthonormal: columns (" << worst_a << ", " << worst_b << ") have inner product "
            << gram(worst_a, worst_b);
        throw ValidationError(msg.str());
    }
}

Vector chain_potential_gradient(const Vector &u) {
    Vector g = u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        for (Eigen::Index j = 0; j < u.size(); ++j) {
            if (i == j) {
                continue;
            }
            const double d = u(i) - u(j);
            g(i) -= (d > 0 ? 1.0 : -1.0) / (d * d);
        }
    }
    return g;
}

Matrix chain_potential_hessian(const Vector &u) {
    const Eigen::Index n = u.size();
    Matrix h = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double d = std::abs(u(i) - u(j));
            const double c = 2.0 / (d * d * d);
            h(i, j) = -c;
            h(i, i) += c;
        }
    }
    return h;
}

Vector compute_equilibrium_positions(const TrapConfig &config) {
    config.validate();
    const int n = config.num_ions;

    // Uniform chain with the asymptotic central spacing 2.018 / N^0.559.
    const double spacing = 2.018 / std::pow(static_cast<double>(n), 0.559);
    Vector u(n);
    for (int i = 0; i < n; ++i) {
        u(i) = spacing * (i - 0.5 * (n - 1));
    }

    Vector g = chain_potential_gradient(u);
    for (int iter = 0; iter < kNewtonIterationCap && g.norm() > 1e-14; ++iter) {
        const Vector step = chain_potential_hessian(u).llt().solve(g);
        const double v0 = chain_potential(u);
        double t = 1.0;
        Vector trial = u - step;
        // The potential is convex on the ordered region; backtrack to stay inside it.
        while (t > 1e-12 && (!strictly_increasing(trial) || chain_potential(trial) > v0 + 1e-14 * std::abs(v0))) {
            t *= 0.5;
            trial = u - t * step;
        }
        u = trial;
        const Vector g_new = chain_potential_gradient(u);
        if (t <= 1e-12 || g_new.norm() >= g.norm() * (1.0 - 1e-15)) {
            g = g_new;
            break;
        }
        g = g_new;
    }
    if (!(g.norm() <= kGradientTolerance)) {
        throw SolverError("equilibrium solve did not converge", g.norm());
    }
    return u;
}

IonCrystal compute_normal_modes(const TrapConfig &config, const Vector &positions) {
    config.validate();
    if (positions.size() != config.num_ions) {
        throw ValidationError("positions do not match num_ions");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(chain_potential_hessian(positions));
    if (eig.info() != Eigen::Success) {
        throw ValidationError("Hessian eigendecomposition failed");
    }
    const Vector &values = eig.eigenvalues();
    if (!(values.minCoeff() > 0.0)) {
        throw ValidationError("Hessian is not positive definite; positions are not a stable equilibrium");
    }

    IonCrystal crystal;
    crystal.positions = positions;
    crystal.mode_freqs = config.axial_frequency * values.cwiseSqrt();
    crystal.mode_vectors = eig.eigenvectors();
    const Eigen::Index n = positions.size();
    for (Eigen::Index j = 0; j < n; ++j) {
        // Sign convention: first non-negligible participation is positive.
        auto col = crystal.mode_vectors.col(j);
        for (Eigen::Index k = 0; k < n; ++k) {
            if (std::abs(col(k)) > 1e-8) {
                if (col(k) < 0) {
                    col *= -1.0;
                }
                break;
            }
        }
    }
    crystal.lamb_dicke = config.lamb_dicke_scale * (crystal.mode_freqs / config.axial_frequency).cwiseSqrt().cwiseInverse();
    crystal.validate();
    return crystal;
}

IonCrystal make_crystal(const TrapConfig &config) {
    return compute_normal_modes(config, compute_equilibrium_positions(config));
}

ModeMatrixSet mode_matrices(const IonCrystal &crystal) {
    const int n = crystal.size();
    ModeMatrixSet set;
    set.matrices.reserve(n);
    Matrix offdiag(n * (n - 1) / 2, n);
    for (int j = 0; j < n; ++j) {
        const Vector o = crystal.mode_vectors.col(j);
        set.matrices.push_back(o * o.transpose());
        int row = 0;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                offdiag(row++, j) = o(a) * o(b);
            }
        }
    }
    set.offdiag_rank = numerical_rank(offdiag);
    return set;
}

IonCrystal load_crystal(Vector positions, Vector mode_freqs, Matrix mode_vectors, Vector lamb_dicke) {
    IonCrystal crystal{std::move(positions), std::move(mode_freqs), std::move(mode_vectors), std::move(lamb_dicke)};
    crystal.validate();
    return crystal;
}

}  // namespace semiglobal
