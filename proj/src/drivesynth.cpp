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

#include "semiglobal/drivesynth.hpp"

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "semiglobal/errors.hpp"

namespace semiglobal {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

// Moments J_k(x) = int_0^1 s^k exp(i x s) ds for k = 0..4.
std::array<Complex, 5> unit_moments(double x) {
    std::array<Complex, 5> j{};
    if (std::abs(x) < 2.0) {
        for (int k = 0; k < 5; ++k) {
            Complex term = 1.0;
            Complex total = 0.0;
            for (int m = 0; m < 60; ++m) {
                const Complex add = term / static_cast<double>(m + k + 1);
                total += add;
                if (std::abs(add) < 1e-18 * std::abs(total)) {
                    break;
                }
                term *= kI * x / static_cast<double>(m + 1);
            }
            j[k] = total;
        }
        return j;
    }
    const Complex e = std::exp(kI * x);
    const double half = 0.5 * x;
    j[0] = std::exp(kI * half) * (std::sin(half) / half);
    for (int k = 1; k < 5; ++k) {
        j[k] = (e - static_cast<double>(k) * j[k - 1]) / (kI * x);
    }
    return j;
}

Complex unit_exp_integral(double x) {
    if (std::abs(x) < 1e-8) {
        return 1.0 + kI * x / 2.0;
    }
    const double half = 0.5 * x;
    return std::exp(kI * half) * (std::sin(half) / half);
}

// int_0^1 ds exp(i x s) int_0^s ds' exp(i y s').
Complex unit_double_integral(double x, double y) {
    if (std::abs(y) > 1e-4) {
        return (unit_exp_integral(x + y) - unit_exp_integral(x)) / (kI * y);
    }
    const auto j = unit_moments(x);
    Complex total = 0.0;
    Complex coeff = 1.0;
    double factorial = 1.0;
    for (int k = 0; k < 4; ++k) {
        factorial *= static_cast<double>(k + 1);
        total += coeff / factorial * j[k + 1];
        coeff *= kI * y;
    }
    return total;
}

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

// ---- grid and kernel ----

void FrequencyGrid::validate() const {
    if (!(gate_time > 0.0) || !std::isfinite(gate_time)) {
        throw ValidationError("gate_time must be positive");
    }
    if (tones.empty()) {
        throw ValidationError("frequency grid has no tones");
    }
    for (double w : tones) {
        if (!std::isfinite(w)) {
            throw ValidationError("frequency grid contains a non-finite tone");
        }
    }
}

FrequencyGrid make_frequency_grid(const IonCrystal &crystal, int num_tones, double margin_fraction) {
    crystal.validate();
    const int n = crystal.size();
    const int m = num_tones > 0 ? num_tones : 4 * n + 4;
    if (m < 2 * n + 1) {
        throw ValidationError("num_tones must exceed 2N so the closure nullspace is nonempty");
    }
    if (!(margin_fraction > 0.0) || !std::isfinite(margin_fraction)) {
        throw ValidationError("margin_fraction must be positive");
    }
    const double width = crystal.mode_freqs.maxCoeff() - crystal.mode_freqs.minCoeff();
    const double lo = crystal.mode_freqs.minCoeff() - margin_fraction * width;
    const double spacing = (1.0 + 2.0 * margin_fraction) * width / static_cast<double>(m);
    FrequencyGrid grid;
    grid.gate_time = 2.0 * std::numbers::pi / spacing;
    grid.tones.resize(m);
    for (int k = 0; k < m; ++k) {
        grid.tones[k] = lo + (k + 0.5) * spacing;
    }
    return grid;
}

PhaseKernel build_phase_kernel(const IonCrystal &crystal, const FrequencyGrid &grid) {
    crystal.validate();
    grid.validate();
    const int n = crystal.size();
    const int m = grid.size();
    const double t = grid.gate_time;
    for (int p = 0; p < m; ++p) {
        for (int j = 0; j < n; ++j) {
            if (std::abs(grid.tones[p] - crystal.mode_freqs(j)) < kToneCollisionTolerance) {
                throw SingularKernelError(p, j);
            }
        }
    }

    PhaseKernel out;
    out.kernel.resize(n);
    out.displacement.resize(n);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        const double nu = crystal.mode_freqs(j);
        Matrix g(m, m);
        for (int p = 0; p < m; ++p) {
            for (int q = 0; q < m; ++q) {
                const double a = grid.tones[p];
                const double b = grid.tones[q];
                Complex sum = 0.0;
                for (double sa : {1.0, -1.0}) {
                    for (double sb : {1.0, -1.0}) {
                        sum += unit_double_integral((nu + sa * a) * t, (-nu + sb * b) * t);
                    }
                }
                g(p, q) = 0.25 * t * t * sum.imag();
            }
        }
        out.kernel[j] = 0.5 * (g + g.transpose());
        ComplexVector d(m);
        for (int p = 0; p < m; ++p) {
            const double w = grid.tones[p];
            d(p) = 0.5 * t * (unit_exp_integral((nu + w) * t) + unit_exp_integral((nu - w) * t));
        }
        out.displacement[j] = std::move(d);
    }
    return out;
}

namespace {

constexpr double kParticipationFloor = 1e-14;

bool couples(const IonCrystal &crystal, const std::vector<int> &ions, int mode) {
    for (int ion : ions) {
        if (std::abs(crystal.mode_vectors(ion, mode)) > kParticipationFloor) {
            return true;
        }
    }
    return false;
}

}  // namespace

DisplacementNullspace displacement_nullspace(const PhaseKernel &kernel, const IonCrystal &crystal,
                                             const BeamPartition &partition) {
    const int n = crystal.size();
    if (partition.size() != n || static_cast<int>(kernel.displacement.size()) != n) {
        throw ValidationError("kernel, crystal and partition disagree on the ion count");
    }
    const auto m = kernel.displacement.front().size();
    DisplacementNullspace out;
    for (int b = 0; b < partition.beams(); ++b) {
        const auto ions = partition.ions_in(b);
        std::vector<int> modes;
        for (int j = 0; j < n; ++j) {
            if (couples(crystal, ions, j)) {
                modes.push_back(j);
            }
        }
        Matrix c(2 * static_cast<Eigen::Index>(modes.size()), m);
        double scale = 0.0;
        for (size_t r = 0; r < modes.size(); ++r) {
            c.row(2 * r) = kernel.displacement[modes[r]].real().transpose();
            c.row(2 * r + 1) = kernel.displacement[modes[r]].imag().transpose();
        }
        for (const auto &d : kernel.displacement) {
            scale = std::max(scale, d.cwiseAbs().maxCoeff());
        }
        Matrix basis = null_space(c, 1e-12 * std::max(scale, 1.0));
        if (basis.cols() == 0) {
            throw InfeasibleGridError("beam " + std::to_string(b) +
                                      " has no amplitudes with closed motional loops; increase the tone count");
        }
        for (Eigen::Index col = 0; col < basis.cols(); ++col) {
            for (int j = 0; j < n; ++j) {
                const double d = std::abs(kernel.displacement[j].dot(basis.col(col).cast<Complex>()));
                double weight = 0.0;
                for (int ion : ions) {
                    weight += crystal.lamb_dicke(j) * std::abs(crystal.mode_vectors(ion, j));
                }
                out.max_residual = std::max(out.max_residual, weight * d);
            }
        }
        out.bases.push_back(std::move(basis));
    }
    return out;
}

// ---- closed-form evaluation of a drive ----

namespace {

void require_zero_phases(const DriveSolution &drive) {
    if (drive.phases.size() > 0 && drive.phases.cwiseAbs().maxCoeff() != 0.0) {
        throw ValidationError("closed-form kernels assume zero tone phases");
    }
}

}  // namespace

Matrix kernel_phases(const DriveSolution &drive, const IonCrystal &crystal, const PhaseKernel &kernel) {
    require_zero_phases(drive);
    const int n = crystal.size();
    Matrix phi = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const double eta2 = crystal.lamb_dicke(j) * crystal.lamb_dicke(j);
        const Matrix h = drive.amplitudes * kernel.kernel[j] * drive.amplitudes.transpose();
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const int ba = drive.partition.beam_of(a);
                const int bb = drive.partition.beam_of(b);
                phi(a, b) += eta2 * crystal.mode_vectors(a, j) * crystal.mode_vectors(b, j) * h(ba, bb);
            }
        }
    }
    phi.triangularView<Eigen::StrictlyLower>() = phi.transpose().triangularView<Eigen::StrictlyLower>();
    return phi;
}

Vector kernel_displacements(const DriveSolution &drive, const IonCrystal &crystal, const PhaseKernel &kernel) {
    require_zero_phases(drive);
    const int n = crystal.size();
    Vector out = Vector::Zero(n);
    for (int j = 0; j < n; ++j) {
        const ComplexVector beam_d = drive.amplitudes.cast<Complex>() * kernel.displacement[j];
        for (int ion = 0; ion < n; ++ion) {
            out(j) += std::abs(crystal.lamb_dicke(j) * crystal.mode_vectors(ion, j) * beam_d(drive.partition.beam_of(ion)));
        }
    }
    return out;
}

// ---- synthesis ----

namespace {

struct BlockConstraint {
    int beam_a = 0;
    int beam_b = 0;
    /// Reduced coupling map: constraint = w * g - target.
    Matrix w;
    Vector target;
    /// eta_j^2 Z_a^T K^j Z_b per mode.
    std::vector<Matrix> q;
};

/// Quadratic pair-phase constraints in nullspace coordinates.
class ConstraintSystem {
   public:
    ConstraintSystem(const Matrix &phi, const IonCrystal &crystal, const PhaseKernel &kernel,
                     const BeamPartition &partition, const DisplacementNullspace &nullspace)
        : nullspace_(nullspace) {
        const int n = crystal.size();
        offsets_.push_back(0);
        for (const auto &z : nullspace.bases) {
            offsets_.push_back(offsets_.back() + static_cast<int>(z.cols()));
        }
        const double phi_scale = max_abs(phi);
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                pairs.emplace_back(a, b);
            }
        }
        for (const auto &block : partition.blocks()) {
            Matrix e(block.pairs.size(), n);
            Vector target(block.pairs.size());
            for (size_t row = 0; row < block.pairs.size(); ++row) {
                const auto [a, b] = pairs[block.pairs[row]];
                for (int j = 0; j < n; ++j) {
                    e(row, j) = crystal.mode_vectors(a, j) * crystal.mode_vectors(b, j);
                }
                target(row) = phi(a, b);
            }
            Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeThinU);
            const auto &sv = svd.singularValues();
            int rank = 0;
            while (rank < sv.size() && sv(rank) > kRelativeRankCutoff * sv(0)) {
                ++rank;
            }
            const Matrix u = svd.matrixU().leftCols(rank);
            BlockConstraint c;
            c.beam_a = block.beam_a;
            c.beam_b = block.beam_b;
            c.w = u.transpose() * e;
            c.target = u.transpose() * target;
            const double leftover = (target - u * c.target).cwiseAbs().maxCoeff();
            if (leftover > kDecompositionTolerance * std::max(phi_scale, 1e-300)) {
                throw ValidationError("layer coupling on block (" + std::to_string(block.beam_a) + ", " +
                                      std::to_string(block.beam_b) + ") is not reachable through the mode couplings");
            }
            const Matrix &za = nullspace.bases[block.beam_a];
            const Matrix &zb = nullspace.bases[block.beam_b];
            for (int j = 0; j < n; ++j) {
                const double eta2 = crystal.lamb_dicke(j) * crystal.lamb_dicke(j);
                c.q.push_back(eta2 * za.transpose() * kernel.kernel[j] * zb);
            }
            num_constraints_ += rank;
            blocks_.push_back(std::move(c));
        }
    }

    int num_variables() const { return offsets_.back(); }
    int num_constraints() const { return num_constraints_; }

    Vector residual(const Vector &x) const {
        Vector c(num_constraints_);
        int row = 0;
        for (const auto &block : blocks_) {
            const auto xa = segment(x, block.beam_a);
            const auto xb = segment(x, block.beam_b);
            Vector g(block.q.size());
            for (size_t j = 0; j < block.q.size(); ++j) {
                g(j) = xa.dot(block.q[j] * xb);
            }
            const auto rows = block.w.rows();
            c.segment(row, rows) = block.w * g - block.target;
            row += static_cast<int>(rows);
        }
        return c;
    }

    Matrix jacobian(const Vector &x) const {
        Matrix jac = Matrix::Zero(num_constraints_, num_variables());
        int row = 0;
        for (const auto &block : blocks_) {
            const auto xa = segment(x, block.beam_a);
            const auto xb = segment(x, block.beam_b);
            const auto rows = block.w.rows();
            const int oa = offsets_[block.beam_a];
            const int ob = offsets_[block.beam_b];
            for (size_t j = 0; j < block.q.size(); ++j) {
                const Vector ga = block.q[j] * xb;
                const Vector gb = block.q[j].transpose() * xa;
                jac.block(row, oa, rows, ga.size()) += block.w.col(j) * ga.transpose();
                jac.block(row, ob, rows, gb.size()) += block.w.col(j) * gb.transpose();
            }
            row += static_cast<int>(rows);
        }
        return jac;
    }

    /// Stacked beam amplitudes r_b = Z_b x_b.
    Matrix amplitudes(const Vector &x, int num_tones) const {
        Matrix r(nullspace_.bases.size(), num_tones);
        for (size_t b = 0; b < nullspace_.bases.size(); ++b) {
            r.row(b) = (nullspace_.bases[b] * segment(x, static_cast<int>(b))).transpose();
        }
        return r;
    }

   private:
    Eigen::VectorBlock<const Vector> segment(const Vector &x, int beam) const {
        return x.segment(offsets_[beam], offsets_[beam + 1] - offsets_[beam]);
    }

    const DisplacementNullspace &nullspace_;
    std::vector<int> offsets_;
    std::vector<BlockConstraint> blocks_;
    int num_constraints_ = 0;
};

class AugmentedLagrangian final : public ceres::FirstOrderFunction {
   public:
    AugmentedLagrangian(const ConstraintSystem &system, const Vector &multipliers, double penalty)
        : system_(system), multipliers_(multipliers), penalty_(penalty) {}

    bool Evaluate(const double *parameters, double *cost, double *gradient) const override {
        const Eigen::Map<const Vector> xm(parameters, system_.num_variables());
        const Vector x = xm;
        const Vector c = system_.residual(x);
        *cost = 0.5 * x.squaredNorm() + multipliers_.dot(c) + 0.5 * penalty_ * c.squaredNorm();
        if (gradient != nullptr) {
            Eigen::Map<Vector> g(gradient, system_.num_variables());
            g = x + system_.jacobian(x).transpose() * (multipliers_ + penalty_ * c);
        }
        return std::isfinite(*cost);
    }

    int NumParameters() const override { return system_.num_variables(); }

   private:
    const ConstraintSystem &system_;
    Vector multipliers_;
    double penalty_;
};

/// Damped Gauss-Newton on c(x) = 0 with minimum-norm steps.
void gauss_newton(const ConstraintSystem &system, Vector &x, int max_iterations) {
    Vector c = system.residual(x);
    double current = c.squaredNorm();
    for (int it = 0; it < max_iterations && c.cwiseAbs().maxCoeff() > 1e-14; ++it) {
        const Vector step = Eigen::CompleteOrthogonalDecomposition<Matrix>(system.jacobian(x)).solve(c);
        double t = 1.0;
        bool moved = false;
        while (t > 1e-8) {
            const Vector trial = x - t * step;
            if (trial.allFinite()) {
                const Vector ct = system.residual(trial);
                if (ct.squaredNorm() < current) {
                    x = trial;
                    c = ct;
                    current = ct.squaredNorm();
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!moved) {
            break;
        }
    }
}

struct RestartResult {
    Vector x;
    double residual = std::numeric_limits<double>::infinity();
};

/// Reduced-constraint violation below which a polished iterate counts as feasible.
constexpr double kFeasible = 1e-11;

RestartResult run_restart(const ConstraintSystem &system, uint64_t seed, const SynthesisOptions &options) {
    const int nv = system.num_variables();
    Rng rng(seed);
    Vector x(nv);
    for (int k = 0; k < nv; ++k) {
        x(k) = rng.normal();
    }
    // Quadratic constraints: rescale so the initial couplings match the target magnitude.
    const Vector t = -system.residual(Vector::Zero(nv));
    const double reached = (system.residual(x) + t).cwiseAbs().maxCoeff();
    if (reached > 0.0) {
        x *= std::sqrt(std::max(t.cwiseAbs().maxCoeff(), 1e-3) / reached);
    }

    RestartResult best;
    // Every iterate is polished onto the constraint set; the lowest-power feasible one is kept.
    auto offer = [&](const Vector &candidate, int polish) {
        Vector y = candidate;
        gauss_newton(system, y, polish);
        const double violation = system.residual(y).cwiseAbs().maxCoeff();
        const bool feasible = violation <= kFeasible;
        const bool best_feasible = best.residual <= kFeasible;
        if ((feasible && (!best_feasible || y.squaredNorm() < best.x.squaredNorm())) ||
            (!feasible && !best_feasible && violation < best.residual)) {
            best.x = y;
            best.residual = violation;
        }
    };

    gauss_newton(system, x, 200);
    offer(x, 0);
    // KKT estimate of the multipliers at the feasible start: x + J^T lambda = 0.
    Vector lambda = -Eigen::CompleteOrthogonalDecomposition<Matrix>(system.jacobian(x).transpose()).solve(x);
    double penalty = 10.0;
    double previous = std::numeric_limits<double>::infinity();
    int budget = options.max_iterations;
    for (int round = 0; round < 60 && budget > 0; ++round) {
        ceres::GradientProblemSolver::Options opts;
        opts.line_search_direction_type = ceres::LBFGS;
        opts.max_num_iterations = budget;
        opts.function_tolerance = 1e-15;
        opts.gradient_tolerance = 1e-12;
        opts.parameter_tolerance = 1e-15;
        opts.logging_type = ceres::SILENT;
        opts.minimizer_progress_to_stdout = false;
        ceres::GradientProblem problem(new AugmentedLagrangian(system, lambda, penalty));
        ceres::GradientProblemSolver::Summary summary;
        ceres::Solve(opts, problem, x.data(), &summary);
        budget -= std::max(1, static_cast<int>(summary.iterations.size()) - 1);
        offer(x, 50);
        const Vector c = system.residual(x);
        const double violation = c.cwiseAbs().maxCoeff();
        const double stationarity =
            (x + system.jacobian(x).transpose() * (lambda + penalty * c)).cwiseAbs().maxCoeff();
        lambda += penalty * c;
        if (violation < kFeasible && stationarity < 1e-8) {
            break;
        }
        if (violation > 0.25 * previous) {
            penalty = std::min(penalty * 10.0, 1e12);
        }
        previous = violation;
    }
    return best;
}

}  // namespace

DriveSolution synthesize_drive(const Matrix &layer_phi, const IonCrystal &crystal, const FrequencyGrid &grid,
                               const PhaseKernel &kernel, const BeamPartition &partition, uint64_t seed,
                               const SynthesisOptions &options) {
    crystal.validate();
    grid.validate();
    TargetGate{layer_phi}.validate();
    const int n = crystal.size();
    if (layer_phi.rows() != n || partition.size() != n) {
        throw ValidationError("layer coupling, crystal and partition disagree on the ion count");
    }
    if (options.restarts < 1 || options.max_iterations < 1 || !(options.tolerance > 0.0)) {
        throw ValidationError("synthesis options must be positive");
    }

    DriveSolution drive;
    drive.grid = grid;
    drive.partition = partition;
    drive.seed = seed;
    drive.amplitudes = Matrix::Zero(partition.beams(), grid.size());
    drive.phases = Matrix::Zero(partition.beams(), grid.size());
    const double scale = max_abs(layer_phi);
    if (scale == 0.0) {
        return drive;
    }

    const auto nullspace = displacement_nullspace(kernel, crystal, partition);
    const Matrix normalized = layer_phi / scale;
    const ConstraintSystem system(normalized, crystal, kernel, partition, nullspace);

    std::vector<RestartResult> results(options.restarts);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < options.restarts; ++k) {
        results[k] = run_restart(system, derive_seed(seed, static_cast<uint64_t>(k)), options);
    }

    const double root = std::sqrt(scale);
    int best = -1;
    double best_power = std::numeric_limits<double>::infinity();
    double best_residual = std::numeric_limits<double>::infinity();
    for (int k = 0; k < options.restarts; ++k) {
        DriveSolution candidate = drive;
        candidate.amplitudes = root * system.amplitudes(results[k].x, grid.size());
        const double residual = max_abs(kernel_phases(candidate, crystal, kernel) - layer_phi);
        best_residual = std::min(best_residual, residual);
        if (residual > options.tolerance * scale) {
            continue;
        }
        const double power = candidate.total_power();
        if (power < best_power) {
            best_power = power;
            best = k;
            drive.amplitudes = candidate.amplitudes;
            drive.constraint_residual = residual;
        }
    }
    if (best < 0) {
        throw SolverError("drive synthesis did not reach the constraint tolerance", best_residual);
    }
    return drive;
}

// ---- adiabatic construction ----

TwoBeamAmplitudes adiabatic_two_beam(double phi_a, double phi_b, double phi_ab, std::array<int, 4> tone_indices,
                                     double phi0) {
    const auto [n1, n2, n3, n4] = tone_indices;
    if (!(phi0 > 0.0) || !std::isfinite(phi0)) {
        throw ValidationError("phi0 must be positive");
    }
    if (n1 == 0 || n4 == 0) {
        throw ValidationError("tone indices must be nonzero");
    }
    if (!(n2 > 0 && n3 < 0)) {
        throw ValidationError("shared tones need n2 > 0 and n3 < 0");
    }
    const double a = phi_a / phi0;
    const double b = phi_b / phi0;
    const double ab = phi_ab / phi0;
    if (a * n1 < 0.0) {
        throw ValidationError("sign(n1) must match sign(phi_a)");
    }
    if (b * n4 < 0.0) {
        throw ValidationError("sign(n4) must match sign(phi_b)");
    }
    TwoBeamAmplitudes out;
    const double ratio = std::sqrt(static_cast<double>(n2) / static_cast<double>(-n3));
    double ra3 = 0.0;
    double rb3 = 0.0;
    if (ab != 0.0) {
        ra3 = std::sqrt(std::abs(ab * n3) / 2.0);
        rb3 = ab * n3 / (2.0 * ra3);
    }
    out.beam_a = {std::sqrt(a * n1), ratio * ra3, ra3};
    out.beam_b = {-ratio * rb3, rb3, std::sqrt(b * n4)};
    return out;
}

double nuclear_norm(const Matrix &phi) {
    if (phi.rows() != phi.cols()) {
        throw ValidationError("nuclear_norm needs a square matrix");
    }
    if (phi.size() == 0) {
        return 0.0;
    }
    const double asym = max_asymmetry(phi);
    if (asym > 1e-12 * std::max(1.0, max_abs(phi))) {
        throw ValidationError("nuclear_norm needs a symmetric matrix");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(phi, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().sum();
}

// ---- power report ----

std::vector<PowerRow> power_ratio_report(const IonCrystal &crystal, const std::vector<int> &beam_counts,
                                         const PowerReportOptions &options) {
    if (options.num_gates < 1) {
        throw ValidationError("num_gates must be at least 1");
    }
    if (beam_counts.empty()) {
        throw ValidationError("power report needs at least one beam count");
    }
    const int n = crystal.size();
    const auto modes = mode_matrices(crystal);
    const auto grid = make_frequency_grid(crystal, options.num_tones);
    const auto kernel = build_phase_kernel(crystal, grid);

    std::vector<TargetGate> gates;
    for (int g = 0; g < options.num_gates; ++g) {
        Rng rng(derive_seed(options.seed, static_cast<uint64_t>(g)));
        gates.push_back(TargetGate::random(n, rng));
    }

    std::vector<PowerRow> rows;
    for (int beams : beam_counts) {
        const auto partition = BeamPartition::contiguous(n, beams);
        const auto basis = search_flip_basis(modes, partition, options.search);
        PowerRow row;
        row.beams = beams;
        double total = 0.0;
        for (int g = 0; g < options.num_gates; ++g) {
            const auto plan = decompose_target(gates[g], basis, modes);
            for (size_t l = 0; l < plan.layers.size(); ++l) {
                const Matrix &phi = plan.layers[l].phi_layer;
                const double nuc = nuclear_norm(phi);
                if (nuc <= 1e-12) {
                    continue;
                }
                ++row.num_layers;
                try {
                    const uint64_t seed = derive_seed(options.seed, (static_cast<uint64_t>(g) << 16) + l);
                    const auto drive = synthesize_drive(phi, crystal, grid, kernel, partition, seed, options.synthesis);
                    total += drive.total_power() / nuc;
                    ++row.num_converged;
                } catch (const SolverError &) {
                }
            }
        }
        row.mean_power_ratio = row.num_converged > 0 ? total / row.num_converged : std::nan("");
        rows.push_back(row);
    }
    return rows;
}

}  // namespace semiglobal
