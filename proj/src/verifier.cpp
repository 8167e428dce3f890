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

#include "semiglobal/verifier.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "semiglobal/errors.hpp"
#include "semiglobal/kernels.hpp"

namespace semiglobal {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

// Per mode: C_b, S_b for every beam, then P_{b1,b2}.
class DriveDynamics {
   public:
    DriveDynamics(const IonCrystal &crystal, const DriveSolution &drive)
        : nu_(crystal.mode_freqs), drive_(drive), beams_(drive.partition.beams()) {}

    int stride() const { return 2 * beams_ + beams_ * beams_; }
    int state_size() const { return static_cast<int>(nu_.size()) * stride(); }

    void operator()(const State &x, State &dxdt, double t) const {
        std::vector<double> f(beams_, 0.0);
        const auto &tones = drive_.grid.tones;
        for (int b = 0; b < beams_; ++b) {
            double v = 0.0;
            for (size_t m = 0; m < tones.size(); ++m) {
                const double r = drive_.amplitudes(b, static_cast<Eigen::Index>(m));
                if (r != 0.0) {
                    v += r * std::cos(tones[m] * t + drive_.phases(b, static_cast<Eigen::Index>(m)));
                }
            }
            f[b] = v;
        }
        const int s = stride();
        for (Eigen::Index j = 0; j < nu_.size(); ++j) {
            const double c = std::cos(nu_(j) * t);
            const double sn = std::sin(nu_(j) * t);
            const size_t base = static_cast<size_t>(j) * s;
            for (int b = 0; b < beams_; ++b) {
                dxdt[base + 2 * b] = f[b] * c;
                dxdt[base + 2 * b + 1] = f[b] * sn;
            }
            for (int b1 = 0; b1 < beams_; ++b1) {
                for (int b2 = 0; b2 < beams_; ++b2) {
                    dxdt[base + 2 * beams_ + b1 * beams_ + b2] =
                        f[b1] * (sn * x[base + 2 * b2] - c * x[base + 2 * b2 + 1]);
                }
            }
        }
    }

   private:
    Vector nu_;
    const DriveSolution &drive_;
    int beams_;
};

bool all_finite(const State &x) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

double wrap(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(x, two_pi);
    if (r > std::numbers::pi) {
        r -= two_pi;
    } else if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

void require_enumerable(int n) {
    if (n > kMaxEnumeratedIons) {
        throw ValidationError("basis-state enumeration is limited to N <= " + std::to_string(kMaxEnumeratedIons));
    }
}

}  // namespace

PhaseOutcome integrate_drive(const IonCrystal &crystal, const DriveSolution &drive, const IntegrationOptions &options) {
    crystal.validate();
    drive.grid.validate();
    const int n = crystal.size();
    if (n > kMaxIntegratedIons) {
        throw ValidationError("integrate_drive is limited to N <= " + std::to_string(kMaxIntegratedIons));
    }
    const int beams = drive.partition.beams();
    if (drive.partition.size() != n || drive.amplitudes.rows() != beams || drive.phases.rows() != beams ||
        drive.amplitudes.cols() != drive.grid.size() || drive.phases.cols() != drive.grid.size()) {
        throw ValidationError("drive dimensions do not match the crystal and grid");
    }
    if (!drive.amplitudes.allFinite() || !drive.phases.allFinite()) {
        throw ValidationError("drive contains non-finite entries");
    }
    if (options.subintervals < 1) {
        throw ValidationError("subintervals must be positive");
    }

    const DriveDynamics dynamics(crystal, drive);
    State x(dynamics.state_size(), 0.0);
    const double total = drive.grid.gate_time;
    const double piece = total / options.subintervals;
    double fastest = crystal.mode_freqs.maxCoeff();
    for (double w : drive.grid.tones) {
        fastest = std::max(fastest, std::abs(w));
    }
    auto stepper = odeint::make_controlled(options.abs_tolerance, options.rel_tolerance,
                                           odeint::runge_kutta_fehlberg78<State>());
    for (int k = 0; k < options.subintervals; ++k) {
        const double t0 = k * piece;
        const double t1 = k + 1 == options.subintervals ? total : (k + 1) * piece;
        try {
            odeint::integrate_adaptive(stepper, std::cref(dynamics), x, t0, t1, std::min(piece, 0.1 / fastest));
        } catch (const std::exception &e) {
            throw QuadratureError(std::string("time integration failed: ") + e.what(), t0, t1);
        }
        if (!all_finite(x)) {
            throw QuadratureError("time integration produced non-finite values", t0, t1);
        }
    }

    PhaseOutcome out;
    out.achieved_phi = Matrix::Zero(n, n);
    out.residual_displacements = Vector::Zero(n);
    const int stride = dynamics.stride();
    for (int j = 0; j < n; ++j) {
        const size_t base = static_cast<size_t>(j) * stride;
        const double eta = crystal.lamb_dicke(j);
        for (int ion = 0; ion < n; ++ion) {
            const int b = drive.partition.beam_of(ion);
            const std::complex<double> alpha(x[base + 2 * b], x[base + 2 * b + 1]);
            out.residual_displacements(j) += std::abs(eta * crystal.mode_vectors(ion, j) * alpha);
        }
        for (int a = 0; a < n; ++a) {
            for (int c = a + 1; c < n; ++c) {
                const int ba = drive.partition.beam_of(a);
                const int bc = drive.partition.beam_of(c);
                const double p = x[base + 2 * beams + ba * beams + bc] + x[base + 2 * beams + bc * beams + ba];
                out.achieved_phi(a, c) += 0.5 * eta * eta * crystal.mode_vectors(a, j) * crystal.mode_vectors(c, j) * p;
            }
        }
    }
    out.achieved_phi.triangularView<Eigen::StrictlyLower>() =
        out.achieved_phi.transpose().triangularView<Eigen::StrictlyLower>();
    return out;
}

DiagonalUnitary ideal_unitary(const Matrix &phi) {
    require_enumerable(static_cast<int>(phi.rows()));
    return DiagonalUnitary{kernels::basis_state_phases_parallel(phi)};
}

DiagonalUnitary compose_plan(const LayerPlan &plan) {
    const int n = plan.num_ions();
    require_enumerable(n);
    Matrix total = Matrix::Zero(n, n);
    for (const auto &layer : plan.layers) {
        total += layer.phi_layer.cwiseProduct(sign_matrix(layer.flip));
    }
    total.diagonal().setZero();
    return DiagonalUnitary{kernels::basis_state_phases_parallel(total)};
}

DiagonalUnitary compose_plan_dense(const LayerPlan &plan) {
    using CMatrix = Eigen::MatrixXcd;
    const int n = plan.num_ions();
    require_enumerable(n);
    const Eigen::Index dim = Eigen::Index{1} << n;
    CMatrix u = CMatrix::Identity(dim, dim);
    for (const auto &layer : plan.layers) {
        CMatrix gate = CMatrix::Zero(dim, dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            double phase = 0.0;
            for (int a = 0; a < n; ++a) {
                for (int b = a + 1; b < n; ++b) {
                    const double za = ((k >> (n - 1 - a)) & 1) ? -1.0 : 1.0;
                    const double zb = ((k >> (n - 1 - b)) & 1) ? -1.0 : 1.0;
                    phase += 2.0 * layer.phi_layer(a, b) * za * zb;
                }
            }
            gate(k, k) = std::polar(1.0, phase);
        }
        CMatrix flips = CMatrix::Zero(dim, dim);
        Eigen::Index mask = 0;
        for (int a = 0; a < n; ++a) {
            if (layer.flip.flipped(a)) {
                mask |= Eigen::Index{1} << (n - 1 - a);
            }
        }
        for (Eigen::Index k = 0; k < dim; ++k) {
            flips(k ^ mask, k) = 1.0;
        }
        u = flips * gate * flips * u;
    }
    DiagonalUnitary out;
    out.phases.resize(dim);
    const double reference = std::arg(u(0, 0));
    for (Eigen::Index k = 0; k < dim; ++k) {
        out.phases[k] = wrap(std::arg(u(k, k)) - reference);
    }
    return out;
}

double max_phase_difference(const DiagonalUnitary &a, const DiagonalUnitary &b) {
    if (a.phases.size() != b.phases.size()) {
        throw ValidationError("unitaries act on different numbers of qubits");
    }
    double worst = 0.0;
    for (size_t k = 0; k < a.phases.size(); ++k) {
        worst = std::max(worst, std::abs(wrap(a.phases[k] - b.phases[k])));
    }
    return worst;
}

Certificate certify(const LayerPlan &plan, const TargetGate &target, double tolerance) {
    target.validate();
    if (target.size() != plan.num_ions()) {
        throw ValidationError("plan and target disagree on the ion count");
    }
    Certificate cert;
    cert.max_phase_error = max_phase_difference(compose_plan(plan), ideal_unitary(target.phi));
    cert.pass = cert.max_phase_error <= tolerance;
    return cert;
}

}  // namespace semiglobal
