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

#ifndef SEMIGLOBAL_ERRORS_HPP
#define SEMIGLOBAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace semiglobal {

/// Input violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative numerical method stopped without meeting its tolerance.
class SolverError : public std::runtime_error {
   public:
    SolverError(const std::string &what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const { return residual_; }

   private:
    double residual_;
};

/// The flip-basis search (or a downstream consumer) hit a rank-deficient collection matrix.
class IncompleteBasisError : public std::runtime_error {
   public:
    IncompleteBasisError(const std::string &what, int achieved_rank, int required_rank)
        : std::runtime_error(what + " (rank " + std::to_string(achieved_rank) + " of " +
                             std::to_string(required_rank) + ")"),
          achieved_rank_(achieved_rank),
          required_rank_(required_rank) {}
    int achieved_rank() const { return achieved_rank_; }
    int required_rank() const { return required_rank_; }

   private:
    int achieved_rank_;
    int required_rank_;
};

/// A drive tone coincides with a motional mode frequency.
class SingularKernelError : public std::runtime_error {
   public:
    SingularKernelError(int tone, int mode)
        : std::runtime_error("tone " + std::to_string(tone) + " collides with mode " + std::to_string(mode)),
          tone_(tone),
          mode_(mode) {}
    int tone() const { return tone_; }
    int mode() const { return mode_; }

   private:
    int tone_;
    int mode_;
};

/// No nonzero amplitude vector closes every motional loop on this grid.
class InfeasibleGridError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Adaptive time integration could not reach its tolerance.
class QuadratureError : public std::runtime_error {
   public:
    QuadratureError(const std::string &what, double t_begin, double t_end)
        : std::runtime_error(what + " on [" + std::to_string(t_begin) + ", " + std::to_string(t_end) + "]"),
          t_begin_(t_begin),
          t_end_(t_end) {}
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }

   private:
    double t_begin_;
    double t_end_;
};

}  // namespace semiglobal

#endif
