/*
   Copyright 2026 The she-lattice Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "she/walk_kernel.hpp"

namespace she {

/// f = g + h * f on the uniform grid t_i = i * step, i = 0..N.
struct RenewalProblem {
    double step = 0.0;
    std::vector<double> g;
    std::vector<double> h;
    double beta = 0.0;
    /// Optional value of int_T^inf e^{-beta t} h(t) dt, reported as an error
    /// proxy for solving on [0, T] instead of [0, inf).
    std::optional<double> h_tail_mass;

    std::size_t size() const noexcept { return g.size(); }
    double time(std::size_t i) const noexcept { return static_cast<double>(i) * step; }
};

/// Throws std::invalid_argument for mismatched, empty, negative or
/// non-finite grids.
void validate(const RenewalProblem& problem);

/// Trapezoid estimate of int_0^T e^{-beta t} h(t) dt.
double rho_hat(const RenewalProblem& problem);
/// sup_i e^{-beta t_i} g(t_i).
double gamma_hat(const RenewalProblem& problem);

/// Trapezoid rule for (h * f)(t_i) = int_0^{t_i} h(t_i - s) f(s) ds.
std::vector<double> convolve(std::span<const double> h, std::span<const double> f, double step);

struct RenewalSolution {
    std::vector<double> f;
    std::size_t iterations = 0;
    /// beta-weighted sup-norm change after each iteration.
    std::vector<double> changes;
    double rho_hat = 0.0;
    double gamma_hat = 0.0;
    std::optional<double> tail_proxy;

    /// gamma e^{beta t} / (1 - rho) at grid point i.
    double upper_bound(std::size_t i, double step, double beta) const;
};

/// Picard iteration from f^{(0)} = g. Throws DomainError when rho_hat >= 1
/// and NumericFailure (carrying the last contraction factor) when max_iter
/// is exhausted.
RenewalSolution picard_solve(const RenewalProblem& problem, double tol = 1e-13,
                             std::size_t max_iter = 100000);

enum class ComparisonDirection { super, sub };

enum class ComparisonVerdict { holds, ordering_fails, not_a_super_solution, not_a_sub_solution };

std::string to_string(ComparisonVerdict v);

struct ComparisonReport {
    ComparisonVerdict verdict = ComparisonVerdict::holds;
    /// Largest violation of the defining inequality (<= tol when it holds).
    double defining_violation = 0.0;
    /// Largest signed violation of the ordering: max(f - F) for super,
    /// max(F - f) for sub. Meaningful only when the defining inequality holds.
    double ordering_violation = 0.0;
};

/// Checks F against the defining inequality of a super-solution
/// (F >= g + h*F) or sub-solution (F <= g + h*F), then against f.
ComparisonReport comparison_check(const RenewalProblem& problem, std::span<const double> F,
                                  ComparisonDirection direction, double tol = 1e-12);

struct CriticalBeta {
    double beta = 0.0;  // 0 when no positive root exists
    bool exists = false;
    double upsilon0 = 0.0;  // +inf for recurrent kernels
};

/// Root of ell^2 Upsilon(beta) = 1 by bisection to 1e-8 relative.
CriticalBeta critical_beta(const WalkKernel& kernel, double ell);

} // namespace she
