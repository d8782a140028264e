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

#include "she/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "she/errors.hpp"

namespace she {

void validate(const RenewalProblem& problem)
{
    if (!(problem.step > 0.0)) {
        throw std::invalid_argument("renewal: grid step must be positive");
    }
    if (problem.g.empty() || problem.g.size() != problem.h.size()) {
        throw std::invalid_argument("renewal: g and h must be nonempty grids of equal length");
    }
    for (const auto* grid : {&problem.g, &problem.h}) {
        for (double v : *grid) {
            if (!std::isfinite(v) || v < 0.0) {
                throw std::invalid_argument("renewal: g and h must be finite and nonnegative");
            }
        }
    }
}

double rho_hat(const RenewalProblem& p)
{
    validate(p);
    const std::size_t n = p.size();
    if (n == 1) {
        return 0.0;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        s += w * std::exp(-p.beta * p.time(i)) * p.h[i];
    }
    return s * p.step;
}

double gamma_hat(const RenewalProblem& p)
{
    double g = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        g = std::max(g, std::exp(-p.beta * p.time(i)) * p.g[i]);
    }
    return g;
}

std::vector<double> convolve(std::span<const double> h, std::span<const double> f, double step)
{
    if (h.size() != f.size()) {
        throw std::invalid_argument("convolve: grids differ in length");
    }
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.5 * (h[i] * f[0] + h[0] * f[i]);
        for (std::size_t j = 1; j < i; ++j) {
            acc += h[i - j] * f[j];
        }
        out[i] = step * acc;
    }
    return out;
}

double RenewalSolution::upper_bound(std::size_t i, double step, double beta) const
{
    return gamma_hat * std::exp(beta * step * static_cast<double>(i)) / (1.0 - rho_hat);
}

RenewalSolution picard_solve(const RenewalProblem& problem, double tol, std::size_t max_iter)
{
    validate(problem);
    RenewalSolution sol;
    sol.rho_hat = rho_hat(problem);
    sol.gamma_hat = gamma_hat(problem);
    if (sol.rho_hat >= 1.0) {
        std::ostringstream os;
        os << "renewal: weighted kernel mass rho_hat = " << sol.rho_hat
           << " >= 1 at beta = " << problem.beta << "; increase beta";
        throw DomainError(os.str());
    }
    if (problem.h_tail_mass) {
        sol.tail_proxy = *problem.h_tail_mass;
    }
    sol.f = problem.g;
    const std::size_t n = problem.size();
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const auto conv = convolve(problem.h, sol.f, problem.step);
        double change = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = problem.g[i] + conv[i];
            const double w = std::exp(-problem.beta * problem.time(i));
            change = std::max(change, w * std::abs(next - sol.f[i]));
            scale = std::max(scale, w * std::abs(next));
            sol.f[i] = next;
        }
        sol.changes.push_back(change);
        sol.iterations = it;
        if (change <= tol * std::max(1.0, scale)) {
            return sol;
        }
    }
    const std::size_t k = sol.changes.size();
    const double factor = k >= 2 && sol.changes[k - 2] > 0.0 ? sol.changes[k - 1] / sol.changes[k - 2] : 1.0;
    std::ostringstream os;
    os << "renewal: Picard iteration exhausted " << max_iter << " iterations (contraction "
       << factor << ")";
    throw NumericFailure(os.str(), factor);
}

std::string to_string(ComparisonVerdict v)
{
    switch (v) {
    case ComparisonVerdict::holds:
        return "holds";
    case ComparisonVerdict::ordering_fails:
        return "ordering-fails";
    case ComparisonVerdict::not_a_super_solution:
        return "not-a-super-solution";
    case ComparisonVerdict::not_a_sub_solution:
        return "not-a-sub-solution";
    }
    return "unknown";
}

ComparisonReport comparison_check(const RenewalProblem& problem, std::span<const double> F,
                                  ComparisonDirection direction, double tol)
{
    validate(problem);
    if (F.size() != problem.size()) {
        throw std::invalid_argument("comparison_check: F has wrong length");
    }
    for (double v : F) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument("comparison_check: F must be nonnegative");
        }
    }
    const bool super = direction == ComparisonDirection::super;
    const auto conv = convolve(problem.h, F, problem.step);
    ComparisonReport rep;
    rep.defining_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < F.size(); ++i) {
        const double rhs = problem.g[i] + conv[i];
        rep.defining_violation = std::max(rep.defining_violation, super ? rhs - F[i] : F[i] - rhs);
    }
    if (rep.defining_violation > tol) {
        rep.verdict = super ? ComparisonVerdict::not_a_super_solution
                            : ComparisonVerdict::not_a_sub_solution;
        return rep;
    }
    const RenewalSolution sol = picard_solve(problem);
    rep.ordering_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < F.size(); ++i) {
        rep.ordering_violation =
            std::max(rep.ordering_violation, super ? sol.f[i] - F[i] : F[i] - sol.f[i]);
    }
    rep.verdict = rep.ordering_violation > tol ? ComparisonVerdict::ordering_fails
                                               : ComparisonVerdict::holds;
    return rep;
}

CriticalBeta critical_beta(const WalkKernel& kernel, double ell)
{
    if (!(ell > 0.0)) {
        throw std::invalid_argument("critical_beta: ell must be positive");
    }
    const double ell2 = ell * ell;
    CriticalBeta out;
    out.upsilon0 = upsilon(kernel, 0.0).value;
    if (ell2 * out.upsilon0 <= 1.0) {
        return out;
    }
    // ell^2 Upsilon(beta) <= ell^2 / beta, so beta = 2 ell^2 is above the root.
    double hi = 2.0 * ell2;
    double lo = 0.0;
    if (std::isinf(out.upsilon0)) {
        lo = hi;
        do {
            lo *= 0.5;
        } while (ell2 * upsilon(kernel, lo).value <= 1.0);
    }
    // One grid for the whole bisection keeps the map exactly monotone.
    const FourierGrid grid = upsilon_grid(kernel, lo, 1e-11);
    while (hi - lo > 1e-8 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (ell2 * upsilon_on_grid(grid, mid) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.beta = 0.5 * (lo + hi);
    out.exists = true;
    return out;
}

} // namespace she
