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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "she/errors.hpp"
#include "she/random.hpp"
#include "she/renewal.hpp"

namespace she {
namespace {

RenewalProblem constant_problem(double g, double h, double horizon, double step, double beta = 0)
{
    const auto n = static_cast<std::size_t>(std::lround(horizon / step)) + 1;
    RenewalProblem p;
    p.step = step;
    p.g.assign(n, g);
    p.h.assign(n, h);
    p.beta = beta;
    return p;
}

double max_abs_error_vs_exp(double step)
{
    // f = 1 + a (1 * f) has f(t) = e^{a t}.
    const double a = 0.8;
    const auto sol = picard_solve(constant_problem(1.0, a, 1.0, step));
    double err = 0.0;
    for (std::size_t i = 0; i < sol.f.size(); ++i) {
        err = std::max(err, std::abs(sol.f[i] - std::exp(a * step * static_cast<double>(i))));
    }
    return err;
}

TEST(Convolve, ExactForLinearIntegrands)
{
    const double step = 0.25;
    std::vector<double> one(9, 1.0), ramp(9);
    for (std::size_t i = 0; i < ramp.size(); ++i) {
        ramp[i] = step * static_cast<double>(i);
    }
    const auto a = convolve(one, one, step);
    const auto b = convolve(ramp, one, step);
    for (std::size_t i = 0; i < 9; ++i) {
        const double t = step * static_cast<double>(i);
        EXPECT_NEAR(a[i], t, 1e-15);
        EXPECT_NEAR(b[i], t * t / 2, 1e-15);
    }
    EXPECT_THROW(convolve(one, std::vector<double>(3, 1.0), step), std::invalid_argument);
}

TEST(Renewal, ClosedFormWithSecondOrderConvergence)
{
    const double e1 = max_abs_error_vs_exp(1.0 / 32);
    const double e2 = max_abs_error_vs_exp(1.0 / 64);
    EXPECT_LT(e2, 1e-3);
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(Renewal, ZeroForcing)
{
    const auto sol = picard_solve(constant_problem(0.0, 0.5, 1.0, 0.01));
    for (double v : sol.f) {
        EXPECT_EQ(v, 0.0);
    }
    EXPECT_EQ(sol.iterations, 1u);
}

TEST(Renewal, ZeroKernelReturnsForcing)
{
    auto p = constant_problem(0.0, 0.0, 1.0, 0.1);
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.g[i] = std::sin(static_cast<double>(i)) + 1.0;
    }
    EXPECT_EQ(picard_solve(p).f, p.g);
}

TEST(Renewal, WeightedMassMustBeBelowOne)
{
    EXPECT_THROW(picard_solve(constant_problem(1.0, 2.0, 1.0, 0.01)), DomainError);
    EXPECT_NO_THROW(picard_solve(constant_problem(1.0, 2.0, 1.0, 0.01, 3.0)));
    EXPECT_NEAR(rho_hat(constant_problem(1.0, 2.0, 1.0, 0.001, 3.0)), 2.0 * (1 - std::exp(-3.0)) / 3,
                1e-6);
}

TEST(Renewal, Validation)
{
    auto p = constant_problem(1.0, 1.0, 1.0, 0.1);
    p.h[3] = -1.0;
    EXPECT_THROW(picard_solve(p), std::invalid_argument);
    p = constant_problem(1.0, 1.0, 1.0, 0.1);
    p.g.pop_back();
    EXPECT_THROW(picard_solve(p), std::invalid_argument);
    p = constant_problem(1.0, 1.0, 1.0, 0.1);
    p.step = 0.0;
    EXPECT_THROW(picard_solve(p), std::invalid_argument);
}

TEST(Renewal, NonConvergenceReportsContraction)
{
    try {
        picard_solve(constant_problem(1.0, 0.9, 1.0, 0.01), 1e-15, 3);
        FAIL() << "expected NumericFailure";
    } catch (const NumericFailure& e) {
        EXPECT_GT(e.achieved(), 0.0);
        EXPECT_LT(e.achieved(), 1.0);
    }
}

// Random nonnegative problems drive the property tests below.
RenewalProblem random_problem(std::uint32_t seed)
{
    StreamRng rng(99, StreamTag::misc, seed);
    RenewalProblem p = constant_problem(0.0, 0.0, 2.0, 1.0 / 64, 0.5 + 2.0 * rng.uniform());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.g[i] = 2.0 * rng.uniform();
        p.h[i] = 1.5 * rng.uniform() * std::exp(-p.time(i));
    }
    return p;
}

TEST(RenewalProperty, ChangesContractByRhoHat)
{
    for (std::uint32_t s = 0; s < 20; ++s) {
        const auto p = random_problem(s);
        const double rho = rho_hat(p);
        if (rho >= 1.0) {
            continue;
        }
        const auto sol = picard_solve(p);
        for (std::size_t i = 1; i < sol.changes.size(); ++i) {
            EXPECT_LE(sol.changes[i], rho * sol.changes[i - 1] * (1 + 1e-9) + 1e-300);
        }
    }
}

TEST(RenewalProperty, SolutionBelowUpperBound)
{
    for (std::uint32_t s = 0; s < 20; ++s) {
        const auto p = random_problem(s);
        if (rho_hat(p) >= 1.0) {
            continue;
        }
        const auto sol = picard_solve(p);
        for (std::size_t i = 0; i < sol.f.size(); ++i) {
            EXPECT_LE(sol.f[i], sol.upper_bound(i, p.step, p.beta) * (1 + 1e-12));
            EXPECT_GE(sol.f[i], p.g[i]);
        }
    }
}

TEST(RenewalProperty, MonotoneInForcing)
{
    for (std::uint32_t s = 0; s < 20; ++s) {
        auto p = random_problem(s);
        if (rho_hat(p) >= 1.0) {
            continue;
        }
        auto q = p;
        StreamRng rng(5, StreamTag::misc, s);
        for (auto& v : q.g) {
            v += rng.uniform();
        }
        const auto f = picard_solve(p).f;
        const auto F = picard_solve(q).f;
        for (std::size_t i = 0; i < f.size(); ++i) {
            EXPECT_LE(f[i], F[i]);
        }
    }
}

TEST(Comparison, Verdicts)
{
    const auto p = constant_problem(1.0, 0.7, 1.0, 1.0 / 128);
    const auto f = picard_solve(p).f;
    std::vector<double> twice(f), half(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        twice[i] = 2.0 * f[i];
        half[i] = 0.5 * f[i];
    }
    EXPECT_EQ(comparison_check(p, f, ComparisonDirection::super, 1e-10).verdict,
              ComparisonVerdict::holds);
    EXPECT_EQ(comparison_check(p, f, ComparisonDirection::sub, 1e-10).verdict,
              ComparisonVerdict::holds);
    // 2f satisfies 2f >= g + h*(2f) = 2f - g; f/2 satisfies the reverse.
    EXPECT_EQ(comparison_check(p, twice, ComparisonDirection::super).verdict,
              ComparisonVerdict::holds);
    EXPECT_EQ(comparison_check(p, twice, ComparisonDirection::sub).verdict,
              ComparisonVerdict::not_a_sub_solution);
    EXPECT_EQ(comparison_check(p, half, ComparisonDirection::sub).verdict,
              ComparisonVerdict::holds);
    EXPECT_EQ(comparison_check(p, half, ComparisonDirection::super).verdict,
              ComparisonVerdict::not_a_super_solution);
    EXPECT_EQ(to_string(ComparisonVerdict::ordering_fails), "ordering-fails");
}

TEST(CriticalBeta, OneDimensionalClosedForm)
{
    // Pbar(t) = e^{-2t} I_0(2t), so Upsilon(beta) = 1 / sqrt((beta + 2)^2 - 4).
    const WalkKernel k{JumpDistribution::simple(1)};
    for (double ell : {0.5, 1.0, 2.0}) {
        const auto cb = critical_beta(k, ell);
        ASSERT_TRUE(cb.exists);
        EXPECT_TRUE(std::isinf(cb.upsilon0));
        const double expect = std::sqrt(4.0 + std::pow(ell, 4)) - 2.0;
        EXPECT_NEAR(cb.beta, expect, 1e-6 * expect);
    }
    EXPECT_THROW(critical_beta(k, 0.0), std::invalid_argument);
}

TEST(CriticalBeta, TransientSentinelAndRoot)
{
    const WalkKernel k{JumpDistribution::simple(3)};
    const auto none = critical_beta(k, 1.0);
    EXPECT_FALSE(none.exists);
    EXPECT_EQ(none.beta, 0.0);
    EXPECT_NEAR(none.upsilon0, 0.758193, 1e-4);
    const auto cb = critical_beta(k, 2.0);
    ASSERT_TRUE(cb.exists);
    EXPECT_NEAR(4.0 * upsilon(k, cb.beta, 1e-11).value, 1.0, 1e-6);
}

} // namespace
} // namespace she
