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
#include <numbers>
#include <vector>

#include "she/errors.hpp"
#include "she/random.hpp"
#include "she/walk_kernel.hpp"

namespace she {
namespace {

constexpr double pi = std::numbers::pi;

WalkKernel simple(int d) { return WalkKernel(JumpDistribution::simple(d)); }

// Lazy 2-d walk with a diagonal jump, so nothing reduces to a product form.
WalkKernel skewed2d()
{
    return WalkKernel(JumpDistribution(2, {{{1, 0}, 0.3}, {{-1, 0}, 0.2}, {{0, 1}, 0.15},
                                           {{0, -1}, 0.15}, {{1, 1}, 0.1}, {{0, 0}, 0.1}}));
}

// e^{-t} I_|x|(t): the d = 1 simple walk, from the standard library.
double bessel_oracle(double t, int x) { return std::exp(-t) * std::cyl_bessel_i(std::abs(x), t); }

TEST(JumpDistribution, Validation)
{
    EXPECT_THROW(JumpDistribution(1, {{{1}, 0.5}, {{-1}, 0.4}}), std::invalid_argument);
    EXPECT_THROW(JumpDistribution(1, {{{1}, 0.5}, {{1}, 0.5}}), std::invalid_argument);
    EXPECT_THROW(JumpDistribution(1, {{{1}, 1.5}, {{-1}, -0.5}}), std::invalid_argument);
    EXPECT_THROW(JumpDistribution(2, {{{1}, 1.0}}), std::invalid_argument);
    EXPECT_THROW(JumpDistribution(1, {}), std::invalid_argument);
    EXPECT_NO_THROW(JumpDistribution(1, {{{0}, 0.5}, {{1}, 0.25}, {{-1}, 0.25}}));
}

TEST(JumpDistribution, LatticeGeneration)
{
    EXPECT_TRUE(JumpDistribution::simple(3).generates_lattice());
    EXPECT_EQ(JumpDistribution::simple(3).rank(), 3);
    const JumpDistribution even(1, {{{2}, 0.5}, {{-2}, 0.5}});
    EXPECT_FALSE(even.generates_lattice());
    const JumpDistribution flat(2, {{{1, 0}, 0.5}, {{-1, 0}, 0.5}});
    EXPECT_EQ(flat.rank(), 1);
    EXPECT_FALSE(flat.generates_lattice());
    // One-sided support still generates Z after symmetrization.
    EXPECT_TRUE(JumpDistribution(1, {{{1}, 1.0}}).generates_lattice());
    EXPECT_EQ(JumpDistribution(2, {{{1, 0}, 0.5}, {{1, 2}, 0.5}}).max_norm(), 2);
}

TEST(WalkKernel, TransienceFlag)
{
    EXPECT_FALSE(simple(1).symmetrized_transient());
    EXPECT_FALSE(simple(2).symmetrized_transient());
    EXPECT_TRUE(simple(3).symmetrized_transient());
    EXPECT_TRUE(WalkKernel(JumpDistribution::simple(1), 1.0, true).symmetrized_transient());
    const JumpDistribution planar(3, {{{1, 0, 0}, 0.25}, {{-1, 0, 0}, 0.25}, {{0, 1, 0}, 0.25},
                                      {{0, -1, 0}, 0.25}});
    EXPECT_FALSE(WalkKernel(planar).symmetrized_transient());
}

TEST(CharFunction, SimpleWalkValues)
{
    const WalkKernel k = simple(1);
    const double zero[] = {0.0};
    const double half[] = {pi / 2};
    const double full[] = {pi};
    EXPECT_NEAR(std::abs(char_function(k, zero) - std::complex<double>(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(char_function(k, full) - std::complex<double>(-1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(char_function(k, half)), 0.0, 1e-15);
    const double wrong[] = {0.1, 0.2};
    EXPECT_THROW(char_function(k, wrong), std::invalid_argument);
}

TEST(CharFunction, BoundedAndMatchesDirectSum)
{
    const WalkKernel k = skewed2d();
    StreamRng rng(1, StreamTag::misc, 2);
    for (int i = 0; i < 200; ++i) {
        const double xi[] = {pi * (2 * rng.uniform() - 1), pi * (2 * rng.uniform() - 1)};
        const auto phi = char_function(k, xi);
        std::complex<double> direct = 0;
        for (const auto& j : k.jumps.jumps()) {
            direct += j.mass * std::exp(std::complex<double>(0, xi[0] * j.vec[0] + xi[1] * j.vec[1]));
        }
        EXPECT_LE(std::abs(phi), 1.0 + 1e-15);
        EXPECT_NEAR(std::abs(phi - direct), 0.0, 1e-14);
        EXPECT_NEAR(symbol(k.jumps, xi), 1.0 - direct.real(), 1e-14);
    }
}

TEST(PoissonTruncation, MinimalCutBelowTolerance)
{
    for (double mu : {0.1, 1.0, 7.5, 60.0}) {
        const PoissonCut cut = poisson_truncation(mu, 1e-12);
        // Independent tail: 1 - sum_{n <= N} of the pmf in log space.
        auto tail_after = [mu](std::size_t N) {
            double s = 0.0;
            for (std::size_t n = N + 1; n < N + 400; ++n) {
                s += std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
            }
            return s;
        };
        EXPECT_LT(tail_after(cut.terms), 1e-12) << mu;
        if (cut.terms > 0) {
            EXPECT_GE(tail_after(cut.terms - 1), 1e-12) << mu;
        }
        EXPECT_LE(tail_after(cut.terms), cut.tail * (1 + 1e-6) + 1e-300);
    }
}

TEST(TransitionProb, ZeroTime)
{
    const WalkKernel k = simple(2);
    const int origin[] = {0, 0};
    const int off[] = {1, 0};
    EXPECT_EQ(transition_prob(k, 0.0, origin).value, 1.0);
    EXPECT_EQ(transition_prob(k, 0.0, off).value, 0.0);
}

TEST(TransitionProb, BesselIdentity)
{
    const WalkKernel k = simple(1);
    const int origin[] = {0};
    const auto p = transition_prob(k, 1.0, origin);
    EXPECT_NEAR(p.value, 0.4657596075936404, 1e-12);
    EXPECT_LE(p.truncation_bound, 1e-12);
    for (double t : {0.3, 2.0, 9.0}) {
        for (int x : {-3, 0, 1, 5}) {
            const int pt[] = {x};
            EXPECT_NEAR(transition_prob(k, t, pt).value, bessel_oracle(t, x), 1e-12);
        }
    }
}

TEST(TransitionProb, AtLeastNoJumpProbability)
{
    for (const WalkKernel& k : {simple(1), skewed2d(), simple(3)}) {
        const std::vector<int> origin(k.dim(), 0);
        for (double t : {0.01, 0.5, 1.0, 3.0, 10.0}) {
            EXPECT_GE(transition_prob(k, t, origin).value, std::exp(-t) - 1e-15);
        }
    }
}

TEST(TransitionTable, Normalization)
{
    for (const WalkKernel& k : {simple(1), skewed2d(), simple(3)}) {
        for (double t : {0.2, 1.0, 4.0}) {
            const TransitionTable table = transition_table(k, t, 1e-12);
            double sum = 0.0;
            for (double v : table.values) {
                EXPECT_GE(v, 0.0);
                sum += v;
            }
            EXPECT_LE(std::abs(sum + table.truncation_bound - 1.0), 1e-11);
        }
    }
}

TEST(TransitionTable, ChapmanKolmogorov)
{
    const WalkKernel k = skewed2d();
    StreamRng rng(8, StreamTag::misc, 3);
    for (int trial = 0; trial < 4; ++trial) {
        const double s = 0.2 + 1.5 * rng.uniform();
        const double t = 0.2 + 1.5 * rng.uniform();
        const int x[] = {static_cast<int>(rng.next_u32() % 5) - 2,
                         static_cast<int>(rng.next_u32() % 5) - 2};
        const TransitionTable ps = transition_table(k, s, 1e-14);
        const TransitionTable pt = transition_table(k, t, 1e-14);
        double conv = 0.0;
        for (int a = -ps.radius; a <= ps.radius; ++a) {
            for (int b = -ps.radius; b <= ps.radius; ++b) {
                const int y[] = {a, b};
                const int rest[] = {x[0] - a, x[1] - b};
                conv += ps.at(y) * pt.at(rest);
            }
        }
        EXPECT_NEAR(conv, transition_prob(k, s + t, x).value, 1e-12);
    }
}

TEST(Pbar, ZeroAndBesselValues)
{
    const WalkKernel k = simple(1);
    EXPECT_DOUBLE_EQ(pbar(k, 0.0).value, 1.0);
    EXPECT_NEAR(pbar(k, 0.5).value, 0.4657596075936404, 1e-9);
    for (double tau : {0.1, 1.0, 3.0}) {
        EXPECT_NEAR(pbar(k, tau).value, std::exp(-2 * tau) * std::cyl_bessel_i(0, 2 * tau), 1e-9);
    }
    EXPECT_THROW(pbar(k, -1.0), std::invalid_argument);
}

TEST(Pbar, FourierMatchesLatticeSum)
{
    for (const WalkKernel& k : {simple(1), simple(2), skewed2d()}) {
        for (double tau : {0.1, 0.5, 2.0}) {
            EXPECT_NEAR(pbar(k, tau, 1e-12).value, pbar_lattice_sum(k, tau), 1e-8);
        }
    }
    const WalkKernel lazy3(JumpDistribution(3, {{{1, 0, 0}, 0.2}, {{-1, 0, 0}, 0.2}, {{0, 1, 0}, 0.2},
                                                {{0, -1, 0}, 0.1}, {{0, 0, 1}, 0.1}, {{0, 0, -1}, 0.1},
                                                {{0, 0, 0}, 0.1}}));
    EXPECT_NEAR(pbar(lazy3, 0.4, 1e-11).value, pbar_lattice_sum(lazy3, 0.4), 1e-8);
}

TEST(Pbar, LocalLimit)
{
    const double tau = 200.0;
    EXPECT_NEAR(pbar(simple(1), tau).value * std::sqrt(4 * pi * tau), 1.0, 0.02);
}

TEST(Pbar, CurveIsNonincreasingAndInUnitInterval)
{
    std::vector<double> taus;
    for (int i = 0; i <= 60; ++i) {
        taus.push_back(0.25 * i);
    }
    for (const WalkKernel& k : {simple(1), skewed2d(), simple(3)}) {
        const auto curve = pbar_curve(k, taus);
        EXPECT_DOUBLE_EQ(curve.front().value, 1.0);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            EXPECT_LE(curve[i].value, curve[i - 1].value);
            EXPECT_GT(curve[i].value, 0.0);
        }
    }
}

TEST(OverlapCurve, DeltaGivesPbarAndTwoPointsMatchSeries)
{
    const WalkKernel k = simple(1);
    const std::vector<double> taus{0.0, 0.7, 2.0};
    const auto delta = overlap_curve(k, taus, {{{0}, 1.0}});
    const auto pb = pbar_curve(k, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        EXPECT_NEAR(delta[i].value, pb[i].value, 1e-10);
    }
    // ||P_t u0||^2 for u0 = 2 delta_0 + delta_3, by direct summation.
    const std::vector<std::pair<LatticePoint, double>> u0{{{0}, 2.0}, {{3}, 1.0}};
    const auto curve = overlap_curve(k, taus, u0);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        double direct = 0.0;
        for (int x = -80; x <= 80; ++x) {
            const double v = taus[i] == 0.0 ? (x == 0 ? 2.0 : x == 3 ? 1.0 : 0.0)
                                            : 2 * bessel_oracle(taus[i], x) + bessel_oracle(taus[i], x - 3);
            direct += v * v;
        }
        EXPECT_NEAR(curve[i].value, direct, 1e-9);
    }
}

TEST(Upsilon, ClosedFormOneDimension)
{
    const WalkKernel k = simple(1);
    EXPECT_NEAR(upsilon(k, 2.0).value, 1.0 / std::sqrt(12.0), 1e-8);
    for (double beta : {0.3, 1.0, 5.0}) {
        EXPECT_NEAR(upsilon(k, beta).value, 1.0 / std::sqrt(beta * beta + 4 * beta), 1e-8);
    }
}

TEST(Upsilon, WatsonConstant)
{
    // Half of Watson's simple cubic Green's function 1.516386059151978.
    EXPECT_NEAR(upsilon(simple(3), 0.0).value, 0.758193029575989, 1e-4);
}

TEST(Upsilon, RecurrentSentinel)
{
    EXPECT_TRUE(std::isinf(upsilon(simple(1), 0.0).value));
    EXPECT_TRUE(std::isinf(upsilon(simple(2), 0.0).value));
}

TEST(Upsilon, BoundsAndMonotonicity)
{
    const std::vector<double> betas{0.05, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0};
    for (const WalkKernel& k : {simple(1), skewed2d(), simple(3)}) {
        const auto curve = upsilon_curve(k, betas);
        for (std::size_t i = 0; i < betas.size(); ++i) {
            EXPECT_GT(curve[i].value, 0.0);
            EXPECT_LE(curve[i].value, 1.0 / betas[i]);
            if (i > 0) {
                EXPECT_LT(curve[i].value, curve[i - 1].value);
            }
        }
        EXPECT_NEAR(1000.0 * upsilon(k, 1000.0).value, 1.0, 0.01);
    }
}

TEST(Upsilon, LaplaceTransformOfPbar)
{
    // Trapezoid quadrature of int e^{-beta t} Pbar(t) dt at steps h and 2h,
    // Richardson-combined.
    const WalkKernel k = skewed2d();
    const double beta = 1.5;
    const double h = 0.01;
    std::vector<double> taus;
    for (int i = 0; i <= 3000; ++i) {
        taus.push_back(h * i);
    }
    const auto pb = pbar_curve(k, taus, 1e-11);
    auto trapezoid = [&](std::size_t stride) {
        double sum = 0.0;
        for (std::size_t i = 0; i < taus.size(); i += stride) {
            const double w = (i == 0 || i + 1 == taus.size()) ? 0.5 : 1.0;
            sum += w * std::exp(-beta * taus[i]) * pb[i].value;
        }
        return sum * h * static_cast<double>(stride);
    };
    const double integral = (4.0 * trapezoid(1) - trapezoid(2)) / 3.0;
    EXPECT_NEAR(upsilon(k, beta).value, integral, 1e-7);
}

TEST(WalkPath, ZeroHorizon)
{
    StreamRng rng(1, StreamTag::walk_path, 0);
    const WalkPath p = sample_walk_path(simple(2), 0.0, rng);
    EXPECT_EQ(p.states(), 1u);
    EXPECT_EQ(p.final_position()[0], 0);
    EXPECT_EQ(p.final_position()[1], 0);
}

TEST(WalkPath, PoissonMeanAndOneStepLaw)
{
    const WalkKernel k = simple(1);
    const int n = 100000;
    double jumps = 0.0;
    double at_origin = 0.0;
    for (int i = 0; i < n; ++i) {
        StreamRng rng(77, StreamTag::walk_path, static_cast<std::uint32_t>(i));
        jumps += static_cast<double>(sample_walk_path(k, 3.0, rng).jump_times.size());
        StreamRng rng2(78, StreamTag::walk_path, static_cast<std::uint32_t>(i));
        at_origin += sample_walk_path(k, 1.0, rng2).final_position()[0] == 0 ? 1.0 : 0.0;
    }
    EXPECT_NEAR(jumps / n, 3.0, 3.0 * std::sqrt(3.0 / n));
    const double p = 0.4657596075936404;
    EXPECT_NEAR(at_origin / n, p, 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(WalkPath, JumpTimesIncreaseWithinHorizon)
{
    StreamRng rng(4, StreamTag::walk_path, 9);
    const WalkPath p = sample_walk_path(skewed2d(), 5.0, rng);
    for (std::size_t i = 0; i < p.jump_times.size(); ++i) {
        EXPECT_LE(p.jump_times[i], 5.0);
        if (i > 0) {
            EXPECT_GT(p.jump_times[i], p.jump_times[i - 1]);
        }
    }
}

TEST(OverlapTime, HandBuiltPaths)
{
    WalkPath a{1, 4.0, {1.0, 3.0}, {0, 1, 0}};
    WalkPath b{1, 4.0, {2.0}, {0, 1}};
    // Together on [0,1) at 0 and [2,3) at 1; apart elsewhere.
    EXPECT_DOUBLE_EQ(overlap_time(a, b), 2.0);
    EXPECT_DOUBLE_EQ(overlap_time(a, a), 4.0);
    WalkPath c{1, 4.0, {0.5}, {0, -1}};
    EXPECT_DOUBLE_EQ(overlap_time(b, c), 0.5);
}

} // namespace
} // namespace she
