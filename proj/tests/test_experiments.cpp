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
#include "she/experiments.hpp"
#include "she/stats.hpp"

namespace she {
namespace {

// The walk that never moves: sites evolve as independent scalar SDEs.
WalkKernel frozen_walk()
{
    return WalkKernel(JumpDistribution(1, {{{0}, 1.0}}));
}

RunSpec scalar_spec(Nonlinearity sigma, Scheme scheme, double dt, double u0 = 1.0)
{
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.scheme = scheme;
    cfg.accuracy_limit = 10.0;
    return RunSpec{Box({3}, Boundary::periodic), frozen_walk(), std::move(sigma),
                   InitialProfile::constant(u0), cfg, 77, 0};
}

TEST(ScaleFunction, LinearClosedForm)
{
    EXPECT_NEAR(scale_increment(Nonlinearity::linear(2.0), 1.0, std::exp(3.0)), 1.5, 1e-14);
    EXPECT_NEAR(scale_eval({Nonlinearity::linear(0.5), 2.0}, 2.0), 0.0, 1e-15);
    EXPECT_THROW(scale_increment(Nonlinearity::linear(-1.0), 1.0, 2.0), SingularIntegrand);
}

TEST(ScaleFunction, QuadratureAgainstClosedForms)
{
    const double q = 1.3;
    // int dw / (q tanh w) = log(sinh w) / q.
    const auto th = Nonlinearity::named("tanh", q, q, 0.0);
    for (auto [a, b] : {std::pair{0.1, 2.0}, std::pair{1.0, 0.01}, std::pair{0.5, 30.0}}) {
        const double expect = (std::log(std::sinh(b)) - std::log(std::sinh(a))) / q;
        EXPECT_NEAR(scale_increment(th, a, b), expect, 1e-9 * std::max(1.0, std::abs(expect)));
    }
    // int (1 + w) / (q w) dw = (log(b / a) + b - a) / q.
    const auto sat = Nonlinearity::named("saturating", q, q, 0.0);
    EXPECT_NEAR(scale_increment(sat, 0.2, 5.0), (std::log(25.0) + 4.8) / q, 1e-9);
}

TEST(ScaleFunction, Errors)
{
    const auto pam = Nonlinearity::linear(1.0);
    EXPECT_THROW(scale_increment(pam, 0.0, 1.0), DomainError);
    EXPECT_THROW(scale_eval({pam, 1.0}, -1.0), DomainError);
    // q sin vanishes at pi.
    EXPECT_THROW(scale_increment(Nonlinearity::named("sine", 1, 1, 0), 1.0, 4.0), SingularIntegrand);
}

TEST(ScaleFunction, StrictlyIncreasing)
{
    const auto th = Nonlinearity::named("tanh", 0.7, 0.7, 0.0);
    const ScaleFunction S{th, 1.0};
    double prev = scale_eval(S, 0.05);
    for (double z = 0.1; z < 20.0; z *= 1.7) {
        const double v = scale_eval(S, z);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Clt, ZeroSigmaIsDegenerate)
{
    const std::vector<double> taus{0.04};
    const auto rep = clt_increment_test(scalar_spec(Nonlinearity::linear(0), Scheme::euler, 1e-3),
                                        0.5, taus, {{0}}, 10);
    EXPECT_TRUE(rep.degenerate);
    EXPECT_TRUE(std::isnan(rep.per_tau[0].ks_pooled));
}

TEST(Clt, ScalarGeometricMotionIsGaussian)
{
    // With no drift, S(u_{t+tau}) - S(u_t) = dB - q tau / 2 exactly.
    const std::vector<double> taus{0.04, 0.01};
    const auto rep = clt_increment_test(
        scalar_spec(Nonlinearity::linear(0.5), Scheme::split_exact_linear, 5e-4), 0.2, taus,
        {{-1}, {0}, {1}}, 1500);
    EXPECT_TRUE(rep.valid);
    EXPECT_EQ(rep.discarded, 0u);
    for (const auto& r : rep.per_tau) {
        EXPECT_EQ(r.samples, 4500u);
        EXPECT_LT(r.ks_pooled, r.threshold);
        EXPECT_LT(r.max_abs_correlation, 0.1);
        EXPECT_EQ(r.ks_per_site.size(), 3u);
    }
    EXPECT_THROW(clt_increment_test(scalar_spec(Nonlinearity::linear(0.5), Scheme::euler, 0.01),
                                    0.2, taus, {{0}}, 10),
                 std::invalid_argument);
}

TEST(Clt, InvariantUnderRescalingTheData)
{
    const std::vector<double> taus{0.02};
    auto spec = scalar_spec(Nonlinearity::linear(0.8), Scheme::split_exact_linear, 1e-3);
    spec.box = Box({9}, Boundary::periodic);
    spec.kernel = WalkKernel(JumpDistribution::simple(1));
    const auto base = clt_increment_test(spec, 0.3, taus, {{0}, {2}}, 300);
    spec.u0 = InitialProfile::constant(40.0);
    const auto scaled = clt_increment_test(spec, 0.3, taus, {{0}, {2}}, 300);
    EXPECT_NEAR(base.per_tau[0].ks_pooled, scaled.per_tau[0].ks_pooled, 1e-9);
    EXPECT_NEAR(base.per_tau[0].max_abs_correlation, scaled.per_tau[0].max_abs_correlation, 1e-9);
}

TEST(Rn, ExceedanceFallsAsTauShrinks)
{
    const std::vector<double> taus{0.1, 0.01, 0.001};
    const auto rep = rn_ratio_test(scalar_spec(Nonlinearity::linear(1.0), Scheme::euler, 1e-4),
                                   0.1, taus, {0}, 1000, 0.1);
    ASSERT_EQ(rep.per_tau.size(), 3u);
    EXPECT_TRUE(rep.strictly_decreasing);
    EXPECT_LT(rep.per_tau[2].exceedance, 0.1);
}

TEST(Regime, Examples)
{
    const WalkKernel k3{JumpDistribution::simple(3)};
    const auto diss = regime_classify(0.5, 0.0, k3);
    EXPECT_EQ(diss.regime, Regime::dissipative_bound);
    EXPECT_NEAR(diss.lip_term, 0.25 * 0.758193, 1e-4);
    const auto grow = regime_classify(1.2, 1.2, k3);
    EXPECT_EQ(grow.regime, Regime::growth_bound);
    ASSERT_TRUE(grow.beta_star.has_value());
    EXPECT_GT(*grow.beta_star, 0.0);
    EXPECT_EQ(regime_classify(1.2, 0.5, k3).regime, Regime::indeterminate);
    const auto rec = regime_classify(1.0, 0.5, WalkKernel(JumpDistribution::simple(1)));
    EXPECT_EQ(rec.regime, Regime::no_dissipation_criterion);
    EXPECT_TRUE(std::isinf(rec.upsilon0));
    EXPECT_TRUE(rec.beta_star.has_value());
    EXPECT_THROW(regime_classify(0.5, 1.0, k3), std::invalid_argument);
    EXPECT_EQ(to_string(Regime::dissipative_bound), "dissipative-bound");
}

TEST(Dissipation, HeatFlowDecaysAtTheDiffusiveRate)
{
    // sigma = 0: E ||u_t||^2 = Pbar(t) ~ (4 pi t)^{-1/2}.
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.horizon = 40.0;
    for (double t = 10.0; t <= 40.0; t += 5.0) {
        cfg.record_times.push_back(t);
    }
    const RunSpec spec{Box({301}, Boundary::periodic), WalkKernel(JumpDistribution::simple(1)),
                       Nonlinearity::linear(0.0), InitialProfile::delta({0}), cfg, 5, 0};
    const auto rep = dissipation_experiment(spec, {10.0, 40.0, 2});
    EXPECT_NEAR(rep.fit_slope, -0.5, 0.02);
    EXPECT_EQ(rep.chain_violations, 0u);
    EXPECT_DOUBLE_EQ(rep.target_exponent, -0.5);
    EXPECT_NEAR(rep.max_l1, 1.0, 1e-12);
    ASSERT_EQ(rep.warnings.size(), 1u);  // 1-d walk is not transient
}

TEST(Dissipation, NormChainHoldsUnderNoise)
{
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.horizon = 2.0;
    cfg.scheme = Scheme::split_exact_linear;
    const RunSpec spec{Box({5, 5}, Boundary::periodic), WalkKernel(JumpDistribution::simple(2)),
                       Nonlinearity::linear(1.5), InitialProfile::delta({0, 0}), cfg, 5, 0};
    const auto rep = dissipation_experiment(spec, {0.5, 2.0, 50});
    EXPECT_EQ(rep.chain_violations, 0u);
    for (double f : rep.norms.negfrac_mean) {
        EXPECT_EQ(f, 0.0);
    }
}

} // namespace
} // namespace she
