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

#include "she/picard.hpp"
#include "she/solver.hpp"

namespace she {
namespace {

const WalkKernel kSimple1{JumpDistribution::simple(1)};

TEST(Picard, ZeroNoiseGivesTheSemigroup)
{
    const Box box({15}, Boundary::periodic);
    const PicardOracle oracle(box, kSimple1, Nonlinearity::linear(0.0), InitialProfile::delta({0}),
                              0.5, 0.125, NoisePlan(1, 0.125), 0);
    const auto res = oracle.solve();
    const int origin[] = {0};
    const std::size_t s0 = box.index(origin);
    for (std::size_t i = 0; i < oracle.grid_points(); ++i) {
        const double t = 0.125 * static_cast<double>(i);
        EXPECT_NEAR(res.path[i][s0], transition_prob(kSimple1, t, origin).value, 1e-10);
    }
    EXPECT_LE(res.iterations, 2u);
}

TEST(Picard, OneStepFormula)
{
    // Two grid points: u_dt = P_dt u0 + P_dt (sigma(u0) dB_0).
    const Box box({9}, Boundary::periodic);
    const double dt = 0.1;
    const NoisePlan noise(3, dt);
    const auto sigma = Nonlinearity::linear(0.7);
    const PicardOracle oracle(box, kSimple1, sigma, InitialProfile::constant(2.0), dt, dt, noise, 5);
    const auto res = oracle.solve();
    std::vector<double> dB(box.sites());
    noise.increments(5, 0, 1, dB);
    for (std::size_t y = 0; y < box.sites(); ++y) {
        double expect = 2.0;
        for (std::size_t x = 0; x < box.sites(); ++x) {
            for (int image = -1; image <= 1; ++image) {
                const int d[] = {box.point(x)[0] - box.point(y)[0] + 9 * image};
                expect += transition_prob(kSimple1, dt, d).value * 0.7 * 2.0 * dB[x];
            }
        }
        EXPECT_NEAR(res.path[1][y], expect, 1e-12);
    }
}

TEST(Picard, FixedPointAndContraction)
{
    const Box box({9}, Boundary::periodic);
    const PicardOracle oracle(box, kSimple1, Nonlinearity::named("tanh", 1.0, 1.0, 0.0),
                              InitialProfile::constant(1.0), 0.5, 1.0 / 64, NoisePlan(2, 1.0 / 64),
                              1);
    const auto res = oracle.solve(1e-12);
    const auto again = oracle.iterate(res.path);
    double diff = 0.0;
    for (std::size_t i = 0; i < again.size(); ++i) {
        for (std::size_t x = 0; x < again[i].size(); ++x) {
            diff = std::max(diff, std::abs(again[i][x] - res.path[i][x]));
        }
    }
    EXPECT_LT(diff, 1e-11);
    EXPECT_LT(res.contraction, 1.0);
}

TEST(Picard, AgreesWithTheTimeStepper)
{
    const Box box({9}, Boundary::periodic);
    const auto pam = Nonlinearity::linear(1.0);
    const double dt = 1.0 / 256;
    const NoisePlan noise(17, dt);
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.horizon = 0.5;
    cfg.scheme = Scheme::euler;
    cfg.snapshot_times = {0.5};
    double worst = 0.0;
    for (std::uint32_t r = 0; r < 4; ++r) {
        const PicardOracle oracle(box, kSimple1, pam, InitialProfile::constant(1.0), 0.5, dt, noise,
                                  r);
        const auto res = oracle.solve();
        const auto tr = simulate(box, kSimple1, pam, cfg, InitialProfile::constant(1.0), noise, r);
        const auto& snap = tr.snapshot_at(0.5).values;
        for (std::size_t x = 0; x < snap.size(); ++x) {
            worst = std::max(worst, std::abs(snap[x] - res.path.back()[x]) / std::abs(snap[x]));
        }
    }
    EXPECT_LT(worst, 0.05);
}

TEST(Picard, Rejections)
{
    EXPECT_THROW(PicardOracle(Box({9}, Boundary::frozen), kSimple1, Nonlinearity::linear(1),
                              InitialProfile::constant(1), 0.5, 0.1, NoisePlan(1, 0.1), 0),
                 std::invalid_argument);
    EXPECT_THROW(PicardOracle(Box({9}, Boundary::periodic), kSimple1, Nonlinearity::linear(1),
                              InitialProfile::constant(1), 0.55, 0.1, NoisePlan(1, 0.1), 0),
                 std::invalid_argument);
}

} // namespace
} // namespace she
