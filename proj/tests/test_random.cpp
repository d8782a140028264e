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

#include "she/random.hpp"
#include "she/stats.hpp"

namespace she {
namespace {

TEST(Philox, KnownAnswers)
{
    // Published Random123 known-answer vectors for philox4x32-10.
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
              (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UnitMapStaysOpen)
{
    EXPECT_GT(to_unit_open(0), 0.0);
    EXPECT_LT(to_unit_open(0xffffffffu), 1.0);
}

TEST(NoisePlan, PureFunctionOfKey)
{
    const NoisePlan a(42, 1e-3);
    const NoisePlan b(42, 1e-3);
    for (std::uint32_t r : {0u, 7u}) {
        for (std::uint32_t x : {0u, 1u, 5u, 1000u}) {
            for (std::uint64_t n : {0ull, 3ull, (1ull << 33) + 5}) {
                EXPECT_EQ(a.standard_normal(r, x, n), b.standard_normal(r, x, n));
            }
        }
    }
    EXPECT_NE(a.standard_normal(0, 0, 0), NoisePlan(43, 1e-3).standard_normal(0, 0, 0));
    EXPECT_NE(a.standard_normal(0, 0, 0), a.standard_normal(1, 0, 0));
    EXPECT_NE(a.standard_normal(0, 0, 0), a.standard_normal(0, 0, 1));
    // High bits of the step counter must matter.
    EXPECT_NE(a.standard_normal(0, 0, 5), a.standard_normal(0, 0, (1ull << 33) + 5));
}

TEST(NoisePlan, CoarseIncrementsAreSumsOfFineOnes)
{
    const double fine = 1e-3;
    const NoisePlan plan(9, fine);
    const std::uint32_t factor = plan.refinement(4e-3);
    ASSERT_EQ(factor, 4u);
    std::vector<double> coarse(6);
    plan.increments(2, 3, factor, coarse);
    for (std::uint32_t x = 0; x < coarse.size(); ++x) {
        double sum = 0.0;
        for (std::uint64_t n = 12; n < 16; ++n) {
            sum += std::sqrt(fine) * plan.standard_normal(2, x, n);
        }
        EXPECT_NEAR(coarse[x], sum, 1e-14);
    }
    EXPECT_THROW(plan.refinement(1.5e-3), std::invalid_argument);
}

TEST(NoisePlan, IncrementsHaveVarianceDt)
{
    const NoisePlan plan(3, 1e-2);
    std::vector<double> all;
    std::vector<double> buf(50);
    for (std::uint64_t n = 0; n < 400; ++n) {
        plan.increments(0, n, 1, buf);
        all.insert(all.end(), buf.begin(), buf.end());
    }
    double m2 = 0.0;
    for (double v : all) {
        m2 += v * v;
    }
    m2 /= static_cast<double>(all.size());
    // n = 20000, sd of the sample variance ~ sqrt(2 / n) * 1e-2.
    EXPECT_NEAR(m2, 1e-2, 5.0 * std::sqrt(2.0 / all.size()) * 1e-2);
    std::vector<double> z;
    for (double v : all) {
        z.push_back(v / 0.1);
    }
    EXPECT_LT(ks_statistic(z, normal_cdf), 1.63 / std::sqrt(static_cast<double>(z.size())));
}

TEST(StreamRng, ExponentialMean)
{
    StreamRng rng(5, StreamTag::misc, 1);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += rng.exponential(2.0);
    }
    EXPECT_NEAR(sum / n, 0.5, 5.0 * 0.5 / std::sqrt(n));
}

TEST(StreamRng, StreamsAreDisjoint)
{
    StreamRng a(5, StreamTag::walk_path, 1, 0);
    StreamRng b(5, StreamTag::walk_path, 1, 1);
    StreamRng c(5, StreamTag::bootstrap, 1, 0);
    const auto x = a.next_u32();
    EXPECT_NE(x, b.next_u32());
    EXPECT_NE(x, c.next_u32());
    StreamRng a2(5, StreamTag::walk_path, 1, 0);
    EXPECT_EQ(x, a2.next_u32());
}

} // namespace
} // namespace she
