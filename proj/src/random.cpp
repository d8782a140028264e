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

#include "she/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace she {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

PhiloxKey key_from_seed(std::uint64_t seed) noexcept
{
    return {static_cast<std::uint32_t>(seed),
            static_cast<std::uint32_t>(seed >> 32)};
}

} // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::array<double, 4> normals_from_block(const PhiloxCounter& block) noexcept
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::array<double, 4> z;
    for (int pair = 0; pair < 2; ++pair) {
        const double r = std::sqrt(-2.0 * std::log(to_unit_open(block[2 * pair])));
        const double theta = two_pi * to_unit_open(block[2 * pair + 1]);
        z[2 * pair] = r * std::cos(theta);
        z[2 * pair + 1] = r * std::sin(theta);
    }
    return z;
}

NoisePlan::NoisePlan(std::uint64_t seed, double fine_dt)
    : seed_(seed), key_(key_from_seed(seed)), fine_dt_(fine_dt)
{
    if (!(fine_dt > 0.0)) {
        throw std::invalid_argument("NoisePlan: fine_dt must be positive");
    }
}

PhiloxCounter NoisePlan::counter(std::uint32_t block, std::uint64_t fine_step,
                                 std::uint32_t replica) const noexcept
{
    return {block, static_cast<std::uint32_t>(fine_step), replica,
            (static_cast<std::uint32_t>(fine_step >> 32) << 8) |
                static_cast<std::uint32_t>(StreamTag::field_noise)};
}

double NoisePlan::standard_normal(std::uint32_t replica, std::uint32_t site,
                                  std::uint64_t fine_step) const noexcept
{
    const auto z = normals_from_block(philox4x32(counter(site / 4, fine_step, replica), key_));
    return z[site % 4];
}

std::uint32_t NoisePlan::refinement(double dt) const
{
    const double ratio = dt / fine_dt_;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
        throw std::invalid_argument(
            "NoisePlan: dt must be a positive integer multiple of the noise resolution");
    }
    return static_cast<std::uint32_t>(rounded);
}

void NoisePlan::increments(std::uint32_t replica, std::uint64_t coarse_step,
                           std::uint32_t factor, std::span<double> out) const noexcept
{
    const std::size_t n = out.size();
    const double scale = std::sqrt(fine_dt_);
    const std::uint64_t first = coarse_step * factor;
    for (std::size_t base = 0; base < n; base += 4) {
        const auto block = static_cast<std::uint32_t>(base / 4);
        std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
        for (std::uint32_t j = 0; j < factor; ++j) {
            const auto z = normals_from_block(philox4x32(counter(block, first + j, replica), key_));
            for (int i = 0; i < 4; ++i) {
                acc[i] += z[i];
            }
        }
        const std::size_t len = std::min<std::size_t>(4, n - base);
        for (std::size_t i = 0; i < len; ++i) {
            out[base + i] = scale * acc[i];
        }
    }
}

StreamRng::StreamRng(std::uint64_t seed, StreamTag tag, std::uint32_t a,
                     std::uint32_t b) noexcept
    : key_(key_from_seed(seed)), tag_(static_cast<std::uint32_t>(tag)), a_(a), b_(b)
{
}

std::uint32_t StreamRng::next_u32() noexcept
{
    if (used_ == 4) {
        buffer_ = philox4x32({index_++, a_, b_, tag_}, key_);
        used_ = 0;
    }
    return buffer_[used_++];
}

double StreamRng::exponential(double rate) noexcept
{
    return -std::log(uniform()) / rate;
}

double StreamRng::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

} // namespace she
