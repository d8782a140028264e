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

#include <array>
#include <cstdint>
#include <span>

namespace she {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., SC'11).
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Maps a 32-bit word to the open interval (0, 1).
inline double to_unit_open(std::uint32_t x) noexcept
{
    return (static_cast<double>(x) + 0.5) * 0x1.0p-32;
}

/// Four standard normals from one Philox block (two Box-Muller pairs).
std::array<double, 4> normals_from_block(const PhiloxCounter& block) noexcept;

/// Stream tags keep the field noise and auxiliary streams disjoint.
enum class StreamTag : std::uint32_t {
    field_noise = 0,
    walk_path = 1,
    bootstrap = 2,
    misc = 3,
};

/// Counter-keyed Gaussian field. The standard normal attached to
/// (replica r, site x, fine step n) is a pure function of (seed, r, x, n);
/// increments over a coarse step are sums over the fine steps it covers, so
/// runs at different dt share one Brownian path.
class NoisePlan {
public:
    NoisePlan(std::uint64_t seed, double fine_dt);

    std::uint64_t seed() const noexcept { return seed_; }
    double fine_dt() const noexcept { return fine_dt_; }

    /// Standard normal for one (replica, site, fine step).
    double standard_normal(std::uint32_t replica, std::uint32_t site,
                           std::uint64_t fine_step) const noexcept;

    /// Number of fine steps per coarse step of length dt; throws if dt is not
    /// an integer multiple of fine_dt (relative tolerance 1e-9).
    std::uint32_t refinement(double dt) const;

    /// Brownian increments B_{(n+1)dt}(x) - B_{n dt}(x) for all sites, where
    /// dt = factor * fine_dt.
    void increments(std::uint32_t replica, std::uint64_t coarse_step,
                    std::uint32_t factor, std::span<double> out) const noexcept;

private:
    PhiloxCounter counter(std::uint32_t block, std::uint64_t fine_step,
                          std::uint32_t replica) const noexcept;

    std::uint64_t seed_;
    PhiloxKey key_;
    double fine_dt_;
};

/// Sequential generator over a private Philox stream identified by
/// (seed, tag, a, b). Used where draws are consumed in order (walk paths,
/// bootstrap resampling).
class StreamRng {
public:
    StreamRng(std::uint64_t seed, StreamTag tag, std::uint32_t a,
              std::uint32_t b = 0) noexcept;

    std::uint32_t next_u32() noexcept;
    double uniform() noexcept { return to_unit_open(next_u32()); }
    double exponential(double rate) noexcept;
    double normal() noexcept;

private:
    PhiloxKey key_;
    std::uint32_t tag_;
    std::uint32_t a_;
    std::uint32_t b_;
    std::uint32_t index_ = 0;
    PhiloxCounter buffer_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace she
