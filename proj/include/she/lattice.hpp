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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "she/walk_kernel.hpp"

namespace she {

enum class Boundary { periodic, frozen };

Boundary parse_boundary(const std::string& name);
std::string to_string(Boundary b);

/// Finite window of Z^d. Axis a covers lo_a .. lo_a + extent_a - 1 with
/// lo_a = -(extent_a / 2), so odd extents are centred on the origin.
class Box {
public:
    Box(std::vector<int> extents, Boundary boundary);

    int dim() const noexcept { return static_cast<int>(extents_.size()); }
    const std::vector<int>& extents() const noexcept { return extents_; }
    Boundary boundary() const noexcept { return boundary_; }
    std::size_t sites() const noexcept { return sites_; }

    LatticePoint point(std::size_t site) const;
    /// Site index of x, or sites() when x lies outside (frozen boxes).
    /// Periodic boxes wrap.
    std::size_t index(std::span<const int> x) const;
    bool contains(std::span<const int> x) const noexcept;

    /// (extent_min / (2 * max_jump))^2.
    double wrap_safe_horizon(const JumpDistribution& jumps) const noexcept;

private:
    std::vector<int> extents_;
    std::vector<int> lo_;
    Boundary boundary_;
    std::size_t sites_;
};

/// Initial profile u_0 on all of Z^d.
class InitialProfile {
public:
    static InitialProfile delta(LatticePoint at, double mass = 1.0);
    static InitialProfile constant(double c);
    static InitialProfile table(std::vector<std::pair<LatticePoint, double>> entries);

    double operator()(std::span<const int> x) const;

    /// Finite support (delta or table); constant profiles have none.
    bool finite_support() const noexcept { return kind_ != Kind::constant; }
    /// Support points with their values (finite-support profiles only).
    const std::vector<std::pair<LatticePoint, double>>& entries() const noexcept { return entries_; }
    bool nonnegative() const noexcept;
    double l1_norm() const;

    std::vector<double> on_box(const Box& box) const;

private:
    enum class Kind { constant, table };
    Kind kind_ = Kind::constant;
    double c_ = 0.0;
    std::vector<std::pair<LatticePoint, double>> entries_;
};

/// Neighbour tables for the generator on a box.
/// For frozen boxes jumps leaving the box read the fixed exterior value.
class Stencil {
public:
    Stencil(const Box& box, const JumpDistribution& jumps, const InitialProfile& exterior);

    std::size_t sites() const noexcept { return sites_; }
    std::size_t jump_count() const noexcept { return masses_.size(); }

    /// (L f)(x) = sum_z mass(z) [f(x+z) - f(x)].
    void apply(std::span<const double> f, std::span<double> out) const noexcept;

    /// g = (I + dt L) f written with nonnegative coefficients, so the map is
    /// monotone even after rounding (requires dt * (1 - mass(0)) <= 1).
    void drift_step(std::span<const double> f, double dt, std::span<double> out) const noexcept;

private:
    double neighbour(std::size_t k, std::size_t site, std::span<const double> f) const noexcept
    {
        const std::size_t j = nbr_[k * sites_ + site];
        return j < sites_ ? f[j] : exterior_[k * sites_ + site];
    }

    std::size_t sites_;
    std::vector<double> masses_;
    std::vector<std::size_t> nbr_;      // jump-major
    std::vector<double> exterior_;      // frozen boundary values, jump-major
    bool has_zero_jump_ = false;
    double zero_mass_ = 0.0;
};

} // namespace she
