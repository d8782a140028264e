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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "she/random.hpp"

namespace she {

using LatticePoint = std::vector<int>;

struct Jump {
    LatticePoint vec;
    double mass;
};

/// Law of a single jump Z_1 of the driving walk: finitely many lattice
/// vectors with positive masses summing to one.
class JumpDistribution {
public:
    JumpDistribution(int dim, std::vector<Jump> jumps);

    /// Nearest-neighbour walk: each of the 2d unit vectors with mass 1/(2d).
    static JumpDistribution simple(int dim);

    int dim() const noexcept { return dim_; }
    const std::vector<Jump>& jumps() const noexcept { return jumps_; }

    /// Largest sup-norm over the support.
    int max_norm() const noexcept { return max_norm_; }
    /// E|Z_1|^2 (Euclidean).
    double second_moment() const noexcept;
    /// Rank of the subgroup of Z^d generated by the support.
    int rank() const noexcept { return rank_; }
    /// True when the support generates Z^d as a group, i.e. the symmetrized
    /// walk is irreducible and Re phi(xi) = 1 only at xi = 0 on the torus.
    bool generates_lattice() const noexcept { return generates_; }

private:
    int dim_;
    std::vector<Jump> jumps_;
    int max_norm_ = 0;
    int rank_ = 0;
    bool generates_ = false;
};

/// Continuous-time random walk with jump law `jumps` at rate `rate`.
struct WalkKernel {
    JumpDistribution jumps;
    double rate = 1.0;
    /// User assertion that the symmetrized walk is transient.
    bool transient_asserted = false;

    explicit WalkKernel(JumpDistribution j, double r = 1.0, bool transient = false);

    int dim() const noexcept { return jumps.dim(); }

    /// Transient symmetrized walk: asserted, or d >= 3 with a genuinely
    /// d-dimensional support (finite support means recurrence for d <= 2).
    bool symmetrized_transient() const noexcept;
};

/// phi(xi) = E exp(i xi . Z_1).
std::complex<double> char_function(const WalkKernel& kernel, std::span<const double> xi);

/// 1 - Re phi(xi), evaluated without cancellation near xi = 0.
double symbol(const JumpDistribution& jumps, std::span<const double> xi) noexcept;

/// p_t on the cube of half-width `radius` around the origin, from the
/// truncated Poisson series. `truncation_bound` bounds the omitted mass,
/// hence also the pointwise error and the normalization defect.
struct TransitionTable {
    int dim = 0;
    int radius = 0;
    double t = 0.0;
    std::size_t series_terms = 0;
    double truncation_bound = 0.0;
    std::vector<double> values;

    /// Zero for points outside the table (their mass is inside the bound).
    double at(std::span<const int> x) const noexcept;
    std::size_t side() const noexcept { return static_cast<std::size_t>(2 * radius + 1); }
};

/// Smallest N with e^{-mu} sum_{n>N} mu^n/n! < tol, and that tail.
struct PoissonCut {
    std::size_t terms;
    double tail;
};
PoissonCut poisson_truncation(double mu, double tol);

TransitionTable transition_table(const WalkKernel& kernel, double t, double tol = 1e-12);

struct ProbabilityValue {
    double value;
    double truncation_bound;
};

/// p_t(x) = P{X_t = x}.
ProbabilityValue transition_prob(const WalkKernel& kernel, double t,
                                 std::span<const int> x, double tol = 1e-12);

struct QuadratureValue {
    double value;
    double est_error;
};

/// Tensor Gauss-Legendre rule on [-pi, pi]^d with nested cubes refining
/// towards xi = 0. Weights include the (2 pi)^{-d} normalization.
class FourierGrid {
public:
    struct Spec {
        int panels = 8;  // per axis on the outer grid
        int levels = 8;  // nested refinement cubes around the origin
        int order = 8;   // Gauss-Legendre points per panel and axis
    };

    FourierGrid(const JumpDistribution& jumps, Spec spec, bool keep_nodes = false);

    const Spec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return weights_.size(); }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> symbols() const noexcept { return symbols_; }
    /// Flattened node coordinates (only with keep_nodes).
    std::span<const double> nodes() const noexcept { return nodes_; }
    int dim() const noexcept { return dim_; }

    /// Sum of w * f(s) over nodes, excluding the innermost cube when
    /// `singular_origin` and adding the homogeneous tail estimate for it
    /// (integrand ~ |xi|^{-2}).
    template <class F>
    double integrate(F&& f, bool singular_origin = false) const;

private:
    int dim_;
    Spec spec_;
    std::vector<double> weights_;
    std::vector<double> symbols_;
    std::vector<double> nodes_;
    std::vector<int> level_;  // -1 outer, 0..levels-1 annuli, levels = core
};

/// Replica overlap Pbar(tau) = sum_x p_tau(x)^2 via the Fourier integral.
QuadratureValue pbar(const WalkKernel& kernel, double tau, double tol = 1e-10);

/// Pbar on a family of tau sharing one grid, so the curve is exactly
/// nonincreasing.
std::vector<QuadratureValue> pbar_curve(const WalkKernel& kernel, std::span<const double> taus,
                                        double tol = 1e-10);

/// ||P_t u_0||^2_{l2} = (2 pi)^{-d} int |u_0^(xi)|^2 exp(-2 t (1 - Re phi(xi))) dxi for a
/// finitely supported profile given as (point, value) pairs; equals Pbar for
/// a unit delta.
std::vector<QuadratureValue> overlap_curve(
    const WalkKernel& kernel, std::span<const double> taus,
    const std::vector<std::pair<LatticePoint, double>>& profile, double tol = 1e-10);

/// Pbar via the lattice sum of squared transition probabilities.
double pbar_lattice_sum(const WalkKernel& kernel, double tau, double tol = 1e-13);

/// Laplace transform of Pbar. Returns +infinity for beta = 0 unless the
/// symmetrized walk is transient.
QuadratureValue upsilon(const WalkKernel& kernel, double beta, double tol = 1e-9);

std::vector<QuadratureValue> upsilon_curve(const WalkKernel& kernel, std::span<const double> betas,
                                           double tol = 1e-9);

/// Grid fine enough for Upsilon on [beta_min, inf), reused by root finders.
FourierGrid upsilon_grid(const WalkKernel& kernel, double beta_min, double tol = 1e-9);
double upsilon_on_grid(const FourierGrid& grid, double beta);

/// Piecewise-constant path of X on [0, horizon].
struct WalkPath {
    int dim = 0;
    double horizon = 0.0;
    std::vector<double> jump_times;  // increasing, all <= horizon
    std::vector<int> coords;         // (jump_times.size() + 1) * dim, starting at 0

    std::size_t states() const noexcept { return jump_times.size() + 1; }
    std::span<const int> state(std::size_t i) const noexcept
    {
        return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    std::span<const int> final_position() const noexcept { return state(states() - 1); }
};

WalkPath sample_walk_path(const WalkKernel& kernel, double horizon, StreamRng& rng);

/// Total time in [0, horizon] during which two paths occupy the same site.
double overlap_time(const WalkPath& a, const WalkPath& b);

// ---------------------------------------------------------------------------

template <class F>
double FourierGrid::integrate(F&& f, bool singular_origin) const
{
    // Accumulate per level so that the tail correction uses the last annulus.
    std::vector<double> by_level(static_cast<std::size_t>(spec_.levels) + 2, 0.0);
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const int lvl = level_[i];
        if (singular_origin && lvl == spec_.levels) {
            continue;
        }
        by_level[static_cast<std::size_t>(lvl + 1)] += weights_[i] * f(symbols_[i]);
    }
    double total = 0.0;
    for (double v : by_level) {
        total += v;
    }
    if (singular_origin && spec_.levels > 0) {
        // Each halving of the cube scales a degree -2 integrand by 2^{2-d}.
        const double ratio = std::ldexp(1.0, 2 - dim_);
        if (ratio < 1.0) {
            total += by_level[static_cast<std::size_t>(spec_.levels)] * ratio / (1.0 - ratio);
        }
    }
    return total;
}

} // namespace she
