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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "she/lattice.hpp"
#include "she/solver.hpp"
#include "she/walk_kernel.hpp"

namespace she {

enum class MomentMethod { field_mc, feynman_kac, renewal };

std::string to_string(MomentMethod m);

/// Estimate of E|u_t(x)|^k, or of sum_x E|u_t(x)|^k when `summed`.
struct MomentEstimate {
    int k = 1;
    double t = 0.0;
    LatticePoint x;
    bool summed = false;
    double estimate = 0.0;
    double se = 0.0;
    std::size_t replicas = 0;
    MomentMethod method = MomentMethod::field_mc;
};

/// Sample mean of |u_t(x)|^k over replicas 0..replicas-1 of `sim`. The
/// standard error is the delete-one jackknife of the mean (= sd / sqrt(n)).
/// Throws std::invalid_argument when t is not a snapshot time of the run.
MomentEstimate estimate_field_moment(const Simulator& sim, int k, double t,
                                     const LatticePoint& x, std::size_t replicas,
                                     unsigned threads = 0);

/// Monte Carlo estimate of E ||u_t||^2_{l2} from the recorded l2sq column.
MomentEstimate estimate_field_l2(const Simulator& sim, double t, std::size_t replicas,
                                 unsigned threads = 0);

/// k independent walk paths on [0, t] with their pairwise overlap times.
struct CollisionRecord {
    std::vector<WalkPath> paths;
    std::vector<double> overlaps;  // pairs (i < j) in lexicographic order

    double total_overlap() const noexcept;
};

CollisionRecord sample_collisions(const WalkKernel& kernel, int k, double t, std::uint64_t seed,
                                  std::uint32_t replica, std::uint32_t salt = 0);

struct FeynmanKacOptions {
    std::uint64_t seed = 1;
    /// Separates independent estimates that share a seed.
    std::uint32_t salt = 0;
    unsigned threads = 0;
};

/// E|v_t(x)|^k for sigma(u) = q u as the average of
/// prod_j u0(x + X^j_t) exp(q^2 sum_{i<j} L_ij(t)), with exact overlap times.
MomentEstimate fk_pam_moment(const WalkKernel& kernel, double q, const InitialProfile& u0, int k,
                             double t, const LatticePoint& x, std::size_t replicas,
                             const FeynmanKacOptions& options = {});

/// Same estimator summed over x in Z^d (finitely supported u0 only).
MomentEstimate fk_pam_moment_summed(const WalkKernel& kernel, double q, const InitialProfile& u0,
                                    int k, double t, std::size_t replicas,
                                    const FeynmanKacOptions& options = {});

/// F(t) = E ||u_t||^2 for the linear model on a uniform grid, from
/// F = ||P_t u0||^2 + q^2 (Pbar * F).
struct RenewalCurve {
    std::vector<double> times;
    std::vector<double> values;
    double halving_error = 0.0;
};

RenewalCurve pam_second_moment_renewal(const WalkKernel& kernel, double q,
                                       const InitialProfile& u0, double horizon, double step,
                                       double tol = 1e-6);

struct LyapunovFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    std::size_t points = 0;
};

/// Least-squares slope of log-moment against t over [window_start,
/// window_end] with a 95% bootstrap interval. With standard errors of the
/// log-moments the bootstrap is parametric, otherwise it resamples pairs.
LyapunovFit fit_lyapunov(std::span<const double> times, std::span<const double> log_moments,
                         std::span<const double> log_se, double window_start, double window_end,
                         std::size_t resamples = 2000, std::uint64_t seed = 7);

enum class K2Verdict { within_bounds, violates_upper, violates_lower, k_below_threshold };

std::string to_string(K2Verdict v);

struct GrowthRate {
    int k = 2;
    double gamma = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct K2Check {
    int k = 2;
    double upper_bound = 0.0;     // 8 Lip^2 k^2
    double lower_threshold = 0.0; // 1/eps + 1/(eps ell^2), +inf when ell = 0
    double lower_bound = 0.0;     // (1 - eps) ell^2 k^2
    K2Verdict verdict = K2Verdict::within_bounds;
};

/// Compares estimated growth rates with 8 Lip^2 k^2 from above and, once
/// k >= 1/eps + 1/(eps ell^2), with (1 - eps) ell^2 k^2 from below.
std::vector<K2Check> check_k2_bounds(std::span<const GrowthRate> rates, double lip, double ell,
                                     double eps);

} // namespace she
