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
#include "she/nonlinearity.hpp"
#include "she/solver.hpp"
#include "she/walk_kernel.hpp"

namespace she {

/// Everything needed to build a Simulator; experiment drivers override the
/// horizon, record times and marked points.
struct RunSpec {
    Box box;
    WalkKernel kernel;
    Nonlinearity sigma;
    InitialProfile u0;
    SolverConfig config;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

Simulator make_simulator(const RunSpec& spec);

/// S(z) = int_{z0}^{z} dw / sigma(w) for z > 0.
struct ScaleFunction {
    Nonlinearity sigma;
    double z0 = 1.0;
};

/// Closed form for linear sigma, adaptive Gauss-Kronrod (relative tolerance
/// 1e-10) otherwise. Throws DomainError for z <= 0 and SingularIntegrand
/// when sigma vanishes between z0 and z.
double scale_eval(const ScaleFunction& S, double z);

/// Increment S(b) - S(a) without a fixed base point.
double scale_increment(const Nonlinearity& sigma, double a, double b);

struct CltTauResult {
    double tau = 0.0;
    double ks_pooled = 0.0;
    std::vector<double> ks_per_site;
    double max_abs_correlation = 0.0;
    std::vector<double> correlations;  // pairs (i < j) of sites
    double threshold = 0.0;            // relaxed KS critical value for the pooled sample
    std::size_t samples = 0;
    // Envelope export, no verdict: sqrt(2 tau log log(1/tau)) (NaN for
    // tau >= 1/e) against quantiles of |S(u_{t+tau}) - S(u_t)|.
    double lil_envelope = 0.0;
    double abs_increment_q50 = 0.0;
    double abs_increment_q99 = 0.0;
    double abs_increment_max = 0.0;
};

struct CltReport {
    double t = 0.0;
    std::vector<LatticePoint> points;
    std::vector<CltTauResult> per_tau;
    std::size_t replicas = 0;
    std::size_t discarded = 0;
    double discard_fraction = 0.0;
    bool valid = true;       // discard fraction below 1%
    bool degenerate = false; // eta identically zero
    double ks_relaxation = 1.5;
};

struct CltOptions {
    double ks_relaxation = 1.5;
    double max_discard_fraction = 0.01;
};

/// Kolmogorov-Smirnov comparison of eta_tau(x) = [S(u_{t+tau}(x)) - S(u_t(x))] / sqrt(tau)
/// with the standard normal, pooled and per site, plus cross-site
/// correlations.
CltReport clt_increment_test(const RunSpec& spec, double t, std::span<const double> taus,
                             const std::vector<LatticePoint>& points, std::size_t replicas,
                             const CltOptions& options = {});

struct RnTauResult {
    double tau = 0.0;
    double exceedance = 0.0;
    double se = 0.0;
    std::size_t samples = 0;
    std::size_t discarded = 0;
};

struct RnReport {
    double t = 0.0;
    double eta = 0.1;
    std::vector<RnTauResult> per_tau;
    bool strictly_decreasing = false;
};

/// P{|R(tau) - sigma(u_t(x))| > eta (1 + |sigma(u_t(x))|)} with
/// R(tau) = [u_{t+tau}(x) - u_t(x)] / [B_{t+tau}(x) - B_t(x)].
RnReport rn_ratio_test(const RunSpec& spec, double t, std::span<const double> taus,
                       const LatticePoint& x, std::size_t replicas, double eta = 0.1);

/// Monte Carlo means over replicas of the norms of u_t.
struct NormTrajectory {
    std::vector<double> times;
    std::vector<double> l1_mean, l1_se;
    std::vector<double> l2sq_mean, l2sq_se;
    std::vector<double> sup_mean, sup_se;
    std::vector<double> negfrac_mean;
};

struct DissipationReport {
    NormTrajectory norms;
    double fit_slope = 0.0;
    double fit_slope_se = 0.0;
    double fit_start = 0.0;
    double fit_end = 0.0;
    std::size_t fit_points = 0;
    double target_exponent = 0.0;  // -d/2
    std::size_t chain_violations = 0;
    double max_l1 = 0.0;  // max over replicas and recorded times
    std::vector<std::string> warnings;
};

struct DissipationOptions {
    double fit_start = 10.0;
    double fit_end = 40.0;
    std::size_t replicas = 2000;
};

/// Records the norms on the configured record grid, checks the chain
/// sup^2 <= l2^2 <= sup * l1 per replica and time, and fits the log-log
/// slope of E ||u_t||^2 over the window (restricted to the wrap-safe
/// horizon).
DissipationReport dissipation_experiment(const RunSpec& spec, const DissipationOptions& options);

enum class Regime { dissipative_bound, growth_bound, indeterminate, no_dissipation_criterion };

std::string to_string(Regime r);

struct RegimeReport {
    Regime regime = Regime::indeterminate;
    double upsilon0 = 0.0;
    double lip_term = 0.0;  // lip^2 Upsilon(0)
    double ell_term = 0.0;  // ell^2 Upsilon(0)
    std::optional<double> beta_star;
};

RegimeReport regime_classify(double lip, double ell, const WalkKernel& kernel);

} // namespace she
