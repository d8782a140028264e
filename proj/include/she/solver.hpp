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
#include "she/random.hpp"
#include "she/walk_kernel.hpp"

namespace she {

enum class Scheme { euler, split_exact_linear };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

struct ObservableSet {
    bool l1 = true;
    bool l2sq = true;
    bool sup = true;
    bool negfrac = true;
    bool site_values = true;  // u_t at the marked points
    bool brownian = false;    // B_t at the marked points
};

struct SolverConfig {
    double dt = 1e-3;
    double horizon = 1.0;
    Scheme scheme = Scheme::euler;
    /// Resolution of the Brownian path; 0 means dt. dt must be a multiple.
    double noise_dt = 0.0;
    /// Times at which observables are recorded, exactly as listed. When empty,
    /// every `record_every` steps plus t = 0 and the horizon.
    std::vector<double> record_times;
    std::size_t record_every = 1;
    std::vector<double> snapshot_times;
    std::vector<LatticePoint> marked_points;
    ObservableSet observables;
    /// Upper bound on dt * Lip^2.
    double accuracy_limit = 0.1;
};

/// Throws std::invalid_argument listing the first violated constraint.
void validate(const SolverConfig& config, const Nonlinearity& sigma);

struct FieldState {
    double time = 0.0;
    std::size_t step = 0;
    std::vector<double> values;
};

/// One Euler-Maruyama step u + dt L u + sigma(u) dB.
FieldState em_step(const Stencil& stencil, const Nonlinearity& sigma, const FieldState& state,
                   double dt, std::span<const double> increments);

/// Lie splitting for sigma(u) = q u: monotone drift step followed by the
/// exact geometric factor exp(q dB - q^2 dt / 2).
FieldState split_step_linear(const Stencil& stencil, const Nonlinearity& sigma,
                             const FieldState& state, double dt,
                             std::span<const double> increments);

struct Snapshot {
    double time;
    std::vector<double> values;
};

struct Trajectory {
    std::uint32_t replica = 0;
    std::vector<std::string> columns;
    std::vector<double> times;
    std::vector<std::vector<double>> rows;  // one per recorded time
    std::vector<Snapshot> snapshots;
    std::vector<std::string> warnings;

    std::size_t column(const std::string& name) const;
    double value(std::size_t row, const std::string& name) const { return rows[row][column(name)]; }
    /// Row recorded at time t (within 1e-9).
    std::size_t row_at(double t) const;
    const Snapshot& snapshot_at(double t) const;
};

struct CoupledTrajectory {
    Trajectory u;
    Trajectory v;
    /// Per step n = 1..N: max_x (v - u)_+ and the fraction of sites with v > u.
    std::vector<double> max_violation;
    std::vector<double> violating_fraction;

    double worst_violation() const noexcept;
};

/// Time-steps the truncated system on one box. Construction precomputes the
/// stencil; `run` is const and may be called concurrently.
class Simulator {
public:
    Simulator(Box box, WalkKernel kernel, Nonlinearity sigma, SolverConfig config,
              InitialProfile u0, NoisePlan noise);

    Trajectory run(std::uint32_t replica) const;
    CoupledTrajectory run_coupled(std::uint32_t replica, const InitialProfile& v0) const;

    const Box& box() const noexcept { return box_; }
    const SolverConfig& config() const noexcept { return config_; }
    const WalkKernel& kernel() const noexcept { return kernel_; }
    const Nonlinearity& sigma() const noexcept { return sigma_; }
    const InitialProfile& initial() const noexcept { return u0_; }
    const NoisePlan& noise() const noexcept { return noise_; }
    const Stencil& stencil() const noexcept { return stencil_; }
    std::size_t steps() const noexcept { return steps_; }

    /// Chebyshev bound on the chance that the walk crosses half the box by
    /// the horizon.
    double escape_proxy() const noexcept;

private:
    struct Recorder;

    void step_into(const Stencil& stencil, std::vector<double>& u, std::vector<double>& scratch,
                   std::span<const double> dB, std::size_t step) const;
    std::vector<std::string> column_names() const;
    std::vector<std::string> run_warnings() const;

    Box box_;
    WalkKernel kernel_;
    Nonlinearity sigma_;
    SolverConfig config_;
    InitialProfile u0_;
    NoisePlan noise_;
    Stencil stencil_;
    std::size_t steps_;
    std::uint32_t refinement_;
    std::vector<std::size_t> record_steps_;
    std::vector<std::size_t> snapshot_steps_;
    std::vector<std::size_t> marked_sites_;
};

/// Convenience wrapper: one trajectory.
Trajectory simulate(const Box& box, const WalkKernel& kernel, const Nonlinearity& sigma,
                    const SolverConfig& config, const InitialProfile& u0, const NoisePlan& noise,
                    std::uint32_t replica);

CoupledTrajectory coupled_simulate(const Box& box, const WalkKernel& kernel,
                                   const Nonlinearity& sigma, const SolverConfig& config,
                                   const InitialProfile& u0, const InitialProfile& v0,
                                   const NoisePlan& noise, std::uint32_t replica);

} // namespace she
