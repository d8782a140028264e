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
#include <vector>

#include "she/lattice.hpp"
#include "she/nonlinearity.hpp"
#include "she/random.hpp"
#include "she/walk_kernel.hpp"

namespace she {

/// Field values on a uniform time grid: path[i] holds u at t_i = i * dt.
using FieldPath = std::vector<std::vector<double>>;

/// Discrete Picard iteration for the mild form on a periodic box,
///   u_{t_i}(x) = (P_{t_i} u_0)(x) + sum_{j<i} sum_y p_{t_i - t_j}(y - x) sigma(u_{t_j}(y)) dB_j(y),
/// with the box semigroup and the left-point (Ito) stochastic sum. Driven by
/// the same NoisePlan increments as the time stepper.
class PicardOracle {
public:
    PicardOracle(const Box& box, const WalkKernel& kernel, Nonlinearity sigma,
                 const InitialProfile& u0, double horizon, double dt, const NoisePlan& noise,
                 std::uint32_t replica);

    std::size_t grid_points() const noexcept { return semigroup_.size(); }
    double dt() const noexcept { return dt_; }

    /// (P_{t_i} u_0) for every grid time.
    const FieldPath& free_part() const noexcept { return free_; }

    /// One map application u^{(n)} -> u^{(n+1)}.
    FieldPath iterate(const FieldPath& prev) const;

    struct Result {
        FieldPath path;
        std::size_t iterations = 0;
        double last_change = 0.0;
        double contraction = 0.0;  // last ratio of successive sup changes
    };

    /// Iterates from u^{(0)} = u_0 until the discrete sup-norm change is
    /// below tol; throws NumericFailure after max_iter.
    Result solve(double tol = 1e-12, std::size_t max_iter = 10000) const;

private:
    std::vector<double> apply(std::size_t power, const std::vector<double>& f) const;

    std::size_t sites_;
    double dt_;
    Nonlinearity sigma_;
    std::vector<double> initial_;
    std::vector<std::vector<double>> semigroup_;  // P_{i dt}, row-major sites x sites
    FieldPath increments_;                         // dB_j for j = 0..N-1
    FieldPath free_;
};

} // namespace she
