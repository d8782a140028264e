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

#include "she/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "she/errors.hpp"

namespace she {

namespace {

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, std::size_t n)
{
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    return c;
}

// Transition matrix of the wrapped walk over time t: sum_n Pois(t; n) K^n.
std::vector<double> box_semigroup(const Box& box, const WalkKernel& kernel, double t)
{
    const std::size_t n = box.sites();
    std::vector<double> jump(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        const LatticePoint x = box.point(s);
        for (const auto& j : kernel.jumps.jumps()) {
            LatticePoint y = x;
            for (std::size_t a = 0; a < y.size(); ++a) {
                y[a] += j.vec[a];
            }
            jump[s * n + box.index(y)] += j.mass;
        }
    }
    const PoissonCut cut = poisson_truncation(kernel.rate * t, 1e-16);
    std::vector<double> power(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        power[s * n + s] = 1.0;
    }
    std::vector<double> result(n * n, 0.0);
    const double mu = kernel.rate * t;
    for (std::size_t k = 0; k <= cut.terms; ++k) {
        const double w = std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0));
        for (std::size_t i = 0; i < n * n; ++i) {
            result[i] += w * power[i];
        }
        power = matmul(power, jump, n);
    }
    return result;
}

} // namespace

PicardOracle::PicardOracle(const Box& box, const WalkKernel& kernel, Nonlinearity sigma,
                           const InitialProfile& u0, double horizon, double dt,
                           const NoisePlan& noise, std::uint32_t replica)
    : sites_(box.sites()), dt_(dt), sigma_(std::move(sigma)), initial_(u0.on_box(box))
{
    if (box.boundary() != Boundary::periodic) {
        throw std::invalid_argument("PicardOracle: only periodic boxes are supported");
    }
    if (!(dt > 0.0) || horizon < 0.0) {
        throw std::invalid_argument("PicardOracle: need dt > 0 and horizon >= 0");
    }
    const double steps_real = horizon / dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(steps)) > 1e-6) {
        throw std::invalid_argument("PicardOracle: horizon must be a multiple of dt");
    }
    const std::uint32_t factor = noise.refinement(dt);
    const std::size_t n = sites_;

    const std::vector<double> step = box_semigroup(box, kernel, dt);
    std::vector<double> identity(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        identity[s * n + s] = 1.0;
    }
    semigroup_.push_back(identity);
    for (std::size_t i = 1; i <= steps; ++i) {
        semigroup_.push_back(matmul(semigroup_.back(), step, n));
    }
    increments_.assign(steps, std::vector<double>(n));
    for (std::size_t j = 0; j < steps; ++j) {
        noise.increments(replica, j, factor, increments_[j]);
    }
    for (std::size_t i = 0; i <= steps; ++i) {
        free_.push_back(apply(i, initial_));
    }
}

std::vector<double> PicardOracle::apply(std::size_t power, const std::vector<double>& f) const
{
    const auto& m = semigroup_[power];
    std::vector<double> out(sites_, 0.0);
    for (std::size_t x = 0; x < sites_; ++x) {
        double acc = 0.0;
        for (std::size_t y = 0; y < sites_; ++y) {
            acc += m[x * sites_ + y] * f[y];
        }
        out[x] = acc;
    }
    return out;
}

FieldPath PicardOracle::iterate(const FieldPath& prev) const
{
    const std::size_t points = semigroup_.size();
    if (prev.size() != points) {
        throw std::invalid_argument("PicardOracle::iterate: path has wrong length");
    }
    // Y_j = sigma(u_j) dB_j, then u_i = P_i u_0 + sum_{j<i} P_{i-j} Y_j.
    FieldPath forcing(points - 1, std::vector<double>(sites_));
    for (std::size_t j = 0; j + 1 < points; ++j) {
        for (std::size_t y = 0; y < sites_; ++y) {
            forcing[j][y] = sigma_(prev[j][y]) * increments_[j][y];
        }
    }
    FieldPath next = free_;
    for (std::size_t i = 1; i < points; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const auto& m = semigroup_[i - j];
            for (std::size_t x = 0; x < sites_; ++x) {
                double acc = 0.0;
                for (std::size_t y = 0; y < sites_; ++y) {
                    acc += m[x * sites_ + y] * forcing[j][y];
                }
                next[i][x] += acc;
            }
        }
    }
    return next;
}

PicardOracle::Result PicardOracle::solve(double tol, std::size_t max_iter) const
{
    Result res;
    res.path.assign(semigroup_.size(), initial_);
    double prev_change = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        FieldPath next = iterate(res.path);
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            for (std::size_t x = 0; x < sites_; ++x) {
                change = std::max(change, std::abs(next[i][x] - res.path[i][x]));
            }
        }
        res.contraction = prev_change > 0.0 ? change / prev_change : 0.0;
        prev_change = change;
        res.path = std::move(next);
        res.iterations = it;
        res.last_change = change;
        if (change < tol) {
            return res;
        }
    }
    std::ostringstream os;
    os << "Picard iteration did not converge in " << max_iter
       << " iterations (last change " << res.last_change << ", contraction estimate "
       << res.contraction << ")";
    throw NumericFailure(os.str(), res.contraction);
}

} // namespace she
