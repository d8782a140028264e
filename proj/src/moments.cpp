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

#include "she/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "she/errors.hpp"
#include "she/parallel.hpp"
#include "she/renewal.hpp"
#include "she/stats.hpp"

namespace she {

namespace {

void require_snapshot(const Simulator& sim, double t)
{
    const auto& snaps = sim.config().snapshot_times;
    const bool found = std::any_of(snaps.begin(), snaps.end(),
                                   [t](double s) { return std::abs(s - t) < 1e-9; });
    if (!found) {
        std::ostringstream os;
        os << "time " << t << " is not a snapshot time of this run";
        throw std::invalid_argument(os.str());
    }
}

MomentEstimate from_samples(std::span<const double> samples)
{
    MomentEstimate e;
    const MeanSe m = mean_se(samples);
    e.estimate = m.mean;
    e.se = m.se;
    e.replicas = m.n;
    return e;
}

double product_at(const InitialProfile& u0, const CollisionRecord& rec, std::span<const int> x)
{
    double prod = 1.0;
    LatticePoint y(x.size());
    for (const auto& path : rec.paths) {
        const auto pos = path.final_position();
        for (std::size_t a = 0; a < y.size(); ++a) {
            y[a] = x[a] + pos[a];
        }
        prod *= u0(y);
        if (prod == 0.0) {
            break;
        }
    }
    return prod;
}

void check_fk_args(const WalkKernel& kernel, int k, double t)
{
    if (k < 1) {
        throw std::invalid_argument("Feynman-Kac moments need k >= 1");
    }
    if (t < 0.0) {
        throw std::invalid_argument("Feynman-Kac moments need t >= 0");
    }
    if (kernel.rate != 1.0) {
        throw std::invalid_argument("Feynman-Kac moments assume the rate-1 walk");
    }
}

} // namespace

std::string to_string(MomentMethod m)
{
    switch (m) {
    case MomentMethod::field_mc:
        return "field-mc";
    case MomentMethod::feynman_kac:
        return "feynman-kac";
    case MomentMethod::renewal:
        return "renewal";
    }
    return "unknown";
}

MomentEstimate estimate_field_moment(const Simulator& sim, int k, double t, const LatticePoint& x,
                                     std::size_t replicas, unsigned threads)
{
    if (k < 1) {
        throw std::invalid_argument("estimate_field_moment: k must be >= 1");
    }
    require_snapshot(sim, t);
    if (static_cast<int>(x.size()) != sim.box().dim() || !sim.box().contains(x)) {
        throw std::invalid_argument("estimate_field_moment: x is outside the box");
    }
    const std::size_t site = sim.box().index(x);
    const auto samples = parallel_map(replicas, threads, [&](std::uint32_t r) {
        const Trajectory traj = sim.run(r);
        return std::pow(std::abs(traj.snapshot_at(t).values[site]), k);
    });
    MomentEstimate e = from_samples(samples);
    e.k = k;
    e.t = t;
    e.x = x;
    e.method = MomentMethod::field_mc;
    return e;
}

MomentEstimate estimate_field_l2(const Simulator& sim, double t, std::size_t replicas,
                                 unsigned threads)
{
    const auto samples = parallel_map(replicas, threads, [&](std::uint32_t r) {
        const Trajectory traj = sim.run(r);
        return traj.value(traj.row_at(t), "l2sq");
    });
    MomentEstimate e = from_samples(samples);
    e.k = 2;
    e.t = t;
    e.summed = true;
    e.method = MomentMethod::field_mc;
    return e;
}

double CollisionRecord::total_overlap() const noexcept
{
    double s = 0.0;
    for (double o : overlaps) {
        s += o;
    }
    return s;
}

CollisionRecord sample_collisions(const WalkKernel& kernel, int k, double t, std::uint64_t seed,
                                  std::uint32_t replica, std::uint32_t salt)
{
    CollisionRecord rec;
    for (int j = 0; j < k; ++j) {
        StreamRng rng(seed, StreamTag::walk_path, replica,
                      static_cast<std::uint32_t>(j) | (salt << 8));
        rec.paths.push_back(sample_walk_path(kernel, t, rng));
    }
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            rec.overlaps.push_back(overlap_time(rec.paths[static_cast<std::size_t>(i)],
                                                rec.paths[static_cast<std::size_t>(j)]));
        }
    }
    return rec;
}

MomentEstimate fk_pam_moment(const WalkKernel& kernel, double q, const InitialProfile& u0, int k,
                             double t, const LatticePoint& x, std::size_t replicas,
                             const FeynmanKacOptions& options)
{
    check_fk_args(kernel, k, t);
    if (static_cast<int>(x.size()) != kernel.dim()) {
        throw std::invalid_argument("fk_pam_moment: x has wrong dimension");
    }
    const double q2 = q * q;
    const auto samples = parallel_map(replicas, options.threads, [&](std::uint32_t r) {
        const CollisionRecord rec = sample_collisions(kernel, k, t, options.seed, r, options.salt);
        const double prod = product_at(u0, rec, x);
        return prod == 0.0 ? 0.0 : prod * std::exp(q2 * rec.total_overlap());
    });
    MomentEstimate e = from_samples(samples);
    e.k = k;
    e.t = t;
    e.x = x;
    e.method = MomentMethod::feynman_kac;
    return e;
}

MomentEstimate fk_pam_moment_summed(const WalkKernel& kernel, double q, const InitialProfile& u0,
                                    int k, double t, std::size_t replicas,
                                    const FeynmanKacOptions& options)
{
    check_fk_args(kernel, k, t);
    if (!u0.finite_support()) {
        throw std::invalid_argument("fk_pam_moment_summed: u0 must have finite support");
    }
    const double q2 = q * q;
    const auto samples = parallel_map(replicas, options.threads, [&](std::uint32_t r) {
        const CollisionRecord rec = sample_collisions(kernel, k, t, options.seed, r, options.salt);
        // Only x with x + X^1_t in supp(u0) contribute.
        const auto first = rec.paths.front().final_position();
        double sum = 0.0;
        LatticePoint x(first.size());
        for (const auto& [y, v] : u0.entries()) {
            for (std::size_t a = 0; a < x.size(); ++a) {
                x[a] = y[a] - first[a];
            }
            sum += product_at(u0, rec, x);
        }
        return sum == 0.0 ? 0.0 : sum * std::exp(q2 * rec.total_overlap());
    });
    MomentEstimate e = from_samples(samples);
    e.k = k;
    e.t = t;
    e.summed = true;
    e.method = MomentMethod::feynman_kac;
    return e;
}

namespace {

std::vector<double> solve_second_moment(const WalkKernel& kernel, double q,
                                        const InitialProfile& u0, std::size_t n, double step)
{
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        times[i] = static_cast<double>(i) * step;
    }
    RenewalProblem problem;
    problem.step = step;
    problem.beta = 2.0 * q * q;
    const auto overlap = overlap_curve(kernel, times, u0.entries(), 1e-11);
    const auto pb = pbar_curve(kernel, times, 1e-11);
    for (std::size_t i = 0; i <= n; ++i) {
        problem.g.push_back(std::max(0.0, overlap[i].value));
        problem.h.push_back(q * q * std::max(0.0, pb[i].value));
    }
    return picard_solve(problem).f;
}

} // namespace

RenewalCurve pam_second_moment_renewal(const WalkKernel& kernel, double q,
                                       const InitialProfile& u0, double horizon, double step,
                                       double tol)
{
    if (!u0.finite_support()) {
        throw std::invalid_argument("pam_second_moment_renewal: u0 must have finite support");
    }
    if (!(step > 0.0) || horizon < 0.0) {
        throw std::invalid_argument("pam_second_moment_renewal: need step > 0, horizon >= 0");
    }
    const double nr = horizon / step;
    const auto n = static_cast<std::size_t>(std::llround(nr));
    if (std::abs(nr - static_cast<double>(n)) > 1e-9) {
        throw std::invalid_argument("pam_second_moment_renewal: horizon must be a multiple of step");
    }
    const auto coarse = solve_second_moment(kernel, q, u0, n, step);
    const auto fine = solve_second_moment(kernel, q, u0, 2 * n, 0.5 * step);
    RenewalCurve curve;
    for (std::size_t i = 0; i <= n; ++i) {
        curve.times.push_back(static_cast<double>(i) * step);
        curve.values.push_back(fine[2 * i]);
        const double err = std::abs(fine[2 * i] - coarse[i]) / std::max(1.0, std::abs(fine[2 * i]));
        curve.halving_error = std::max(curve.halving_error, err);
    }
    if (curve.halving_error > tol) {
        std::ostringstream os;
        os << "renewal grid too coarse: halving error " << curve.halving_error << " > " << tol;
        throw NumericFailure(os.str(), curve.halving_error);
    }
    return curve;
}

LyapunovFit fit_lyapunov(std::span<const double> times, std::span<const double> log_moments,
                         std::span<const double> log_se, double window_start, double window_end,
                         std::size_t resamples, std::uint64_t seed)
{
    if (times.size() != log_moments.size() || (!log_se.empty() && log_se.size() != times.size())) {
        throw std::invalid_argument("fit_lyapunov: series lengths differ");
    }
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> se;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument("fit_lyapunov: times must increase");
        }
        if (times[i] >= window_start - 1e-12 && times[i] <= window_end + 1e-12) {
            x.push_back(times[i]);
            y.push_back(log_moments[i]);
            se.push_back(log_se.empty() ? 0.0 : log_se[i]);
        }
    }
    if (x.size() < 4) {
        throw std::invalid_argument("fit_lyapunov: window holds fewer than 4 points");
    }
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("fit_lyapunov: non-finite log-moment in window");
        }
    }
    const LinearFit fit = least_squares(x, y);
    LyapunovFit out;
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.window_start = window_start;
    out.window_end = window_end;
    out.points = x.size();

    StreamRng rng(seed, StreamTag::bootstrap, 0);
    std::vector<double> slopes;
    std::vector<double> bx(x.size());
    std::vector<double> by(x.size());
    for (std::size_t b = 0; b < resamples; ++b) {
        if (!log_se.empty()) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                bx[i] = x[i];
                by[i] = y[i] + se[i] * rng.normal();
            }
        } else {
            for (std::size_t i = 0; i < x.size(); ++i) {
                const auto j = static_cast<std::size_t>(rng.next_u32() % x.size());
                bx[i] = x[j];
                by[i] = y[j];
            }
            if (std::all_of(bx.begin(), bx.end(), [&](double v) { return v == bx[0]; })) {
                continue;
            }
        }
        slopes.push_back(least_squares(bx, by).slope);
    }
    out.ci_low = slopes.empty() ? fit.slope : quantile(slopes, 0.025);
    out.ci_high = slopes.empty() ? fit.slope : quantile(slopes, 0.975);
    return out;
}

std::string to_string(K2Verdict v)
{
    switch (v) {
    case K2Verdict::within_bounds:
        return "within-bounds";
    case K2Verdict::violates_upper:
        return "violates-upper";
    case K2Verdict::violates_lower:
        return "violates-lower";
    case K2Verdict::k_below_threshold:
        return "k-below-threshold";
    }
    return "unknown";
}

std::vector<K2Check> check_k2_bounds(std::span<const GrowthRate> rates, double lip, double ell,
                                     double eps)
{
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("check_k2_bounds: eps must lie in (0, 1)");
    }
    std::vector<K2Check> out;
    for (const auto& r : rates) {
        K2Check c;
        c.k = r.k;
        const double k2 = static_cast<double>(r.k) * r.k;
        c.upper_bound = 8.0 * lip * lip * k2;
        c.lower_bound = (1.0 - eps) * ell * ell * k2;
        c.lower_threshold = ell > 0.0 ? 1.0 / eps + 1.0 / (eps * ell * ell)
                                      : std::numeric_limits<double>::infinity();
        if (r.ci_high > c.upper_bound) {
            c.verdict = K2Verdict::violates_upper;
        } else if (ell > 0.0 && r.k < c.lower_threshold) {
            c.verdict = K2Verdict::k_below_threshold;
        } else if (ell > 0.0 && r.ci_high < c.lower_bound) {
            c.verdict = K2Verdict::violates_lower;
        } else {
            c.verdict = K2Verdict::within_bounds;
        }
        out.push_back(c);
    }
    return out;
}

} // namespace she
