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

#include "she/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "she/errors.hpp"
#include "she/parallel.hpp"
#include "she/renewal.hpp"
#include "she/stats.hpp"

namespace she {

Simulator make_simulator(const RunSpec& spec)
{
    const double noise_dt = spec.config.noise_dt > 0.0 ? spec.config.noise_dt : spec.config.dt;
    return Simulator(spec.box, spec.kernel, spec.sigma, spec.config, spec.u0,
                     NoisePlan(spec.seed, noise_dt));
}

double scale_increment(const Nonlinearity& sigma, double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("scale function is defined on (0, inf) only");
    }
    if (a == b) {
        return 0.0;
    }
    if (sigma.is_linear()) {
        if (!(sigma.q() > 0.0)) {
            throw SingularIntegrand("scale function needs sigma > 0 on (0, inf)");
        }
        return std::log(b / a) / sigma.q();
    }
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    constexpr int probes = 512;
    for (int i = 0; i <= probes; ++i) {
        const double w = lo + (hi - lo) * i / probes;
        if (!(sigma(w) > 0.0)) {
            std::ostringstream os;
            os << "sigma vanishes or changes sign at w = " << w << " inside [" << lo << ", " << hi
               << "]";
            throw SingularIntegrand(os.str());
        }
    }
    double err = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double w) { return 1.0 / sigma(w); }, lo, hi, 30, 1e-10, &err);
    if (!std::isfinite(integral)) {
        throw SingularIntegrand("scale function integral is not finite");
    }
    return a < b ? integral : -integral;
}

double scale_eval(const ScaleFunction& S, double z)
{
    if (!(S.z0 > 0.0)) {
        throw DomainError("scale function base point must be positive");
    }
    if (!(z > 0.0)) {
        throw DomainError("scale function is defined on (0, inf) only");
    }
    return scale_increment(S.sigma, S.z0, z);
}

namespace {

SolverConfig increment_config(const RunSpec& spec, double t, std::span<const double> taus,
                              const std::vector<LatticePoint>& points)
{
    if (taus.empty()) {
        throw std::invalid_argument("increment tests need at least one tau");
    }
    SolverConfig cfg = spec.config;
    const double tau_max = *std::max_element(taus.begin(), taus.end());
    cfg.horizon = t + tau_max;
    cfg.record_times = {t};
    for (double tau : taus) {
        if (!(tau > 0.0)) {
            throw std::invalid_argument("tau must be positive");
        }
        cfg.record_times.push_back(t + tau);
    }
    cfg.snapshot_times.clear();
    cfg.marked_points = points;
    cfg.observables = ObservableSet{false, false, false, false, true, true};
    return cfg;
}

} // namespace

CltReport clt_increment_test(const RunSpec& spec, double t, std::span<const double> taus,
                             const std::vector<LatticePoint>& points, std::size_t replicas,
                             const CltOptions& options)
{
    if (points.empty()) {
        throw std::invalid_argument("clt_increment_test: need at least one site");
    }
    for (double tau : taus) {
        if (spec.config.dt > tau / 20.0 + 1e-15) {
            throw std::invalid_argument("clt_increment_test: dt must not exceed tau / 20");
        }
    }
    CltReport rep;
    rep.t = t;
    rep.points = points;
    rep.replicas = replicas;
    rep.ks_relaxation = options.ks_relaxation;
    if (spec.sigma.is_zero()) {
        rep.degenerate = true;
        for (double tau : taus) {
            CltTauResult r;
            r.tau = tau;
            r.ks_pooled = std::numeric_limits<double>::quiet_NaN();
            rep.per_tau.push_back(r);
        }
        return rep;
    }
    RunSpec run = spec;
    run.config = increment_config(spec, t, taus, points);
    const Simulator sim = make_simulator(run);
    const std::size_t m = points.size();

    // Per replica: u_t and u_{t+tau} at each site, or empty when discarded.
    const auto samples = parallel_map(replicas, spec.threads, [&](std::uint32_t r) {
        const Trajectory traj = sim.run(r);
        std::vector<double> vals;
        for (std::size_t k = 0; k <= taus.size(); ++k) {
            const double time = k == 0 ? t : t + taus[k - 1];
            const std::size_t row = traj.row_at(time);
            for (std::size_t j = 0; j < m; ++j) {
                const double v = traj.rows[row][j];
                if (!(v > 0.0)) {
                    return std::vector<double>{};
                }
                vals.push_back(v);
            }
        }
        return vals;
    });

    std::vector<const std::vector<double>*> kept;
    for (const auto& s : samples) {
        if (s.empty()) {
            ++rep.discarded;
        } else {
            kept.push_back(&s);
        }
    }
    rep.discard_fraction = replicas ? static_cast<double>(rep.discarded) / replicas : 0.0;
    rep.valid = rep.discard_fraction < options.max_discard_fraction && kept.size() >= 2;

    bool all_zero = true;
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double tau = taus[k];
        CltTauResult res;
        res.tau = tau;
        std::vector<std::vector<double>> eta(m);
        std::vector<double> pooled;
        std::vector<double> abs_inc;
        for (const auto* vals : kept) {
            for (std::size_t j = 0; j < m; ++j) {
                const double before = (*vals)[j];
                const double after = (*vals)[(k + 1) * m + j];
                const double inc = scale_increment(spec.sigma, before, after);
                const double e = inc / std::sqrt(tau);
                eta[j].push_back(e);
                pooled.push_back(e);
                abs_inc.push_back(std::abs(inc));
                all_zero = all_zero && e == 0.0;
            }
        }
        res.samples = pooled.size();
        if (pooled.empty()) {
            rep.per_tau.push_back(res);
            continue;
        }
        res.ks_pooled = ks_statistic(pooled, normal_cdf);
        for (std::size_t j = 0; j < m; ++j) {
            res.ks_per_site.push_back(ks_statistic(eta[j], normal_cdf));
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double c = pearson_correlation(eta[i], eta[j]);
                res.correlations.push_back(c);
                res.max_abs_correlation = std::max(res.max_abs_correlation, std::abs(c));
            }
        }
        res.threshold = options.ks_relaxation * ks_critical_5pct(pooled.size());
        const double ll = std::log(std::log(1.0 / tau));
        res.lil_envelope = std::isfinite(ll) && ll > 0.0 ? std::sqrt(2.0 * tau * ll)
                                                         : std::numeric_limits<double>::quiet_NaN();
        res.abs_increment_q50 = quantile(abs_inc, 0.5);
        res.abs_increment_q99 = quantile(abs_inc, 0.99);
        res.abs_increment_max = *std::max_element(abs_inc.begin(), abs_inc.end());
        rep.per_tau.push_back(std::move(res));
    }
    rep.degenerate = all_zero && !kept.empty();
    return rep;
}

RnReport rn_ratio_test(const RunSpec& spec, double t, std::span<const double> taus,
                       const LatticePoint& x, std::size_t replicas, double eta)
{
    RunSpec run = spec;
    run.config = increment_config(spec, t, taus, {x});
    const Simulator sim = make_simulator(run);
    // Columns: u[x], B[x].
    const auto samples = parallel_map(replicas, spec.threads, [&](std::uint32_t r) {
        const Trajectory traj = sim.run(r);
        std::vector<double> vals;
        for (std::size_t k = 0; k <= taus.size(); ++k) {
            const std::size_t row = traj.row_at(k == 0 ? t : t + taus[k - 1]);
            vals.push_back(traj.rows[row][0]);
            vals.push_back(traj.rows[row][1]);
        }
        return vals;
    });
    RnReport rep;
    rep.t = t;
    rep.eta = eta;
    for (std::size_t k = 0; k < taus.size(); ++k) {
        RnTauResult res;
        res.tau = taus[k];
        std::vector<double> hits;
        for (const auto& v : samples) {
            const double u0 = v[0];
            const double b0 = v[1];
            const double du = v[2 * (k + 1)] - u0;
            const double dB = v[2 * (k + 1) + 1] - b0;
            if (std::abs(dB) < 1e-12) {
                ++res.discarded;
                continue;
            }
            const double s = spec.sigma(u0);
            const double ratio = du / dB;
            hits.push_back(std::abs(ratio - s) > eta * (1.0 + std::abs(s)) ? 1.0 : 0.0);
        }
        const MeanSe ms = mean_se(hits);
        res.exceedance = ms.mean;
        res.se = ms.se;
        res.samples = ms.n;
        rep.per_tau.push_back(res);
    }
    // Order by decreasing tau before judging monotonicity.
    std::vector<RnTauResult> sorted = rep.per_tau;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.tau > b.tau; });
    rep.strictly_decreasing = sorted.size() >= 2;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        rep.strictly_decreasing = rep.strictly_decreasing && sorted[i].exceedance < sorted[i - 1].exceedance;
    }
    return rep;
}

DissipationReport dissipation_experiment(const RunSpec& spec, const DissipationOptions& options)
{
    RunSpec run = spec;
    run.config.observables = ObservableSet{true, true, true, true, false, false};
    run.config.marked_points.clear();
    run.config.snapshot_times.clear();
    const Simulator sim = make_simulator(run);
    DissipationReport rep;
    rep.target_exponent = -0.5 * spec.box.dim();
    const double safe = spec.box.wrap_safe_horizon(spec.kernel.jumps);
    if (spec.box.boundary() == Boundary::periodic && run.config.horizon > safe) {
        std::ostringstream os;
        os << "horizon " << run.config.horizon << " exceeds the wrap-safe horizon " << safe;
        rep.warnings.push_back(os.str());
    }
    if (!spec.kernel.symmetrized_transient()) {
        rep.warnings.emplace_back("kernel is not flagged transient; decay is not expected");
    }

    struct PerReplica {
        std::vector<double> times;
        std::vector<std::vector<double>> rows;
        std::size_t chain_violations = 0;
    };
    const auto results = parallel_map(options.replicas, spec.threads, [&](std::uint32_t r) {
        Trajectory traj = sim.run(r);
        PerReplica out;
        for (const auto& row : traj.rows) {
            const double l1 = row[0];
            const double l2 = row[1];
            const double sup = row[2];
            // Rounding allowance for the two independently accumulated sums.
            const double slack = 1e-12 * std::max(l2, sup * l1);
            if (sup * sup > l2 + slack || l2 > sup * l1 + slack) {
                ++out.chain_violations;
            }
        }
        out.times = std::move(traj.times);
        out.rows = std::move(traj.rows);
        return out;
    });

    auto& norms = rep.norms;
    norms.times = results.front().times;
    const std::size_t nt = norms.times.size();
    std::vector<double> col(results.size());
    for (std::size_t i = 0; i < nt; ++i) {
        auto summarize = [&](std::size_t c, std::vector<double>& mean, std::vector<double>* se) {
            for (std::size_t r = 0; r < results.size(); ++r) {
                col[r] = results[r].rows[i][c];
            }
            const MeanSe ms = mean_se(col);
            mean.push_back(ms.mean);
            if (se) {
                se->push_back(ms.se);
            }
        };
        summarize(0, norms.l1_mean, &norms.l1_se);
        summarize(1, norms.l2sq_mean, &norms.l2sq_se);
        summarize(2, norms.sup_mean, &norms.sup_se);
        summarize(3, norms.negfrac_mean, nullptr);
    }
    for (const auto& r : results) {
        rep.chain_violations += r.chain_violations;
        for (const auto& row : r.rows) {
            rep.max_l1 = std::max(rep.max_l1, row[0]);
        }
    }

    rep.fit_start = options.fit_start;
    rep.fit_end = spec.box.boundary() == Boundary::periodic ? std::min(options.fit_end, safe)
                                                             : options.fit_end;
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < nt; ++i) {
        const double t = norms.times[i];
        if (t >= rep.fit_start - 1e-9 && t <= rep.fit_end + 1e-9 && t > 0.0 && norms.l2sq_mean[i] > 0.0) {
            lx.push_back(std::log(t));
            ly.push_back(std::log(norms.l2sq_mean[i]));
        }
    }
    rep.fit_points = lx.size();
    if (lx.size() >= 2) {
        const LinearFit fit = least_squares(lx, ly);
        rep.fit_slope = fit.slope;
        rep.fit_slope_se = fit.slope_se;
    } else {
        rep.warnings.emplace_back("fewer than two recorded times inside the fit window");
        rep.fit_slope = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::dissipative_bound:
        return "dissipative-bound";
    case Regime::growth_bound:
        return "growth-bound";
    case Regime::indeterminate:
        return "indeterminate";
    case Regime::no_dissipation_criterion:
        return "no-dissipation-criterion (recurrent symmetrized walk)";
    }
    return "unknown";
}

RegimeReport regime_classify(double lip, double ell, const WalkKernel& kernel)
{
    if (!(lip >= 0.0) || !(ell >= 0.0) || ell > lip) {
        throw std::invalid_argument("regime_classify: require 0 <= ell <= lip");
    }
    RegimeReport rep;
    rep.upsilon0 = upsilon(kernel, 0.0).value;
    if (std::isinf(rep.upsilon0)) {
        rep.regime = Regime::no_dissipation_criterion;
        rep.lip_term = rep.ell_term = std::numeric_limits<double>::infinity();
        if (ell > 0.0) {
            rep.beta_star = critical_beta(kernel, ell).beta;
        }
        return rep;
    }
    rep.lip_term = lip * lip * rep.upsilon0;
    rep.ell_term = ell * ell * rep.upsilon0;
    if (rep.lip_term < 1.0) {
        rep.regime = Regime::dissipative_bound;
    } else if (rep.ell_term >= 1.0) {
        rep.regime = Regime::growth_bound;
        if (rep.ell_term > 1.0) {
            rep.beta_star = critical_beta(kernel, ell).beta;
        }
    } else {
        rep.regime = Regime::indeterminate;
    }
    return rep;
}

} // namespace she
