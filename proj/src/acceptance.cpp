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

#include "she/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "she/commands.hpp"
#include "she/errors.hpp"
#include "she/experiments.hpp"
#include "she/moments.hpp"
#include "she/parallel.hpp"
#include "she/renewal.hpp"
#include "she/stats.hpp"
#include "she/walk_kernel.hpp"

namespace she {

namespace {

namespace fs = std::filesystem;

/// Streams "name = value" fragments into the criterion detail.
class Detail {
public:
    template <class T>
    Detail& operator()(const std::string& name, const T& value)
    {
        if (!first_) {
            os_ << "; ";
        }
        first_ = false;
        os_ << name << " = " << value;
        return *this;
    }
    Detail& note(const std::string& text)
    {
        if (!first_) {
            os_ << "; ";
        }
        first_ = false;
        os_ << text;
        return *this;
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
    bool first_ = true;
};

std::string num(double v, int digits = 6)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

WalkKernel simple(int d) { return WalkKernel(JumpDistribution::simple(d)); }

bool agree(double a, double sa, double b, double sb, double k = 3.0)
{
    return std::abs(a - b) <= k * std::sqrt(sa * sa + sb * sb);
}

// 1. Kernel oracles.
CriterionResult kernel_oracles()
{
    CriterionResult r;
    Detail d;
    bool ok = true;
    double worst = 0.0;
    for (int dim : {1, 2}) {
        const WalkKernel k = simple(dim);
        for (double tau : {0.1, 0.5, 2.0}) {
            const double f = pbar(k, tau, 1e-12).value;
            const double s = pbar_lattice_sum(k, tau);
            worst = std::max(worst, std::abs(f - s));
        }
    }
    ok = ok && worst <= 1e-8;
    d("max |pbar fourier - lattice|", num(worst, 3));
    const double u2 = upsilon(simple(1), 2.0).value;
    const double e2 = std::abs(u2 - 1.0 / std::sqrt(12.0));
    ok = ok && e2 <= 1e-6;
    d("Upsilon(2) d=1", num(u2, 10))("err", num(e2, 3));
    const double u0 = upsilon(simple(3), 0.0).value;
    const double e0 = std::abs(u0 - 0.758193);
    ok = ok && e0 <= 1e-3;
    d("Upsilon(0) d=3", num(u0, 8))("err", num(e0, 3));
    r.passed = ok;
    r.detail = d.str();
    return r;
}

// 2. sigma = 0 reproduces the transition kernel.
CriterionResult deterministic_limit()
{
    CriterionResult r;
    const WalkKernel k = simple(1);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 1.0;
    cfg.snapshot_times = {1.0};
    cfg.record_times = {1.0};
    const Box box({65}, Boundary::periodic);
    const Trajectory tr = simulate(box, k, Nonlinearity::linear(0.0), cfg,
                                   InitialProfile::delta({0}), NoisePlan(1, cfg.dt), 0);
    const auto& u = tr.snapshot_at(1.0).values;
    double worst = 0.0;
    for (std::size_t s = 0; s < box.sites(); ++s) {
        LatticePoint x = box.point(s);
        LatticePoint mx{-x[0]};
        worst = std::max(worst, std::abs(u[s] - transition_prob(k, 1.0, mx).value));
    }
    r.passed = worst < 5.0 * cfg.dt;
    r.detail = Detail()("sup error", num(worst, 4))("bound 5 dt", num(5.0 * cfg.dt)).str();
    return r;
}

// 3. Field MC, Feynman-Kac and renewal agree on sum_x E u_t(x)^2.
CriterionResult oracle_triangle(const AcceptanceOptions& o)
{
    CriterionResult r;
    const WalkKernel k = simple(1);
    const double q = 0.5;
    const std::vector<double> times{0.5, 1.0, 2.0};
    const InitialProfile u0 = InitialProfile::delta({0});

    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 2.0;
    cfg.scheme = Scheme::split_exact_linear;
    cfg.record_times = times;
    cfg.observables = ObservableSet{false, true, false, false, false, false};
    const Simulator sim(Box({65}, Boundary::periodic), k, Nonlinearity::linear(q), cfg, u0,
                        NoisePlan(o.seed, cfg.dt));
    const std::size_t n_field = 10000;
    const auto samples = parallel_map(n_field, o.threads, [&](std::uint32_t rep) {
        const Trajectory tr = sim.run(rep);
        std::vector<double> v;
        for (double t : times) {
            v.push_back(tr.value(tr.row_at(t), "l2sq"));
        }
        return v;
    });
    const RenewalCurve ren = pam_second_moment_renewal(k, q, u0, 2.0, 1.0 / 256.0);

    Detail d;
    bool ok = true;
    std::vector<double> col(n_field);
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t rep = 0; rep < n_field; ++rep) {
            col[rep] = samples[rep][i];
        }
        const MeanSe field = mean_se(col);
        const MomentEstimate fk = fk_pam_moment_summed(
            k, q, u0, 2, times[i], 100000, {o.seed, static_cast<std::uint32_t>(i), o.threads});
        const auto idx = static_cast<std::size_t>(std::llround(times[i] * 256.0));
        const double rv = ren.values[idx];
        const double rse = ren.halving_error;
        const bool good = agree(field.mean, field.se, fk.estimate, fk.se) &&
                          agree(field.mean, field.se, rv, rse) && agree(fk.estimate, fk.se, rv, rse);
        ok = ok && good;
        d.note("t=" + num(times[i]) + ": field " + num(field.mean) + "+-" + num(field.se, 2) +
               ", fk " + num(fk.estimate) + "+-" + num(fk.se, 2) + ", renewal " + num(rv, 8) +
               (good ? "" : " [disagree]"));
    }
    r.passed = ok;
    r.detail = d.str();
    return r;
}

std::vector<MomentEstimate> fk_series(const WalkKernel& k, double q, int kk,
                                      const std::vector<double>& times, std::size_t replicas,
                                      const AcceptanceOptions& o, std::uint32_t salt)
{
    std::vector<MomentEstimate> out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.push_back(fk_pam_moment(k, q, InitialProfile::constant(1.0), kk, times[i], {0},
                                    replicas,
                                    {o.seed, salt + static_cast<std::uint32_t>(i), o.threads}));
    }
    return out;
}

// 4. k^2 bracket for the Feynman-Kac log-moments.
CriterionResult k2_bracket(const AcceptanceOptions& o)
{
    CriterionResult r;
    const WalkKernel k = simple(1);
    const double q = 1.0;
    const std::vector<double> times{0.5, 1.0, 1.5, 2.0};
    const std::size_t replicas = 100000;
    std::vector<double> log_at_2;
    std::vector<GrowthRate> rates;
    Detail d;
    for (int kk : {2, 3, 4}) {
        const auto series = fk_series(k, q, kk, times, replicas, o, 100 + 10 * kk);
        std::vector<double> lm, ls;
        for (const auto& e : series) {
            lm.push_back(std::log(e.estimate));
            ls.push_back(e.se / e.estimate);
        }
        log_at_2.push_back(lm.back());
        const LyapunovFit fit = fit_lyapunov(times, lm, ls, 0.5, 2.0, 2000, o.seed);
        rates.push_back({kk, fit.slope, fit.ci_low, fit.ci_high});
        d.note("k=" + std::to_string(kk) + ": log m(2) " + num(lm.back()) + "+-" +
               num(ls.back(), 2) + ", gamma " + num(fit.slope, 4) + " [" + num(fit.ci_low, 4) +
               ", " + num(fit.ci_high, 4) + "]");
    }
    const bool increasing = log_at_2[0] < log_at_2[1] && log_at_2[1] < log_at_2[2];
    const double second_diff = log_at_2[2] - 2.0 * log_at_2[1] + log_at_2[0];
    const bool convex = second_diff > 0.0;
    const auto checks = check_k2_bounds(rates, q, q, 0.5);
    bool upper = true;
    for (const auto& c : checks) {
        upper = upper && c.verdict != K2Verdict::violates_upper;
    }
    d("increasing", increasing)("second difference", num(second_diff, 4))("below 8k^2", upper);
    r.passed = increasing && convex && upper;
    r.detail = d.str();
    return r;
}

// 5. Feynman-Kac lower bound exp{[k(k-1)q^2 - k] t}.
CriterionResult fk_lower_bound(const AcceptanceOptions& o)
{
    CriterionResult r;
    const WalkKernel k = simple(1);
    const double q = 1.0;
    const double t = 1.0;
    Detail d;
    bool ok = true;
    for (int kk : {2, 3}) {
        const MomentEstimate e = fk_pam_moment(k, q, InitialProfile::constant(1.0), kk, t, {0},
                                               100000, {o.seed, 500u + kk, o.threads});
        const double bound = std::exp((kk * (kk - 1) * q * q - kk) * t);
        const bool good = e.estimate + 3.0 * e.se >= bound;
        ok = ok && good;
        d.note("k=" + std::to_string(kk) + ": estimate " + num(e.estimate) + "+-" + num(e.se, 2) +
               " vs bound " + num(bound) + (good ? "" : " [below]"));
    }
    r.passed = ok;
    r.detail = d.str();
    return r;
}

// 6. Comparison principle.
CriterionResult comparison(const AcceptanceOptions& o)
{
    CriterionResult r;
    Detail d;
    const WalkKernel k = simple(1);
    const Box box({33}, Boundary::periodic);
    // Exact ordering for the split scheme.
    std::vector<std::pair<LatticePoint, double>> entries;
    for (int x = -16; x <= 16; ++x) {
        entries.push_back({{x}, 1.0 + 0.5 * std::cos(0.7 * x)});
    }
    std::vector<std::pair<LatticePoint, double>> half = entries;
    for (auto& e : half) {
        e.second *= 0.5;
    }
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 1.0;
    cfg.scheme = Scheme::split_exact_linear;
    cfg.record_every = 1000;
    const Simulator pam(box, k, Nonlinearity::linear(1.0), cfg, InitialProfile::table(entries),
                        NoisePlan(o.seed, cfg.dt));
    const auto worst_pam = parallel_map(200, o.threads, [&](std::uint32_t rep) {
        return pam.run_coupled(rep, InitialProfile::table(half)).worst_violation();
    });
    const double pam_max = *std::max_element(worst_pam.begin(), worst_pam.end());
    d("split PAM max violation", num(pam_max, 3));

    // Euler with a bounded Lipschitz sigma on a shared Brownian path.
    const double qs = 16.0;
    const Nonlinearity sine = Nonlinearity::named("sine", qs, qs, 0.0);
    std::vector<double> medians;
    for (double dt : {4e-3, 1e-3, 2.5e-4}) {
        SolverConfig c;
        c.dt = dt;
        c.noise_dt = 2.5e-4;
        c.horizon = 1.0;
        c.accuracy_limit = 2.0;
        c.record_every = static_cast<std::size_t>(std::llround(1.0 / dt));
        c.observables = ObservableSet{false, false, false, false, false, false};
        const Simulator sim(box, k, sine, c, InitialProfile::constant(1.0), NoisePlan(o.seed + 1, 2.5e-4));
        const auto worst = parallel_map(200, o.threads, [&](std::uint32_t rep) {
            return sim.run_coupled(rep, InitialProfile::constant(0.9)).worst_violation();
        });
        medians.push_back(median(worst));
    }
    d("euler sine q=16 median max violation at dt 4e-3, 1e-3, 2.5e-4",
      num(medians[0], 4) + ", " + num(medians[1], 4) + ", " + num(medians[2], 4));
    // Decreasing: positive at the coarsest dt, then strictly smaller unless zero.
    bool decreasing = medians[0] > 0.0;
    for (std::size_t i = 1; i < medians.size(); ++i) {
        decreasing = decreasing && (medians[i] < medians[i - 1] ||
                                    (medians[i] == 0.0 && medians[i - 1] == 0.0));
    }
    r.passed = pam_max == 0.0 && decreasing;
    r.detail = d.str();
    return r;
}

struct DecayRun {
    DissipationReport report;
    bool ran = false;
};

DecayRun decay_run(const AcceptanceOptions& o)
{
    RunSpec spec{Box({16, 16, 16}, Boundary::periodic),
                 simple(3),
                 Nonlinearity::linear(0.5),
                 InitialProfile::delta({0, 0, 0}),
                 SolverConfig{},
                 o.seed + 7,
                 o.threads};
    auto& c = spec.config;
    c.dt = 0.05;
    c.horizon = 40.0;
    c.scheme = Scheme::split_exact_linear;
    c.record_times = {1.0, 5.0, 10.0};
    for (double t = 12.5; t <= 40.0 + 1e-9; t += 2.5) {
        c.record_times.push_back(t);
    }
    c.record_times.push_back(20.0);
    std::sort(c.record_times.begin(), c.record_times.end());
    c.record_times.erase(std::unique(c.record_times.begin(), c.record_times.end()),
                         c.record_times.end());
    DecayRun run;
    run.report = dissipation_experiment(spec, {10.0, 40.0, 2000});
    run.ran = true;
    return run;
}

std::size_t time_index(const std::vector<double>& times, double t)
{
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) < 1e-9) {
            return i;
        }
    }
    throw std::logic_error("time not recorded");
}

// 7. l1 martingale.
CriterionResult l1_martingale(const DecayRun& run)
{
    CriterionResult r;
    const auto& n = run.report.norms;
    Detail d;
    bool ok = true;
    for (double t : {1.0, 5.0, 20.0}) {
        const std::size_t i = time_index(n.times, t);
        const double z = std::abs(n.l1_mean[i] - 1.0) / n.l1_se[i];
        ok = ok && z <= 3.0;
        d.note("t=" + num(t) + ": " + num(n.l1_mean[i], 6) + "+-" + num(n.l1_se[i], 2) +
               " (" + num(z, 3) + " SE)");
    }
    r.passed = ok;
    r.detail = d.str();
    return r;
}

// 8. Dissipation.
CriterionResult dissipation(const DecayRun& run)
{
    CriterionResult r;
    const auto& rep = run.report;
    const auto& n = rep.norms;
    const double s1 = n.sup_mean[time_index(n.times, 1.0)];
    const double s40 = n.sup_mean[time_index(n.times, 40.0)];
    const bool slope_ok = rep.fit_slope >= -1.9 && rep.fit_slope <= -1.1;
    const bool sup_ok = s40 < 0.1 * s1;
    r.passed = slope_ok && sup_ok && rep.chain_violations == 0;
    r.detail = Detail()("slope", num(rep.fit_slope, 4) + "+-" + num(rep.fit_slope_se, 2))(
                   "window", "[" + num(rep.fit_start) + ", " + num(rep.fit_end) + "]")(
                   "sup(40)/sup(1)", num(s40 / s1, 4))("chain violations", rep.chain_violations)
                   .str();
    return r;
}

RunSpec local_spec(const AcceptanceOptions& o, std::uint64_t salt)
{
    RunSpec spec{Box({33}, Boundary::periodic),
                 simple(1),
                 Nonlinearity::linear(1.0),
                 InitialProfile::constant(1.0),
                 SolverConfig{},
                 o.seed + salt,
                 o.threads};
    spec.config.dt = 1.25e-4;
    spec.config.scheme = Scheme::split_exact_linear;
    return spec;
}

const std::vector<double> tau_ladder{0.04, 0.01, 0.0025};

// 9. Gaussian increments under the scale function.
CriterionResult clt(const AcceptanceOptions& o)
{
    CriterionResult r;
    const std::vector<LatticePoint> points{{-6}, {-2}, {2}, {6}};
    const CltReport rep = clt_increment_test(local_spec(o, 9), 1.0, tau_ladder, points, 2000);
    Detail d;
    std::string ks;
    for (const auto& p : rep.per_tau) {
        ks += (ks.empty() ? "" : ", ") + num(p.ks_pooled, 4);
    }
    d("pooled KS at tau 0.04, 0.01, 0.0025", ks);
    const auto& last = rep.per_tau.back();
    const bool decreasing = rep.per_tau[0].ks_pooled > rep.per_tau[1].ks_pooled &&
                            rep.per_tau[1].ks_pooled > rep.per_tau[2].ks_pooled;
    d("max |corr| at smallest tau", num(last.max_abs_correlation, 4))("discarded", rep.discarded);
    r.passed = rep.valid && decreasing && last.ks_pooled < 0.05 && last.max_abs_correlation < 0.1;
    r.detail = d.str();
    return r;
}

// 10. Ratio of field increments to Brownian increments.
CriterionResult rn_ratio(const AcceptanceOptions& o)
{
    CriterionResult r;
    const RnReport rep = rn_ratio_test(local_spec(o, 10), 1.0, tau_ladder, {0}, 2000, 0.1);
    std::string ex;
    for (const auto& p : rep.per_tau) {
        ex += (ex.empty() ? "" : ", ") + num(p.exceedance, 4) + "+-" + num(p.se, 2);
    }
    r.passed = rep.strictly_decreasing;
    r.detail = Detail()("exceedance at tau 0.04, 0.01, 0.0025", ex).str();
    return r;
}

// 11. Renewal module.
CriterionResult renewal_checks()
{
    CriterionResult r;
    Detail d;
    auto instance = [](double step, double horizon) {
        RenewalProblem p;
        p.step = step;
        const auto n = static_cast<std::size_t>(std::llround(horizon / step)) + 1;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) * step;
            p.g.push_back(std::exp(-t));
            p.h.push_back(0.5 * std::exp(-t));
        }
        return p;
    };
    auto error = [&](double step) {
        const RenewalProblem p = instance(step, 2.0);
        const RenewalSolution s = picard_solve(p);
        double worst = 0.0;
        for (std::size_t i = 0; i < s.f.size(); ++i) {
            worst = std::max(worst, std::abs(s.f[i] - std::exp(-0.5 * p.time(i))));
        }
        return std::pair{s, worst};
    };
    const auto [fine, fine_err] = error(1.0 / 512.0);
    const double f1 = fine.f[512];
    const bool value_ok = std::abs(f1 - std::exp(-0.5)) <= 1e-4 && fine_err <= 1e-4;
    d("f(1)", num(f1, 9))("sup error", num(fine_err, 3));
    const double ratio = error(1.0 / 64.0).second / error(1.0 / 128.0).second;
    const bool order_ok = ratio >= 3.5 && ratio <= 4.5;
    d("halving ratio", num(ratio, 4));

    const RenewalProblem p = instance(1.0 / 512.0, 2.0);
    std::vector<double> F = fine.f;
    const auto a_super = comparison_check(p, F, ComparisonDirection::super, 1e-10);
    const auto a_sub = comparison_check(p, F, ComparisonDirection::sub, 1e-10);
    for (auto& v : F) {
        v += 0.1;
    }
    const auto b = comparison_check(p, F, ComparisonDirection::super);
    const std::vector<double> zero(p.size(), 0.0);
    const auto c_sub = comparison_check(p, zero, ComparisonDirection::sub);
    const auto c_super = comparison_check(p, zero, ComparisonDirection::super);
    const bool verdicts_ok = a_super.verdict == ComparisonVerdict::holds &&
                             a_sub.verdict == ComparisonVerdict::holds &&
                             b.verdict == ComparisonVerdict::holds &&
                             c_sub.verdict == ComparisonVerdict::holds &&
                             c_super.verdict == ComparisonVerdict::not_a_super_solution;
    d("F=f", to_string(a_super.verdict) + "/" + to_string(a_sub.verdict))("F=f+0.1 super", to_string(b.verdict))(
        "F=0 sub/super", to_string(c_sub.verdict) + "/" + to_string(c_super.verdict));

    const CriticalBeta cb = critical_beta(simple(1), 2.0);
    const double target = 2.0 * (std::sqrt(5.0) - 1.0);
    const bool beta_ok = cb.exists && std::abs(cb.beta - target) <= 1e-4;
    d("beta*", num(cb.beta, 9))("err", num(std::abs(cb.beta - target), 3));
    r.passed = value_ok && order_ok && verdicts_ok && beta_ok;
    r.detail = d.str();
    return r;
}

// 12. Continuity in the initial data.
CriterionResult flow_continuity(const AcceptanceOptions& o)
{
    CriterionResult r;
    const double q = 1.0;
    const std::vector<double> times{0.5, 1.0, 2.0};
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 2.0;
    cfg.snapshot_times = times;
    cfg.record_times = times;
    cfg.observables = ObservableSet{false, false, false, false, false, false};
    const Box box({33}, Boundary::periodic);
    const Simulator sim(box, simple(1), Nonlinearity::linear(q), cfg, InitialProfile::constant(1.0),
                        NoisePlan(o.seed + 12, cfg.dt));
    const std::size_t replicas = 10000;
    const auto sq = parallel_map(replicas, o.threads, [&](std::uint32_t rep) {
        const CoupledTrajectory c = sim.run_coupled(rep, InitialProfile::constant(1.1));
        std::vector<double> out;
        for (double t : times) {
            const auto& u = c.u.snapshot_at(t).values;
            const auto& v = c.v.snapshot_at(t).values;
            for (std::size_t s = 0; s < u.size(); ++s) {
                out.push_back((u[s] - v[s]) * (u[s] - v[s]));
            }
        }
        return out;
    });
    Detail d;
    bool ok = true;
    const std::size_t sites = box.sites();
    std::vector<double> col(replicas);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        double sup = 0.0;
        for (std::size_t s = 0; s < sites; ++s) {
            for (std::size_t rep = 0; rep < replicas; ++rep) {
                col[rep] = sq[rep][ti * sites + s];
            }
            sup = std::max(sup, mean_se(col).mean);
        }
        const double bound = 0.01 * std::exp(q * q * times[ti]) * 1.25;
        ok = ok && sup <= bound;
        d.note("t=" + num(times[ti]) + ": " + num(sup, 5) + " <= " + num(bound, 5));
    }
    r.passed = ok;
    r.detail = d.str();
    return r;
}

// 13. Thread-count independence of the verify outputs.
CriterionResult determinism(const AcceptanceOptions& o)
{
    CriterionResult r;
    const fs::path root =
        o.scratch.empty() ? fs::temp_directory_path() / "she-determinism" : o.scratch;
    fs::remove_all(root);
    std::vector<std::vector<fs::path>> runs;
    std::vector<std::string> labels;
    for (unsigned threads : {1u, 4u, 8u}) {
        for (int rep = 0; rep < 2; ++rep) {
            const std::string label = "threads" + std::to_string(threads) + "_run" + std::to_string(rep);
            runs.push_back(run_determinism_suite(root / label, threads));
            labels.push_back(label);
        }
    }
    std::size_t compared = 0;
    std::string mismatch;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].size() != runs[0].size()) {
            mismatch = labels[i] + ": different file set";
            break;
        }
        for (std::size_t f = 0; f < runs[0].size(); ++f) {
            const CompareResult c = compare_outputs(runs[0][f], runs[i][f]);
            ++compared;
            if (!c.identical) {
                mismatch = runs[i][f].string() + ": " + c.message;
                break;
            }
        }
        if (!mismatch.empty()) {
            break;
        }
    }
    if (o.scratch.empty()) {
        fs::remove_all(root);
    }
    r.passed = mismatch.empty() && compared > 0;
    r.detail = Detail()("files per run", runs[0].size())("comparisons", compared)(
                   "result", mismatch.empty() ? std::string("byte-identical") : mismatch)
                   .str();
    return r;
}

const char* titles[acceptance_criteria] = {
    "kernel oracles",
    "deterministic limit",
    "oracle triangle",
    "k^2 bracket",
    "Feynman-Kac lower bound",
    "comparison principle",
    "l1 martingale",
    "dissipation",
    "CLT of scaled increments",
    "Radon-Nikodym ratio",
    "renewal module",
    "flow continuity",
    "determinism",
};

} // namespace

std::string format_result(const CriterionResult& r)
{
    char head[96];
    std::snprintf(head, sizeof head, "[%s] %2d  %-26s (%.1f s)  ", r.passed ? "PASS" : "FAIL", r.id,
                  r.title.c_str(), r.seconds);
    return head + r.detail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options)
{
    auto wanted = [&](int id) {
        return options.only.empty() ||
               std::find(options.only.begin(), options.only.end(), id) != options.only.end();
    };
    std::vector<CriterionResult> results;
    DecayRun decay;
    double decay_seconds = 0.0;
    for (int id = 1; id <= acceptance_criteria; ++id) {
        if (!wanted(id)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            if ((id == 7 || id == 8) && !decay.ran) {
                decay = decay_run(options);
                decay_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }
            switch (id) {
            case 1: r = kernel_oracles(); break;
            case 2: r = deterministic_limit(); break;
            case 3: r = oracle_triangle(options); break;
            case 4: r = k2_bracket(options); break;
            case 5: r = fk_lower_bound(options); break;
            case 6: r = comparison(options); break;
            case 7: r = l1_martingale(decay); break;
            case 8: r = dissipation(decay); break;
            case 9: r = clt(options); break;
            case 10: r = rn_ratio(options); break;
            case 11: r = renewal_checks(); break;
            case 12: r = flow_continuity(options); break;
            default: r = determinism(options); break;
            }
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.id = id;
        r.title = titles[id - 1];
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (id == 8 && wanted(7)) {
            r.seconds += decay_seconds;  // shared run, count it against both
        }
        if (id == 1 && r.seconds >= 60.0) {
            r.passed = false;
            r.detail += "; runtime over 60 s";
        }
        if ((id == 3 || id == 4) && r.seconds >= 600.0) {
            r.passed = false;
            r.detail += "; runtime over 10 min";
        }
        if (id == 8 && r.seconds >= 1800.0) {
            r.passed = false;
            r.detail += "; runtime over 30 min";
        }
        if (options.on_result) {
            options.on_result(r);
        }
        results.push_back(r);
    }
    return results;
}

} // namespace she
