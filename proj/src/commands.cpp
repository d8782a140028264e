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

#include "she/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "she/errors.hpp"
#include "she/experiments.hpp"
#include "she/moments.hpp"
#include "she/parallel.hpp"
#include "she/renewal.hpp"
#include "she/stats.hpp"

namespace she {

using nlohmann::json;
namespace fs = std::filesystem;

std::string Stamp::comment_line() const
{
    return "# she-lattice " + version + " manifest=" + manifest_hash +
           " seed=" + std::to_string(seed) + " seed_source=" + seed_source;
}

Stamp apply_seed_override(RunManifest& manifest, const char* env_value)
{
    Stamp s;
    s.manifest_hash = manifest.hash;
    if (env_value && *env_value) {
        const std::string text(env_value);
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw ManifestInvalid("SHE_SEED", "expected a nonnegative integer, got '" + text + "'");
        }
        manifest.seed = seed;
        s.seed_source = "SHE_SEED";
    }
    s.seed = manifest.seed;
    return s;
}

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const fs::path& file, const Stamp& stamp,
                     const std::vector<std::string>& header)
    : path_(file)
{
    if (file.has_parent_path()) {
        fs::create_directories(file.parent_path());
    }
    out_.open(file, std::ios::binary | std::ios::trunc);
    if (!out_) {
        throw std::runtime_error("cannot write '" + file.string() + "'");
    }
    out_ << stamp.comment_line() << '\n';
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out_ << (i ? "," : "") << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values)
{
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) {
        cells.push_back(format_number(v));
    }
    row(cells);
}

namespace {

json stamp_json(const Stamp& s)
{
    return {{"artifact", "she-lattice"},
            {"version", s.version},
            {"manifest_hash", s.manifest_hash},
            {"seed", s.seed},
            {"seed_source", s.seed_source}};
}

fs::path write_json(const fs::path& file, const Stamp& stamp, json body)
{
    fs::create_directories(file.parent_path());
    body["stamp"] = stamp_json(stamp);
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + file.string() + "'");
    }
    out << body.dump(2) << '\n';
    return file;
}

std::string point_label(const LatticePoint& p)
{
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += (i ? " " : "") + std::to_string(p[i]);
    }
    return s;
}

json safe_number(double v)
{
    return std::isfinite(v) ? json(v) : json(format_number(v));
}

void announce(const CommandContext& ctx, const std::vector<fs::path>& files)
{
    if (ctx.log) {
        for (const auto& f : files) {
            *ctx.log << f.string() << '\n';
        }
    }
}

void require_linear(const RunManifest& m, const std::string& what)
{
    if (!m.sigma.is_linear()) {
        throw ManifestInvalid("sigma.form", what + " requires sigma.form = linear");
    }
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

} // namespace

std::vector<fs::path> cmd_simulate(const RunManifest& m, const CommandContext& ctx)
{
    const RunSpec spec = run_spec(m, ctx.threads);
    const Simulator sim = make_simulator(spec);
    const auto trajs = parallel_map(m.replicas, ctx.threads,
                                    [&](std::uint32_t r) { return sim.run(r); });
    std::vector<std::string> header{"replica", "t"};
    const auto& cols = trajs.front().columns;
    header.insert(header.end(), cols.begin(), cols.end());
    CsvWriter csv(ctx.out_dir / "trajectory.csv", ctx.stamp, header);
    for (const auto& tr : trajs) {
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            std::vector<double> row{static_cast<double>(tr.replica), tr.times[i]};
            row.insert(row.end(), tr.rows[i].begin(), tr.rows[i].end());
            csv.row(row);
        }
    }
    std::vector<fs::path> files{csv.path()};
    if (!m.solver.snapshot_times.empty()) {
        std::vector<std::string> sh{"replica", "t"};
        for (int a = 0; a < m.box.dim(); ++a) {
            sh.push_back("x" + std::to_string(a));
        }
        sh.push_back("value");
        CsvWriter snaps(ctx.out_dir / "snapshots.csv", ctx.stamp, sh);
        for (const auto& tr : trajs) {
            for (const auto& s : tr.snapshots) {
                for (std::size_t site = 0; site < s.values.size(); ++site) {
                    std::vector<double> row{static_cast<double>(tr.replica), s.time};
                    for (int c : m.box.point(site)) {
                        row.push_back(c);
                    }
                    row.push_back(s.values[site]);
                    snaps.row(row);
                }
            }
        }
        files.push_back(snaps.path());
    }
    json warnings = json::array();
    for (const auto& w : trajs.front().warnings) {
        warnings.push_back(w);
    }
    files.push_back(write_json(ctx.out_dir / "simulate.json", ctx.stamp,
                               {{"replicas", m.replicas},
                                {"steps", sim.steps()},
                                {"escape_proxy", safe_number(sim.escape_proxy())},
                                {"warnings", warnings}}));
    announce(ctx, files);
    return files;
}

namespace {

/// Field Monte Carlo moments for every (k, t) from one set of replicas.
std::vector<MomentEstimate> field_moments(const RunManifest& m, unsigned threads)
{
    const auto& b = m.moments;
    RunSpec spec = run_spec(m, threads);
    spec.config.horizon = std::max(spec.config.horizon, *std::max_element(b.times.begin(), b.times.end()));
    spec.config.record_times = b.times;
    spec.config.marked_points = {b.x};
    spec.config.observables = ObservableSet{false, false, false, false, !b.summed, false};
    spec.config.snapshot_times = b.summed ? b.times : std::vector<double>{};
    if (!b.summed && !m.box.contains(b.x)) {
        throw ManifestInvalid("moments.x", "point lies outside the box");
    }
    const Simulator sim = make_simulator(spec);
    const std::size_t nk = b.k.size();
    const std::size_t nt = b.times.size();
    // samples[r][ti * nk + ki]
    const auto samples = parallel_map(m.replicas, threads, [&](std::uint32_t r) {
        const Trajectory tr = sim.run(r);
        std::vector<double> out(nt * nk);
        for (std::size_t ti = 0; ti < nt; ++ti) {
            for (std::size_t ki = 0; ki < nk; ++ki) {
                const int k = b.k[ki];
                if (b.summed) {
                    const auto& vals = tr.snapshot_at(b.times[ti]).values;
                    std::vector<double> powers(vals.size());
                    std::transform(vals.begin(), vals.end(), powers.begin(),
                                   [k](double v) { return std::pow(std::abs(v), k); });
                    out[ti * nk + ki] = pairwise_sum(powers);
                } else {
                    out[ti * nk + ki] = std::pow(std::abs(tr.rows[tr.row_at(b.times[ti])][0]), k);
                }
            }
        }
        return out;
    });
    std::vector<MomentEstimate> est;
    std::vector<double> col(samples.size());
    for (std::size_t ki = 0; ki < nk; ++ki) {
        for (std::size_t ti = 0; ti < nt; ++ti) {
            for (std::size_t r = 0; r < samples.size(); ++r) {
                col[r] = samples[r][ti * nk + ki];
            }
            const MeanSe ms = mean_se(col);
            MomentEstimate e;
            e.k = b.k[ki];
            e.t = b.times[ti];
            e.x = b.x;
            e.summed = b.summed;
            e.estimate = ms.mean;
            e.se = ms.se;
            e.replicas = ms.n;
            e.method = MomentMethod::field_mc;
            est.push_back(e);
        }
    }
    return est;
}

std::vector<MomentEstimate> fk_moments(const RunManifest& m, const std::vector<int>& ks,
                                       const std::vector<double>& times, const LatticePoint& x,
                                       bool summed, unsigned threads)
{
    require_linear(m, "feynman-kac");
    std::vector<MomentEstimate> out;
    std::uint32_t salt = 0;
    for (int k : ks) {
        for (double t : times) {
            FeynmanKacOptions opt{m.seed, salt++, threads};
            out.push_back(summed ? fk_pam_moment_summed(m.kernel, m.sigma.q(), m.u0, k, t,
                                                        m.replicas, opt)
                                 : fk_pam_moment(m.kernel, m.sigma.q(), m.u0, k, t, x,
                                                 m.replicas, opt));
        }
    }
    return out;
}

} // namespace

std::vector<fs::path> cmd_moments(const RunManifest& m, const CommandContext& ctx)
{
    const auto& b = m.moments;
    std::vector<MomentEstimate> all;
    for (const auto& method : b.methods) {
        if (method == "field-mc") {
            auto e = field_moments(m, ctx.threads);
            all.insert(all.end(), e.begin(), e.end());
        } else if (method == "feynman-kac") {
            auto e = fk_moments(m, b.k, b.times, b.x, b.summed, ctx.threads);
            all.insert(all.end(), e.begin(), e.end());
        } else {
            require_linear(m, "renewal moments");
            if (!b.summed || b.k != std::vector<int>{2}) {
                throw ManifestInvalid("moments.methods",
                                      "renewal gives sum_x E u^2 only: use k = [2], summed = true");
            }
            const double horizon = *std::max_element(b.times.begin(), b.times.end());
            const double step = m.renewal.step;
            const RenewalCurve curve =
                pam_second_moment_renewal(m.kernel, m.sigma.q(), m.u0, horizon, step, m.renewal.tol);
            for (double t : b.times) {
                const double pos = t / step;
                const auto i = static_cast<std::size_t>(std::llround(pos));
                if (std::abs(pos - static_cast<double>(i)) > 1e-9 || i >= curve.values.size()) {
                    throw ManifestInvalid("moments.times", "renewal times must be multiples of renewal.step");
                }
                MomentEstimate e;
                e.k = 2;
                e.t = t;
                e.summed = true;
                e.estimate = curve.values[i];
                e.se = curve.halving_error;
                e.replicas = 0;
                e.method = MomentMethod::renewal;
                all.push_back(e);
            }
        }
    }
    CsvWriter csv(ctx.out_dir / "moments.csv", ctx.stamp,
                  {"method", "k", "t", "estimate", "se", "replicas"});
    for (const auto& e : all) {
        csv.row({to_string(e.method), std::to_string(e.k), format_number(e.t),
                 format_number(e.estimate), format_number(e.se), std::to_string(e.replicas)});
    }
    std::vector<fs::path> files{csv.path()};
    files.push_back(write_json(ctx.out_dir / "moments.json", ctx.stamp,
                               {{"x", b.x}, {"summed", b.summed}, {"replicas", m.replicas}}));
    announce(ctx, files);
    return files;
}

std::vector<fs::path> cmd_lyapunov(const RunManifest& m, const CommandContext& ctx)
{
    const auto& b = m.lyapunov;
    std::vector<MomentEstimate> est;
    std::string method;
    if (m.sigma.is_linear()) {
        est = fk_moments(m, b.k, b.times, m.moments.x, false, ctx.threads);
        method = "feynman-kac";
    } else {
        RunManifest copy = m;
        copy.moments.k = b.k;
        copy.moments.times = b.times;
        copy.moments.summed = false;
        est = field_moments(copy, ctx.threads);
        method = "field-mc";
    }
    CsvWriter series(ctx.out_dir / "lyapunov_series.csv", ctx.stamp,
                     {"method", "k", "t", "log_moment", "log_se"});
    std::vector<GrowthRate> rates;
    std::vector<LyapunovFit> fits;
    for (int k : b.k) {
        std::vector<double> t, lm, ls;
        for (const auto& e : est) {
            if (e.k != k) {
                continue;
            }
            t.push_back(e.t);
            lm.push_back(std::log(e.estimate));
            ls.push_back(e.se / e.estimate);
            series.row({method, std::to_string(k), format_number(e.t), format_number(lm.back()),
                        format_number(ls.back())});
        }
        const LyapunovFit fit =
            fit_lyapunov(t, lm, ls, b.window_start, b.window_end, b.resamples, m.seed);
        fits.push_back(fit);
        rates.push_back({k, fit.slope, fit.ci_low, fit.ci_high});
    }
    const auto checks = check_k2_bounds(rates, m.sigma.lip(), m.sigma.ell(), b.eps);
    CsvWriter fitcsv(ctx.out_dir / "lyapunov_fit.csv", ctx.stamp,
                     {"k", "gamma", "ci_low", "ci_high", "window_start", "window_end", "points",
                      "upper_bound", "lower_threshold", "lower_bound", "verdict"});
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const auto& f = fits[i];
        const auto& c = checks[i];
        fitcsv.row({std::to_string(rates[i].k), format_number(f.slope), format_number(f.ci_low),
                    format_number(f.ci_high), format_number(f.window_start),
                    format_number(f.window_end), std::to_string(f.points),
                    format_number(c.upper_bound), format_number(c.lower_threshold),
                    format_number(c.lower_bound), to_string(c.verdict)});
    }
    std::vector<fs::path> files{series.path(), fitcsv.path()};
    announce(ctx, files);
    return files;
}

namespace {

std::vector<double> read_grid_file(const std::string& file)
{
    std::ifstream in(file);
    if (!in) {
        throw ManifestInvalid("renewal", "cannot open grid file '" + file + "'");
    }
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        // Last comma-separated field; a non-numeric first row is a header.
        const auto comma = line.rfind(',');
        const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            out.push_back(v);
        } catch (const std::exception&) {
            if (!out.empty()) {
                throw ManifestInvalid("renewal", "non-numeric value in '" + file + "': " + line);
            }
        }
    }
    return out;
}

} // namespace

std::vector<fs::path> cmd_renewal(const RunManifest& m, const CommandContext& ctx)
{
    const auto& b = m.renewal;
    std::vector<fs::path> files;
    if (b.mode == "pam-second-moment") {
        require_linear(m, "renewal pam-second-moment");
        const RenewalCurve curve =
            pam_second_moment_renewal(m.kernel, m.sigma.q(), m.u0, b.horizon, b.step, b.tol);
        CsvWriter csv(ctx.out_dir / "renewal.csv", ctx.stamp, {"t", "f"});
        for (std::size_t i = 0; i < curve.times.size(); ++i) {
            csv.row(std::vector<double>{curve.times[i], curve.values[i]});
        }
        files.push_back(csv.path());
        files.push_back(write_json(ctx.out_dir / "renewal.json", ctx.stamp,
                                   {{"mode", b.mode},
                                    {"step", b.step},
                                    {"horizon", b.horizon},
                                    {"halving_error", curve.halving_error}}));
    } else {
        RenewalProblem p;
        p.step = b.step;
        p.g = read_grid_file(b.g_file);
        p.h = read_grid_file(b.h_file);
        p.beta = b.beta;
        if (p.g.size() != p.h.size() || p.g.empty()) {
            throw ManifestInvalid("renewal", "g and h grids must be non-empty and of equal length");
        }
        validate(p);
        const RenewalSolution sol = picard_solve(p, 1e-13);
        CsvWriter csv(ctx.out_dir / "renewal.csv", ctx.stamp, {"t", "f", "upper_bound"});
        for (std::size_t i = 0; i < sol.f.size(); ++i) {
            csv.row(std::vector<double>{p.time(i), sol.f[i], sol.upper_bound(i, p.step, p.beta)});
        }
        files.push_back(csv.path());
        files.push_back(write_json(ctx.out_dir / "renewal.json", ctx.stamp,
                                   {{"mode", b.mode},
                                    {"iterations", sol.iterations},
                                    {"rho_hat", sol.rho_hat},
                                    {"gamma_hat", sol.gamma_hat},
                                    {"beta", p.beta}}));
    }
    announce(ctx, files);
    return files;
}

std::vector<fs::path> cmd_clt(const RunManifest& m, const CommandContext& ctx)
{
    const auto& b = m.clt;
    if (!m.u0.nonnegative()) {
        throw ManifestInvalid("u0", "clt-test needs a nonnegative initial profile (positive solutions)");
    }
    const CltReport rep = clt_increment_test(run_spec(m, ctx.threads), b.t, b.taus, b.points,
                                             m.replicas, {b.ks_relaxation, b.max_discard_fraction});
    CsvWriter csv(ctx.out_dir / "clt.csv", ctx.stamp,
                  {"tau", "ks_pooled", "threshold", "pass", "max_abs_correlation", "samples",
                   "lil_envelope", "abs_increment_q50", "abs_increment_q99", "abs_increment_max"});
    for (const auto& r : rep.per_tau) {
        csv.row({format_number(r.tau), format_number(r.ks_pooled), format_number(r.threshold),
                 r.ks_pooled < r.threshold ? "1" : "0", format_number(r.max_abs_correlation),
                 std::to_string(r.samples), format_number(r.lil_envelope),
                 format_number(r.abs_increment_q50), format_number(r.abs_increment_q99),
                 format_number(r.abs_increment_max)});
    }
    std::vector<std::string> sh{"tau", "site", "ks"};
    CsvWriter sites(ctx.out_dir / "clt_sites.csv", ctx.stamp, sh);
    for (const auto& r : rep.per_tau) {
        for (std::size_t j = 0; j < r.ks_per_site.size(); ++j) {
            sites.row({format_number(r.tau), point_label(b.points[j]), format_number(r.ks_per_site[j])});
        }
    }
    std::vector<fs::path> files{csv.path(), sites.path()};
    files.push_back(write_json(ctx.out_dir / "clt.json", ctx.stamp,
                               {{"t", rep.t},
                                {"replicas", rep.replicas},
                                {"discarded", rep.discarded},
                                {"discard_fraction", rep.discard_fraction},
                                {"valid", rep.valid},
                                {"degenerate", rep.degenerate},
                                {"ks_relaxation", rep.ks_relaxation},
                                {"max_discard_fraction", b.max_discard_fraction}}));
    announce(ctx, files);
    return files;
}

std::vector<fs::path> cmd_rn(const RunManifest& m, const CommandContext& ctx)
{
    const auto& b = m.rn;
    const RnReport rep = rn_ratio_test(run_spec(m, ctx.threads), b.t, b.taus, b.x, m.replicas, b.eta);
    CsvWriter csv(ctx.out_dir / "rn.csv", ctx.stamp,
                  {"tau", "exceedance", "se", "samples", "discarded"});
    for (const auto& r : rep.per_tau) {
        csv.row({format_number(r.tau), format_number(r.exceedance), format_number(r.se),
                 std::to_string(r.samples), std::to_string(r.discarded)});
    }
    std::vector<fs::path> files{csv.path()};
    files.push_back(write_json(ctx.out_dir / "rn.json", ctx.stamp,
                               {{"t", rep.t},
                                {"eta", rep.eta},
                                {"x", b.x},
                                {"strictly_decreasing", rep.strictly_decreasing}}));
    announce(ctx, files);
    return files;
}

std::vector<fs::path> cmd_dissipation(const RunManifest& m, const CommandContext& ctx)
{
    const auto& b = m.dissipation;
    const DissipationReport rep = dissipation_experiment(run_spec(m, ctx.threads),
                                                         {b.fit_start, b.fit_end, m.replicas});
    const auto& n = rep.norms;
    CsvWriter csv(ctx.out_dir / "norms.csv", ctx.stamp,
                  {"t", "l1_mean", "l1_se", "l2sq_mean", "l2sq_se", "sup_mean", "sup_se",
                   "negfrac_mean"});
    for (std::size_t i = 0; i < n.times.size(); ++i) {
        csv.row(std::vector<double>{n.times[i], n.l1_mean[i], n.l1_se[i], n.l2sq_mean[i],
                                    n.l2sq_se[i], n.sup_mean[i], n.sup_se[i], n.negfrac_mean[i]});
    }
    std::vector<fs::path> files{csv.path()};
    files.push_back(write_json(ctx.out_dir / "dissipation.json", ctx.stamp,
                               {{"fit_slope", safe_number(rep.fit_slope)},
                                {"fit_slope_se", safe_number(rep.fit_slope_se)},
                                {"fit_start", rep.fit_start},
                                {"fit_end", rep.fit_end},
                                {"fit_points", rep.fit_points},
                                {"target_exponent", rep.target_exponent},
                                {"chain_violations", rep.chain_violations},
                                {"max_l1", rep.max_l1},
                                {"replicas", m.replicas},
                                {"warnings", rep.warnings}}));
    announce(ctx, files);
    return files;
}

std::vector<fs::path> cmd_classify(const RunManifest& m, const CommandContext& ctx)
{
    const RegimeReport rep = regime_classify(m.sigma.lip(), m.sigma.ell(), m.kernel);
    CsvWriter csv(ctx.out_dir / "classify.csv", ctx.stamp,
                  {"regime", "upsilon0", "lip", "ell", "lip_term", "ell_term", "beta_star"});
    csv.row({to_string(rep.regime), format_number(rep.upsilon0), format_number(m.sigma.lip()),
             format_number(m.sigma.ell()), format_number(rep.lip_term), format_number(rep.ell_term),
             rep.beta_star ? format_number(*rep.beta_star) : ""});
    std::vector<fs::path> files{csv.path()};
    announce(ctx, files);
    return files;
}

std::vector<fs::path> cmd_kernel(const WalkKernel& kernel, const KernelQuery& q,
                                 const CommandContext& ctx)
{
    std::vector<fs::path> files;
    const std::vector<std::string> header{"argument", "value", "est_error"};
    if (q.pbar) {
        const auto taus = linspace(0.0, q.tmax, std::max<std::size_t>(q.points, 1));
        const auto vals = pbar_curve(kernel, taus, q.tol);
        CsvWriter csv(ctx.out_dir / "pbar.csv", ctx.stamp, header);
        for (std::size_t i = 0; i < taus.size(); ++i) {
            csv.row(std::vector<double>{taus[i], vals[i].value, vals[i].est_error});
        }
        files.push_back(csv.path());
    }
    if (q.upsilon) {
        const auto vals = upsilon_curve(kernel, q.betas, q.tol);
        CsvWriter csv(ctx.out_dir / "upsilon.csv", ctx.stamp, header);
        for (std::size_t i = 0; i < q.betas.size(); ++i) {
            csv.row(std::vector<double>{q.betas[i], vals[i].value, vals[i].est_error});
        }
        files.push_back(csv.path());
    }
    if (q.prob) {
        const TransitionTable table = transition_table(kernel, q.tmax, 1e-12);
        CsvWriter csv(ctx.out_dir / "transition.csv", ctx.stamp, header);
        const std::size_t side = table.side();
        const int d = table.dim;
        std::size_t total = 1;
        for (int a = 0; a < d; ++a) {
            total *= side;
        }
        LatticePoint x(d);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            for (int a = d - 1; a >= 0; --a) {
                x[a] = static_cast<int>(rem % side) - table.radius;
                rem /= side;
            }
            const double v = table.at(x);
            if (v > 0.0) {
                csv.row({point_label(x), format_number(v), format_number(table.truncation_bound)});
            }
        }
        files.push_back(csv.path());
    }
    announce(ctx, files);
    return files;
}

std::optional<std::string> read_stamp_line(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    std::string line;
    if (!in || !std::getline(in, line) || line.rfind("# she-lattice ", 0) != 0) {
        return std::nullopt;
    }
    return line;
}

namespace {

std::string hash_of(const std::string& stamp)
{
    const auto at = stamp.find("manifest=");
    if (at == std::string::npos) {
        return {};
    }
    const auto end = stamp.find(' ', at);
    return stamp.substr(at + 9, end == std::string::npos ? std::string::npos : end - at - 9);
}

std::string slurp(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

CompareResult compare_outputs(const fs::path& a, const fs::path& b)
{
    CompareResult r;
    const auto sa = read_stamp_line(a);
    const auto sb = read_stamp_line(b);
    if (!sa || !sb) {
        r.refused = true;
        r.message = "missing reproducibility stamp in " + (!sa ? a : b).string();
        return r;
    }
    if (hash_of(*sa) != hash_of(*sb)) {
        r.refused = true;
        r.message = "manifest hashes differ (" + hash_of(*sa) + " vs " + hash_of(*sb) +
                    "): refusing to compare outputs of different manifests";
        return r;
    }
    r.identical = slurp(a) == slurp(b);
    r.message = r.identical ? "identical" : "contents differ";
    return r;
}

namespace {

constexpr const char* determinism_manifests[][2] = {
    {"simulate", R"({"kernel": {"dim": 1, "jumps": "simple"},
        "box": {"extents": [17]},
        "sigma": {"form": "sine", "q": 1.0},
        "u0": {"type": "constant", "value": 1.0},
        "solver": {"dt": 0.01, "horizon": 0.5, "record_every": 10, "marked_points": [[0], [3]]},
        "seed": 11, "replicas": 24})"},
    {"moments", R"({"kernel": {"dim": 1, "jumps": "simple"},
        "box": {"extents": [21]},
        "sigma": {"form": "linear", "q": 0.5},
        "u0": {"type": "delta", "at": [0]},
        "solver": {"dt": 0.01, "scheme": "split-exact-linear"},
        "moments": {"methods": ["field-mc", "feynman-kac"], "k": [2], "times": [0.5, 1.0], "summed": true},
        "seed": 12, "replicas": 64})"},
    {"clt", R"({"kernel": {"dim": 1, "jumps": "simple"},
        "box": {"extents": [15]},
        "sigma": {"form": "linear", "q": 1.0},
        "u0": {"type": "constant", "value": 1.0},
        "solver": {"dt": 0.001, "scheme": "split-exact-linear"},
        "clt": {"t": 0.2, "taus": [0.04, 0.02], "points": [[0], [4]]},
        "seed": 13, "replicas": 40})"},
};

} // namespace

std::vector<fs::path> run_determinism_suite(const fs::path& dir, unsigned threads)
{
    std::vector<fs::path> files;
    for (const auto& [name, text] : determinism_manifests) {
        RunManifest m = parse_manifest(text);
        CommandContext ctx;
        ctx.threads = threads;
        ctx.out_dir = dir / name;
        ctx.stamp = apply_seed_override(m, nullptr);
        std::vector<fs::path> out;
        const std::string n = name;
        if (n == "simulate") {
            out = cmd_simulate(m, ctx);
        } else if (n == "moments") {
            out = cmd_moments(m, ctx);
        } else {
            out = cmd_clt(m, ctx);
        }
        for (const auto& f : out) {
            if (f.extension() == ".csv") {
                files.push_back(f);
            }
        }
    }
    return files;
}

} // namespace she
