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

#include "she/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "she/errors.hpp"

namespace she {

namespace {

std::size_t to_step(double t, double dt, const char* what)
{
    const double r = t / dt;
    const double n = std::round(r);
    if (n < 0.0 || std::abs(r - n) > 1e-6) {
        std::ostringstream os;
        os << what << " time " << t << " is not a multiple of dt = " << dt;
        throw std::invalid_argument(os.str());
    }
    return static_cast<std::size_t>(n);
}

std::string point_label(const LatticePoint& x)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t a = 0; a < x.size(); ++a) {
        os << (a ? "," : "") << x[a];
    }
    os << ']';
    return os.str();
}

[[noreturn]] void non_finite(const Box& box, std::size_t site, std::size_t step)
{
    std::ostringstream os;
    os << "non-finite field value at site " << point_label(box.point(site)) << " in step "
       << step;
    throw NumericFailure(os.str(), std::numeric_limits<double>::infinity());
}

} // namespace

Scheme parse_scheme(const std::string& name)
{
    if (name == "euler") {
        return Scheme::euler;
    }
    if (name == "split-exact-linear") {
        return Scheme::split_exact_linear;
    }
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(Scheme s)
{
    return s == Scheme::euler ? "euler" : "split-exact-linear";
}

void validate(const SolverConfig& config, const Nonlinearity& sigma)
{
    if (!(config.dt > 0.0) || config.dt > 1.0) {
        throw std::invalid_argument("solver.dt must lie in (0, 1]");
    }
    if (!(config.horizon >= 0.0)) {
        throw std::invalid_argument("solver.T must be nonnegative");
    }
    if (config.dt * sigma.lip() * sigma.lip() > config.accuracy_limit) {
        std::ostringstream os;
        os << "solver.dt * Lip^2 = " << config.dt * sigma.lip() * sigma.lip()
           << " exceeds accuracy limit " << config.accuracy_limit;
        throw std::invalid_argument(os.str());
    }
    if (config.scheme == Scheme::split_exact_linear && !sigma.is_linear()) {
        throw std::invalid_argument("split-exact-linear requires a linear sigma");
    }
    if (config.record_every == 0) {
        throw std::invalid_argument("solver.record_every must be positive");
    }
}

FieldState em_step(const Stencil& stencil, const Nonlinearity& sigma, const FieldState& state,
                   double dt, std::span<const double> increments)
{
    if (!(dt > 0.0)) {
        throw std::invalid_argument("em_step: dt must be positive");
    }
    FieldState next{state.time + dt, state.step + 1, std::vector<double>(state.values.size())};
    stencil.apply(state.values, next.values);
    for (std::size_t s = 0; s < next.values.size(); ++s) {
        const double u = state.values[s];
        next.values[s] = u + dt * next.values[s] + sigma(u) * increments[s];
        if (!std::isfinite(next.values[s])) {
            std::ostringstream os;
            os << "non-finite field value at site index " << s << " in step " << state.step;
            throw NumericFailure(os.str(), std::numeric_limits<double>::infinity());
        }
    }
    return next;
}

FieldState split_step_linear(const Stencil& stencil, const Nonlinearity& sigma,
                             const FieldState& state, double dt,
                             std::span<const double> increments)
{
    if (!sigma.is_linear()) {
        throw std::invalid_argument("split_step_linear: sigma must be linear");
    }
    const double q = sigma.q();
    FieldState next{state.time + dt, state.step + 1, std::vector<double>(state.values.size())};
    stencil.drift_step(state.values, dt, next.values);
    for (std::size_t s = 0; s < next.values.size(); ++s) {
        next.values[s] *= std::exp(q * increments[s] - 0.5 * q * q * dt);
    }
    return next;
}

std::size_t Trajectory::column(const std::string& name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        throw std::invalid_argument("trajectory has no column '" + name + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

std::size_t Trajectory::row_at(double t) const
{
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) < 1e-9) {
            return i;
        }
    }
    std::ostringstream os;
    os << "time " << t << " was not recorded";
    throw std::invalid_argument(os.str());
}

const Snapshot& Trajectory::snapshot_at(double t) const
{
    for (const auto& s : snapshots) {
        if (std::abs(s.time - t) < 1e-9) {
            return s;
        }
    }
    std::ostringstream os;
    os << "time " << t << " was not snapshotted";
    throw std::invalid_argument(os.str());
}

double CoupledTrajectory::worst_violation() const noexcept
{
    double w = 0.0;
    for (double v : max_violation) {
        w = std::max(w, v);
    }
    return w;
}

Simulator::Simulator(Box box, WalkKernel kernel, Nonlinearity sigma, SolverConfig config,
                     InitialProfile u0, NoisePlan noise)
    : box_(std::move(box)),
      kernel_(std::move(kernel)),
      sigma_(std::move(sigma)),
      config_(std::move(config)),
      u0_(std::move(u0)),
      noise_(noise),
      stencil_(box_, kernel_.jumps, u0_),
      steps_(0),
      refinement_(1)
{
    validate(config_, sigma_);
    if (kernel_.rate != 1.0) {
        throw std::invalid_argument("Simulator: the generator is defined at rate 1");
    }
    steps_ = to_step(config_.horizon, config_.dt, "horizon");
    refinement_ = noise_.refinement(config_.dt);
    if (config_.record_times.empty()) {
        for (std::size_t n = 0; n <= steps_; n += config_.record_every) {
            record_steps_.push_back(n);
        }
        if (record_steps_.back() != steps_) {
            record_steps_.push_back(steps_);
        }
    } else {
        for (double t : config_.record_times) {
            record_steps_.push_back(to_step(t, config_.dt, "record"));
        }
    }
    for (double t : config_.snapshot_times) {
        snapshot_steps_.push_back(to_step(t, config_.dt, "snapshot"));
    }
    for (auto* v : {&record_steps_, &snapshot_steps_}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
        if (!v->empty() && v->back() > steps_) {
            throw std::invalid_argument("record/snapshot time beyond the horizon");
        }
    }
    for (const auto& x : config_.marked_points) {
        if (static_cast<int>(x.size()) != box_.dim() || !box_.contains(x)) {
            throw std::invalid_argument("marked point " + point_label(x) + " is outside the box");
        }
        marked_sites_.push_back(box_.index(x));
    }
}

double Simulator::escape_proxy() const noexcept
{
    double p = 0.0;
    for (int a = 0; a < box_.dim(); ++a) {
        double m2 = 0.0;
        for (const auto& j : kernel_.jumps.jumps()) {
            m2 += j.mass * j.vec[static_cast<std::size_t>(a)] * j.vec[static_cast<std::size_t>(a)];
        }
        const double half = 0.5 * box_.extents()[static_cast<std::size_t>(a)];
        p += config_.horizon * m2 / (half * half);
    }
    return std::min(1.0, p);
}

std::vector<std::string> Simulator::run_warnings() const
{
    std::vector<std::string> w;
    const double safe = box_.wrap_safe_horizon(kernel_.jumps);
    if (config_.horizon > safe) {
        std::ostringstream os;
        os << "horizon " << config_.horizon << " exceeds the wrap-safe horizon " << safe
           << " (escape proxy " << escape_proxy() << ")";
        w.push_back(os.str());
    }
    return w;
}

std::vector<std::string> Simulator::column_names() const
{
    std::vector<std::string> names;
    const auto& obs = config_.observables;
    if (obs.l1) names.emplace_back("l1");
    if (obs.l2sq) names.emplace_back("l2sq");
    if (obs.sup) names.emplace_back("sup");
    if (obs.negfrac) names.emplace_back("negfrac");
    if (obs.site_values) {
        for (const auto& x : config_.marked_points) {
            names.push_back("u" + point_label(x));
        }
    }
    if (obs.brownian) {
        for (const auto& x : config_.marked_points) {
            names.push_back("B" + point_label(x));
        }
    }
    return names;
}

struct Simulator::Recorder {
    const Simulator& sim;
    Trajectory& traj;
    std::size_t next_record = 0;
    std::size_t next_snapshot = 0;

    void maybe_record(std::size_t step, std::span<const double> u, std::span<const double> B)
    {
        const auto& rs = sim.record_steps_;
        if (next_record < rs.size() && rs[next_record] == step) {
            ++next_record;
            traj.times.push_back(static_cast<double>(step) * sim.config_.dt);
            traj.rows.push_back(observe(u, B));
        }
        const auto& ss = sim.snapshot_steps_;
        if (next_snapshot < ss.size() && ss[next_snapshot] == step) {
            ++next_snapshot;
            traj.snapshots.push_back({static_cast<double>(step) * sim.config_.dt,
                                      std::vector<double>(u.begin(), u.end())});
        }
    }

    std::vector<double> observe(std::span<const double> u, std::span<const double> B) const
    {
        std::vector<double> row;
        const auto& obs = sim.config_.observables;
        double l1 = 0.0;
        double l2 = 0.0;
        double sup = 0.0;
        std::size_t neg = 0;
        for (double v : u) {
            l1 += std::abs(v);
            l2 += v * v;
            sup = std::max(sup, std::abs(v));
            neg += v < 0.0 ? 1 : 0;
        }
        if (obs.l1) row.push_back(l1);
        if (obs.l2sq) row.push_back(l2);
        if (obs.sup) row.push_back(sup);
        if (obs.negfrac) row.push_back(static_cast<double>(neg) / static_cast<double>(u.size()));
        if (obs.site_values) {
            for (std::size_t s : sim.marked_sites_) {
                row.push_back(u[s]);
            }
        }
        if (obs.brownian) {
            for (double b : B) {
                row.push_back(b);
            }
        }
        return row;
    }
};

void Simulator::step_into(const Stencil& stencil, std::vector<double>& u,
                          std::vector<double>& scratch, std::span<const double> dB,
                          std::size_t step) const
{
    const double dt = config_.dt;
    const std::size_t n = u.size();
    if (config_.scheme == Scheme::split_exact_linear) {
        const double q = sigma_.q();
        const double drift = -0.5 * q * q * dt;
        stencil.drift_step(u, dt, scratch);
        for (std::size_t s = 0; s < n; ++s) {
            u[s] = scratch[s] * std::exp(q * dB[s] + drift);
        }
    } else {
        stencil.apply(u, scratch);
        if (sigma_.is_linear()) {
            const double q = sigma_.q();
            for (std::size_t s = 0; s < n; ++s) {
                u[s] = u[s] + dt * scratch[s] + q * u[s] * dB[s];
            }
        } else {
            for (std::size_t s = 0; s < n; ++s) {
                u[s] = u[s] + dt * scratch[s] + sigma_(u[s]) * dB[s];
            }
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (!std::isfinite(u[s])) {
            non_finite(box_, s, step);
        }
    }
}

Trajectory Simulator::run(std::uint32_t replica) const
{
    Trajectory traj;
    traj.replica = replica;
    traj.columns = column_names();
    traj.warnings = run_warnings();
    std::vector<double> u = u0_.on_box(box_);
    std::vector<double> scratch(u.size());
    std::vector<double> dB(u.size());
    std::vector<double> B(config_.observables.brownian ? marked_sites_.size() : 0, 0.0);
    Recorder rec{*this, traj};
    rec.maybe_record(0, u, B);
    for (std::size_t n = 0; n < steps_; ++n) {
        noise_.increments(replica, n, refinement_, dB);
        step_into(stencil_, u, scratch, dB, n);
        for (std::size_t i = 0; i < B.size(); ++i) {
            B[i] += dB[marked_sites_[i]];
        }
        rec.maybe_record(n + 1, u, B);
    }
    return traj;
}

CoupledTrajectory Simulator::run_coupled(std::uint32_t replica, const InitialProfile& v0) const
{
    CoupledTrajectory out;
    out.u.replica = out.v.replica = replica;
    out.u.columns = out.v.columns = column_names();
    out.u.warnings = run_warnings();
    const Stencil v_stencil(box_, kernel_.jumps, v0);
    std::vector<double> u = u0_.on_box(box_);
    std::vector<double> v = v0.on_box(box_);
    std::vector<double> scratch(u.size());
    std::vector<double> dB(u.size());
    std::vector<double> Bu(config_.observables.brownian ? marked_sites_.size() : 0, 0.0);
    Recorder ru{*this, out.u};
    Recorder rv{*this, out.v};
    ru.maybe_record(0, u, Bu);
    rv.maybe_record(0, v, Bu);
    for (std::size_t n = 0; n < steps_; ++n) {
        noise_.increments(replica, n, refinement_, dB);
        step_into(stencil_, u, scratch, dB, n);
        step_into(v_stencil, v, scratch, dB, n);
        for (std::size_t i = 0; i < Bu.size(); ++i) {
            Bu[i] += dB[marked_sites_[i]];
        }
        double worst = 0.0;
        std::size_t bad = 0;
        for (std::size_t s = 0; s < u.size(); ++s) {
            const double gap = v[s] - u[s];
            if (gap > 0.0) {
                worst = std::max(worst, gap);
                ++bad;
            }
        }
        out.max_violation.push_back(worst);
        out.violating_fraction.push_back(static_cast<double>(bad) / static_cast<double>(u.size()));
        ru.maybe_record(n + 1, u, Bu);
        rv.maybe_record(n + 1, v, Bu);
    }
    return out;
}

Trajectory simulate(const Box& box, const WalkKernel& kernel, const Nonlinearity& sigma,
                    const SolverConfig& config, const InitialProfile& u0, const NoisePlan& noise,
                    std::uint32_t replica)
{
    return Simulator(box, kernel, sigma, config, u0, noise).run(replica);
}

CoupledTrajectory coupled_simulate(const Box& box, const WalkKernel& kernel,
                                   const Nonlinearity& sigma, const SolverConfig& config,
                                   const InitialProfile& u0, const InitialProfile& v0,
                                   const NoisePlan& noise, std::uint32_t replica)
{
    return Simulator(box, kernel, sigma, config, u0, noise).run_coupled(replica, v0);
}

} // namespace she
