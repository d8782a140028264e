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

#include "she/walk_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "she/errors.hpp"

namespace she {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Row-reduces the support vectors over the integers; returns (rank, index of
// the generated sublattice when full rank, else 0).
std::pair<int, std::int64_t> lattice_span(int dim, const std::vector<Jump>& jumps)
{
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& j : jumps) {
        rows.emplace_back(j.vec.begin(), j.vec.end());
    }
    int rank = 0;
    std::int64_t index = 1;
    std::size_t top = 0;
    for (int col = 0; col < dim && top < rows.size(); ++col) {
        // Euclid down the column until at most one nonzero remains below `top`.
        while (true) {
            std::size_t pivot = rows.size();
            for (std::size_t r = top; r < rows.size(); ++r) {
                if (rows[r][col] != 0 &&
                    (pivot == rows.size() || std::abs(rows[r][col]) < std::abs(rows[pivot][col]))) {
                    pivot = r;
                }
            }
            if (pivot == rows.size()) {
                break;
            }
            std::swap(rows[top], rows[pivot]);
            bool reduced = false;
            for (std::size_t r = top + 1; r < rows.size(); ++r) {
                if (rows[r][col] == 0) {
                    continue;
                }
                const std::int64_t f = rows[r][col] / rows[top][col];
                for (int c = 0; c < dim; ++c) {
                    rows[r][c] -= f * rows[top][c];
                }
                reduced = reduced || rows[r][col] != 0;
            }
            if (!reduced) {
                index *= std::abs(rows[top][col]);
                ++rank;
                ++top;
                break;
            }
        }
    }
    return {rank, rank == dim ? index : 0};
}

std::vector<std::pair<double, double>> gauss_legendre(int n)
{
    std::vector<std::pair<double, double>> rule(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return rule;
}

bool next_multi_index(std::vector<int>& idx, int base)
{
    for (std::size_t i = idx.size(); i-- > 0;) {
        if (++idx[i] < base) {
            return true;
        }
        idx[i] = 0;
    }
    return false;
}

struct Cell {
    std::vector<double> corner;
    double width;
    int level;
};

std::vector<Cell> nested_cells(int dim, const FourierGrid::Spec& spec)
{
    std::vector<Cell> cells;
    const double w0 = kTwoPi / spec.panels;
    const int mid = spec.panels / 2;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    do {
        const bool central = std::all_of(idx.begin(), idx.end(),
                                         [&](int i) { return i == mid - 1 || i == mid; });
        if (central) {
            continue;
        }
        Cell c{std::vector<double>(static_cast<std::size_t>(dim)), w0, -1};
        for (int a = 0; a < dim; ++a) {
            c.corner[static_cast<std::size_t>(a)] = -std::numbers::pi + idx[static_cast<std::size_t>(a)] * w0;
        }
        cells.push_back(std::move(c));
    } while (next_multi_index(idx, spec.panels));

    double half = w0;
    for (int level = 0; level < spec.levels; ++level, half *= 0.5) {
        const double width = 0.5 * half;
        std::fill(idx.begin(), idx.end(), 0);
        do {
            const bool inner = std::all_of(idx.begin(), idx.end(), [](int i) { return i == 1 || i == 2; });
            if (inner) {
                continue;
            }
            Cell c{std::vector<double>(static_cast<std::size_t>(dim)), width, level};
            for (int a = 0; a < dim; ++a) {
                c.corner[static_cast<std::size_t>(a)] = -half + idx[static_cast<std::size_t>(a)] * width;
            }
            cells.push_back(std::move(c));
        } while (next_multi_index(idx, 4));
    }
    std::fill(idx.begin(), idx.end(), 0);
    do {
        Cell c{std::vector<double>(static_cast<std::size_t>(dim)), half, spec.levels};
        for (int a = 0; a < dim; ++a) {
            c.corner[static_cast<std::size_t>(a)] = -half + idx[static_cast<std::size_t>(a)] * half;
        }
        cells.push_back(std::move(c));
    } while (next_multi_index(idx, 2));
    return cells;
}

int default_order(int dim) { return dim <= 3 ? 8 : 4; }
int base_panels(int dim) { return dim == 1 ? 16 : (dim <= 3 ? 8 : 4); }
constexpr std::size_t kNodeBudget = 3'000'000;

std::size_t estimated_nodes(int dim, const FourierGrid::Spec& s)
{
    const double per = std::pow(static_cast<double>(s.order), dim);
    const double cells = std::pow(static_cast<double>(s.panels), dim) +
                         s.levels * (std::pow(4.0, dim) - std::pow(2.0, dim)) + std::pow(2.0, dim);
    return static_cast<std::size_t>(per * cells);
}

int levels_for_scale(double scale, int panels)
{
    const double a0 = kTwoPi / panels;
    const double want = 0.25 * scale;
    if (want >= a0) {
        return 2;
    }
    return std::clamp(static_cast<int>(std::ceil(std::log2(a0 / want))), 2, 40);
}

// Integrates on successively refined grids until two agree within tol.
// `make_value` maps a grid to the estimate.
template <class F>
std::pair<FourierGrid, QuadratureValue> converge(const JumpDistribution& jumps, int levels,
                                                 double tol, F&& make_value, const char* what)
{
    const int dim = jumps.dim();
    FourierGrid::Spec spec{base_panels(dim), levels, default_order(dim)};
    FourierGrid coarse(jumps, spec);
    double prev = make_value(coarse);
    double err = std::numeric_limits<double>::infinity();
    while (true) {
        FourierGrid::Spec finer{spec.panels * 2, spec.levels + 1, spec.order};
        if (estimated_nodes(dim, finer) > kNodeBudget) {
            throw NumericFailure(std::string(what) + ": quadrature did not reach tolerance "
                                     "within the node budget (achieved " + std::to_string(err) + ")",
                                 err);
        }
        FourierGrid fine(jumps, finer);
        const double value = make_value(fine);
        err = std::abs(value - prev);
        if (err <= tol) {
            return {std::move(fine), QuadratureValue{value, err}};
        }
        prev = value;
        spec = finer;
    }
}

} // namespace

JumpDistribution::JumpDistribution(int dim, std::vector<Jump> jumps)
    : dim_(dim), jumps_(std::move(jumps))
{
    if (dim < 1) {
        throw std::invalid_argument("JumpDistribution: dim must be positive");
    }
    if (jumps_.empty()) {
        throw std::invalid_argument("JumpDistribution: empty support");
    }
    double total = 0.0;
    std::set<LatticePoint> seen;
    for (const auto& j : jumps_) {
        if (static_cast<int>(j.vec.size()) != dim) {
            throw std::invalid_argument("JumpDistribution: jump vector has wrong dimension");
        }
        if (!(j.mass > 0.0 && j.mass <= 1.0)) {
            throw std::invalid_argument("JumpDistribution: masses must lie in (0, 1]");
        }
        if (!seen.insert(j.vec).second) {
            throw std::invalid_argument("JumpDistribution: duplicate support vector");
        }
        total += j.mass;
        for (int c : j.vec) {
            max_norm_ = std::max(max_norm_, std::abs(c));
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("JumpDistribution: masses sum to " + std::to_string(total));
    }
    const auto [rank, index] = lattice_span(dim, jumps_);
    rank_ = rank;
    generates_ = rank == dim && index == 1;
}

JumpDistribution JumpDistribution::simple(int dim)
{
    std::vector<Jump> jumps;
    for (int a = 0; a < dim; ++a) {
        for (int sign : {1, -1}) {
            LatticePoint v(static_cast<std::size_t>(dim), 0);
            v[static_cast<std::size_t>(a)] = sign;
            jumps.push_back({v, 1.0 / (2.0 * dim)});
        }
    }
    return JumpDistribution(dim, std::move(jumps));
}

double JumpDistribution::second_moment() const noexcept
{
    double m = 0.0;
    for (const auto& j : jumps_) {
        double n2 = 0.0;
        for (int c : j.vec) {
            n2 += static_cast<double>(c) * c;
        }
        m += j.mass * n2;
    }
    return m;
}

WalkKernel::WalkKernel(JumpDistribution j, double r, bool transient)
    : jumps(std::move(j)), rate(r), transient_asserted(transient)
{
    if (!(rate > 0.0)) {
        throw std::invalid_argument("WalkKernel: rate must be positive");
    }
}

bool WalkKernel::symmetrized_transient() const noexcept
{
    return transient_asserted || (dim() >= 3 && jumps.rank() == dim());
}

std::complex<double> char_function(const WalkKernel& kernel, std::span<const double> xi)
{
    if (static_cast<int>(xi.size()) != kernel.dim()) {
        throw std::invalid_argument("char_function: xi has wrong dimension");
    }
    std::complex<double> sum{0.0, 0.0};
    for (const auto& j : kernel.jumps.jumps()) {
        double dot = 0.0;
        for (std::size_t a = 0; a < xi.size(); ++a) {
            dot += xi[a] * j.vec[a];
        }
        sum += j.mass * std::complex<double>(std::cos(dot), std::sin(dot));
    }
    return sum;
}

double symbol(const JumpDistribution& jumps, std::span<const double> xi) noexcept
{
    double s = 0.0;
    for (const auto& j : jumps.jumps()) {
        double dot = 0.0;
        for (std::size_t a = 0; a < xi.size(); ++a) {
            dot += xi[a] * j.vec[a];
        }
        const double h = std::sin(0.5 * dot);
        s += j.mass * 2.0 * h * h;
    }
    return s;
}

PoissonCut poisson_truncation(double mu, double tol)
{
    if (mu < 0.0 || !std::isfinite(mu)) {
        throw std::invalid_argument("poisson_truncation: mean must be finite and nonnegative");
    }
    if (mu == 0.0) {
        return {0, 0.0};
    }
    // Terms e^{-mu} mu^n / n! in log space, far enough that the remainder
    // beyond the last term is negligible against tol.
    std::vector<double> w;
    for (std::size_t n = 0;; ++n) {
        const double lw = -mu + n * std::log(mu) - std::lgamma(static_cast<double>(n) + 1.0);
        w.push_back(std::exp(lw));
        if (static_cast<double>(n) > 2.0 * mu + 10.0 && w.back() < tol * 1e-6) {
            break;
        }
    }
    double tail = 0.0;
    std::size_t cut = w.size() - 1;
    for (std::size_t n = w.size() - 1; n-- > 0;) {
        const double next_tail = tail + w[n + 1];
        if (next_tail >= tol) {
            break;
        }
        tail = next_tail;
        cut = n;
    }
    // Geometric bound on the terms past the computed range.
    const double ratio = mu / static_cast<double>(w.size());
    tail += w.back() * ratio / (1.0 - ratio);
    return {cut, tail};
}

double TransitionTable::at(std::span<const int> x) const noexcept
{
    std::size_t idx = 0;
    const auto s = static_cast<long>(side());
    for (std::size_t a = 0; a < x.size(); ++a) {
        if (std::abs(x[a]) > radius) {
            return 0.0;
        }
        idx = idx * static_cast<std::size_t>(s) + static_cast<std::size_t>(x[a] + radius);
    }
    return values[idx];
}

TransitionTable transition_table(const WalkKernel& kernel, double t, double tol)
{
    if (t < 0.0) {
        throw std::invalid_argument("transition_table: t must be nonnegative");
    }
    const int dim = kernel.dim();
    const PoissonCut cut = poisson_truncation(kernel.rate * t, tol);
    TransitionTable table;
    table.dim = dim;
    table.t = t;
    table.series_terms = cut.terms;
    table.truncation_bound = cut.tail;
    table.radius = static_cast<int>(cut.terms) * kernel.jumps.max_norm();
    const std::size_t side = table.side();
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
        total *= side;
    }
    std::vector<long> offsets;
    for (const auto& j : kernel.jumps.jumps()) {
        long off = 0;
        for (int a = 0; a < dim; ++a) {
            off = off * static_cast<long>(side) + j.vec[static_cast<std::size_t>(a)];
        }
        offsets.push_back(off);
    }
    std::vector<double> dist(total, 0.0);
    std::vector<double> next(total, 0.0);
    std::size_t origin = 0;
    for (int a = 0; a < dim; ++a) {
        origin = origin * side + static_cast<std::size_t>(table.radius);
    }
    dist[origin] = 1.0;
    table.values.assign(total, 0.0);
    const double mu = kernel.rate * t;
    for (std::size_t n = 0; n <= cut.terms; ++n) {
        const double w = std::exp(-mu + n * std::log(mu > 0 ? mu : 1.0) -
                                  std::lgamma(static_cast<double>(n) + 1.0));
        const double weight = mu > 0 ? w : (n == 0 ? 1.0 : 0.0);
        for (std::size_t i = 0; i < total; ++i) {
            table.values[i] += weight * dist[i];
        }
        if (n == cut.terms) {
            break;
        }
        // Support of S_n lies within n * max_norm <= radius, so shifts stay inside.
        std::fill(next.begin(), next.end(), 0.0);
        const auto& jumps = kernel.jumps.jumps();
        for (std::size_t i = 0; i < total; ++i) {
            const double v = dist[i];
            if (v == 0.0) {
                continue;
            }
            for (std::size_t k = 0; k < jumps.size(); ++k) {
                next[static_cast<std::size_t>(static_cast<long>(i) + offsets[k])] += jumps[k].mass * v;
            }
        }
        dist.swap(next);
    }
    return table;
}

ProbabilityValue transition_prob(const WalkKernel& kernel, double t, std::span<const int> x,
                                 double tol)
{
    if (static_cast<int>(x.size()) != kernel.dim()) {
        throw std::invalid_argument("transition_prob: point has wrong dimension");
    }
    const TransitionTable table = transition_table(kernel, t, tol);
    return {table.at(x), table.truncation_bound};
}

FourierGrid::FourierGrid(const JumpDistribution& jumps, Spec spec, bool keep_nodes)
    : dim_(jumps.dim()), spec_(spec)
{
    if (spec.panels < 2 || spec.panels % 2 != 0 || spec.levels < 0 || spec.order < 1) {
        throw std::invalid_argument("FourierGrid: invalid spec");
    }
    const auto rule = gauss_legendre(spec.order);
    const auto cells = nested_cells(dim_, spec);
    const double norm = std::pow(kTwoPi, -dim_);
    std::vector<int> g(static_cast<std::size_t>(dim_), 0);
    std::vector<double> xi(static_cast<std::size_t>(dim_));
    for (const auto& cell : cells) {
        const double half = 0.5 * cell.width;
        std::fill(g.begin(), g.end(), 0);
        do {
            double w = norm;
            for (int a = 0; a < dim_; ++a) {
                const auto& [x, wx] = rule[static_cast<std::size_t>(g[static_cast<std::size_t>(a)])];
                xi[static_cast<std::size_t>(a)] = cell.corner[static_cast<std::size_t>(a)] + half * (x + 1.0);
                w *= wx * half;
            }
            weights_.push_back(w);
            symbols_.push_back(symbol(jumps, xi));
            level_.push_back(cell.level);
            if (keep_nodes) {
                nodes_.insert(nodes_.end(), xi.begin(), xi.end());
            }
        } while (next_multi_index(g, spec.order));
    }
}

QuadratureValue pbar(const WalkKernel& kernel, double tau, double tol)
{
    const double t[] = {tau};
    return pbar_curve(kernel, t, tol).front();
}

namespace {

// Shared driver for Pbar-type families; `node_weight` (may be empty) multiplies
// the integrand at each node.
std::vector<QuadratureValue> heat_family(
    const WalkKernel& kernel, std::span<const double> taus,
    const std::vector<std::pair<LatticePoint, double>>* profile, double tol)
{
    if (taus.empty()) {
        return {};
    }
    double tau_max = 0.0;
    for (double tau : taus) {
        if (tau < 0.0) {
            throw std::invalid_argument("pbar: tau must be nonnegative");
        }
        tau_max = std::max(tau_max, tau);
    }
    const auto& jumps = kernel.jumps;
    const int dim = jumps.dim();
    if (profile) {
        for (const auto& [x, v] : *profile) {
            if (static_cast<int>(x.size()) != dim) {
                throw std::invalid_argument("overlap_curve: profile point has wrong dimension");
            }
        }
    }
    const double scale = 1.0 / std::sqrt(1.0 + kernel.rate * tau_max * jumps.second_moment());
    const int levels = levels_for_scale(scale, base_panels(dim));
    auto family = [&](const FourierGrid::Spec& spec) {
        const FourierGrid grid(jumps, spec, profile != nullptr);
        std::vector<double> spectral;
        if (profile) {
            // |sum_y u0(y) e^{i xi.y}|^2 at every node.
            spectral.resize(grid.size());
            const auto nodes = grid.nodes();
            for (std::size_t i = 0; i < grid.size(); ++i) {
                double re = 0.0;
                double im = 0.0;
                for (const auto& [x, v] : *profile) {
                    double dot = 0.0;
                    for (int a = 0; a < dim; ++a) {
                        dot += nodes[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] *
                               x[static_cast<std::size_t>(a)];
                    }
                    re += v * std::cos(dot);
                    im += v * std::sin(dot);
                }
                spectral[i] = re * re + im * im;
            }
        }
        std::vector<double> vals;
        const auto w = grid.weights();
        const auto s = grid.symbols();
        // Dividing by the computed mass of the weights makes tau = 0 exact.
        double mass = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            mass += w[i];
        }
        for (double tau : taus) {
            const double c = 2.0 * kernel.rate * tau;
            double acc = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                acc += w[i] * std::exp(-c * s[i]) * (profile ? spectral[i] : 1.0);
            }
            vals.push_back(acc / mass);
        }
        return vals;
    };
    FourierGrid::Spec spec{base_panels(dim), levels, default_order(dim)};
    auto coarse_vals = family(spec);
    double err = std::numeric_limits<double>::infinity();
    while (true) {
        FourierGrid::Spec finer{spec.panels * 2, spec.levels + 1, spec.order};
        if (estimated_nodes(dim, finer) > kNodeBudget) {
            throw NumericFailure("pbar: quadrature did not reach tolerance (achieved " +
                                     std::to_string(err) + ")",
                                 err);
        }
        const auto fine_vals = family(finer);
        err = 0.0;
        for (std::size_t i = 0; i < fine_vals.size(); ++i) {
            err = std::max(err, std::abs(fine_vals[i] - coarse_vals[i]));
        }
        if (err <= tol) {
            std::vector<QuadratureValue> out;
            for (std::size_t i = 0; i < fine_vals.size(); ++i) {
                out.push_back({fine_vals[i], std::abs(fine_vals[i] - coarse_vals[i])});
            }
            return out;
        }
        coarse_vals = fine_vals;
        spec = finer;
    }
}

} // namespace

std::vector<QuadratureValue> pbar_curve(const WalkKernel& kernel, std::span<const double> taus,
                                        double tol)
{
    return heat_family(kernel, taus, nullptr, tol);
}

std::vector<QuadratureValue> overlap_curve(
    const WalkKernel& kernel, std::span<const double> taus,
    const std::vector<std::pair<LatticePoint, double>>& profile, double tol)
{
    return heat_family(kernel, taus, &profile, tol);
}

double pbar_lattice_sum(const WalkKernel& kernel, double tau, double tol)
{
    const TransitionTable table = transition_table(kernel, tau, tol);
    double sum = 0.0;
    for (double v : table.values) {
        sum += v * v;
    }
    return sum;
}

double upsilon_on_grid(const FourierGrid& grid, double beta)
{
    // Upsilon uses the rate-1 normalization: 1 / (beta + 2 (1 - Re phi)).
    return grid.integrate([beta](double s) { return 1.0 / (beta + 2.0 * s); }, beta == 0.0);
}

namespace {

double upsilon_tolerance(double beta, double tol)
{
    // The origin singularity at beta = 0 caps the attainable agreement.
    return beta == 0.0 ? std::max(tol, 1e-6) : tol;
}

int upsilon_levels(const JumpDistribution& jumps, double beta)
{
    if (beta == 0.0) {
        return 12;
    }
    return levels_for_scale(std::sqrt(beta / std::max(jumps.second_moment(), 1e-300)),
                            base_panels(jumps.dim()));
}

void check_beta0(const WalkKernel& kernel)
{
    if (!kernel.jumps.generates_lattice()) {
        throw NumericFailure(
            "upsilon(0): jump support does not generate the lattice; the symbol vanishes "
            "away from the origin",
            std::numeric_limits<double>::infinity());
    }
}

} // namespace

FourierGrid upsilon_grid(const WalkKernel& kernel, double beta_min, double tol)
{
    if (beta_min < 0.0) {
        throw std::invalid_argument("upsilon: beta must be nonnegative");
    }
    if (beta_min == 0.0) {
        check_beta0(kernel);
    }
    auto value = [&](const FourierGrid& g) { return upsilon_on_grid(g, beta_min); };
    return converge(kernel.jumps, upsilon_levels(kernel.jumps, beta_min),
                    upsilon_tolerance(beta_min, tol), value, "upsilon")
        .first;
}

QuadratureValue upsilon(const WalkKernel& kernel, double beta, double tol)
{
    const double b[] = {beta};
    return upsilon_curve(kernel, b, tol).front();
}

std::vector<QuadratureValue> upsilon_curve(const WalkKernel& kernel, std::span<const double> betas,
                                           double tol)
{
    std::vector<QuadratureValue> out(betas.size());
    if (betas.empty()) {
        return out;
    }
    double beta_min = std::numeric_limits<double>::infinity();
    for (double b : betas) {
        if (b < 0.0) {
            throw std::invalid_argument("upsilon: beta must be nonnegative");
        }
        if (b == 0.0 && !kernel.symmetrized_transient()) {
            continue;
        }
        beta_min = std::min(beta_min, b);
    }
    if (std::isinf(beta_min)) {
        for (auto& v : out) {
            v = {std::numeric_limits<double>::infinity(), 0.0};
        }
        return out;
    }
    if (beta_min == 0.0) {
        check_beta0(kernel);
    }
    const double eff_tol = upsilon_tolerance(beta_min, tol);
    auto value = [&](const FourierGrid& g) { return upsilon_on_grid(g, beta_min); };
    auto [grid, head] = converge(kernel.jumps, upsilon_levels(kernel.jumps, beta_min), eff_tol,
                                 value, "upsilon");
    // The coarser partner grid gives per-member error estimates.
    const FourierGrid::Spec cs{grid.spec().panels / 2, grid.spec().levels - 1, grid.spec().order};
    const FourierGrid coarse(kernel.jumps, cs);
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double b = betas[i];
        if (b == 0.0 && !kernel.symmetrized_transient()) {
            out[i] = {std::numeric_limits<double>::infinity(), 0.0};
            continue;
        }
        const double v = upsilon_on_grid(grid, b);
        out[i] = {v, std::abs(v - upsilon_on_grid(coarse, b))};
    }
    (void)head;
    return out;
}

WalkPath sample_walk_path(const WalkKernel& kernel, double horizon, StreamRng& rng)
{
    if (horizon < 0.0) {
        throw std::invalid_argument("sample_walk_path: horizon must be nonnegative");
    }
    const int dim = kernel.dim();
    WalkPath path;
    path.dim = dim;
    path.horizon = horizon;
    path.coords.assign(static_cast<std::size_t>(dim), 0);
    const auto& jumps = kernel.jumps.jumps();
    double t = rng.exponential(kernel.rate);
    while (t <= horizon) {
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t k = 0;
        for (; k + 1 < jumps.size(); ++k) {
            acc += jumps[k].mass;
            if (u < acc) {
                break;
            }
        }
        const std::size_t prev = path.coords.size() - static_cast<std::size_t>(dim);
        for (int a = 0; a < dim; ++a) {
            path.coords.push_back(path.coords[prev + static_cast<std::size_t>(a)] +
                                  jumps[k].vec[static_cast<std::size_t>(a)]);
        }
        path.jump_times.push_back(t);
        t += rng.exponential(kernel.rate);
    }
    return path;
}

double overlap_time(const WalkPath& a, const WalkPath& b)
{
    // Merge the two jump sequences; between consecutive event times both
    // paths are constant.
    const double horizon = std::min(a.horizon, b.horizon);
    std::size_t ia = 0;
    std::size_t ib = 0;
    double t = 0.0;
    double total = 0.0;
    while (t < horizon) {
        const double na = ia < a.jump_times.size() ? a.jump_times[ia] : horizon;
        const double nb = ib < b.jump_times.size() ? b.jump_times[ib] : horizon;
        const double next = std::min({na, nb, horizon});
        const auto sa = a.state(ia);
        const auto sb = b.state(ib);
        if (std::equal(sa.begin(), sa.end(), sb.begin())) {
            total += next - t;
        }
        t = next;
        if (na <= t && ia < a.jump_times.size()) {
            ++ia;
        }
        if (nb <= t && ib < b.jump_times.size()) {
            ++ib;
        }
        if (next >= horizon) {
            break;
        }
    }
    return total;
}

} // namespace she
