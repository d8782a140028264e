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

#include "she/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace she {

Boundary parse_boundary(const std::string& name)
{
    if (name == "periodic") {
        return Boundary::periodic;
    }
    if (name == "frozen") {
        return Boundary::frozen;
    }
    throw std::invalid_argument("unknown boundary policy '" + name + "'");
}

std::string to_string(Boundary b)
{
    return b == Boundary::periodic ? "periodic" : "frozen";
}

Box::Box(std::vector<int> extents, Boundary boundary)
    : extents_(std::move(extents)), boundary_(boundary), sites_(1)
{
    if (extents_.empty()) {
        throw std::invalid_argument("Box: dimension must be positive");
    }
    for (int e : extents_) {
        if (e < 1) {
            throw std::invalid_argument("Box: extents must be positive");
        }
        lo_.push_back(-(e / 2));
        sites_ *= static_cast<std::size_t>(e);
    }
}

LatticePoint Box::point(std::size_t site) const
{
    LatticePoint x(extents_.size());
    for (std::size_t a = extents_.size(); a-- > 0;) {
        const auto e = static_cast<std::size_t>(extents_[a]);
        x[a] = lo_[a] + static_cast<int>(site % e);
        site /= e;
    }
    return x;
}

bool Box::contains(std::span<const int> x) const noexcept
{
    for (std::size_t a = 0; a < extents_.size(); ++a) {
        if (x[a] < lo_[a] || x[a] >= lo_[a] + extents_[a]) {
            return false;
        }
    }
    return true;
}

std::size_t Box::index(std::span<const int> x) const
{
    if (x.size() != extents_.size()) {
        throw std::invalid_argument("Box::index: wrong dimension");
    }
    std::size_t idx = 0;
    for (std::size_t a = 0; a < extents_.size(); ++a) {
        int rel = x[a] - lo_[a];
        if (rel < 0 || rel >= extents_[a]) {
            if (boundary_ == Boundary::frozen) {
                return sites_;
            }
            rel = ((rel % extents_[a]) + extents_[a]) % extents_[a];
        }
        idx = idx * static_cast<std::size_t>(extents_[a]) + static_cast<std::size_t>(rel);
    }
    return idx;
}

double Box::wrap_safe_horizon(const JumpDistribution& jumps) const noexcept
{
    const int e = *std::min_element(extents_.begin(), extents_.end());
    const double r = static_cast<double>(e) / (2.0 * std::max(1, jumps.max_norm()));
    return r * r;
}

InitialProfile InitialProfile::delta(LatticePoint at, double mass)
{
    return table({{std::move(at), mass}});
}

InitialProfile InitialProfile::constant(double c)
{
    InitialProfile p;
    p.kind_ = Kind::constant;
    p.c_ = c;
    return p;
}

InitialProfile InitialProfile::table(std::vector<std::pair<LatticePoint, double>> entries)
{
    std::map<LatticePoint, double> merged;
    for (auto& [x, v] : entries) {
        merged[x] += v;
    }
    InitialProfile p;
    p.kind_ = Kind::table;
    for (auto& [x, v] : merged) {
        p.entries_.emplace_back(x, v);
    }
    return p;
}

double InitialProfile::operator()(std::span<const int> x) const
{
    if (kind_ == Kind::constant) {
        return c_;
    }
    for (const auto& [p, v] : entries_) {
        if (std::equal(p.begin(), p.end(), x.begin(), x.end())) {
            return v;
        }
    }
    return 0.0;
}

bool InitialProfile::nonnegative() const noexcept
{
    if (kind_ == Kind::constant) {
        return c_ >= 0.0;
    }
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.second >= 0.0; });
}

double InitialProfile::l1_norm() const
{
    if (kind_ == Kind::constant) {
        return c_ == 0.0 ? 0.0 : INFINITY;
    }
    double s = 0.0;
    for (const auto& e : entries_) {
        s += std::abs(e.second);
    }
    return s;
}

std::vector<double> InitialProfile::on_box(const Box& box) const
{
    std::vector<double> u(box.sites(), kind_ == Kind::constant ? c_ : 0.0);
    if (kind_ == Kind::table) {
        for (const auto& [x, v] : entries_) {
            if (static_cast<int>(x.size()) != box.dim()) {
                throw std::invalid_argument("initial profile point has wrong dimension");
            }
            if (box.boundary() == Boundary::periodic || box.contains(x)) {
                u[box.index(x)] += v;
            }
        }
    }
    return u;
}

Stencil::Stencil(const Box& box, const JumpDistribution& jumps, const InitialProfile& exterior)
    : sites_(box.sites())
{
    if (jumps.dim() != box.dim()) {
        throw std::invalid_argument("Stencil: kernel and box dimensions differ");
    }
    if (box.boundary() == Boundary::periodic) {
        for (int e : box.extents()) {
            if (e < 3 * jumps.max_norm()) {
                throw std::invalid_argument(
                    "Stencil: periodic extents must be at least 3 * max jump norm");
            }
        }
    }
    for (const auto& j : jumps.jumps()) {
        const bool zero = std::all_of(j.vec.begin(), j.vec.end(), [](int c) { return c == 0; });
        if (zero) {
            has_zero_jump_ = true;
            zero_mass_ = j.mass;
            continue;
        }
        masses_.push_back(j.mass);
        for (std::size_t s = 0; s < sites_; ++s) {
            LatticePoint y = box.point(s);
            for (std::size_t a = 0; a < y.size(); ++a) {
                y[a] += j.vec[a];
            }
            const std::size_t idx = box.index(y);
            nbr_.push_back(idx);
            exterior_.push_back(idx < sites_ ? 0.0 : exterior(y));
        }
    }
}

void Stencil::apply(std::span<const double> f, std::span<double> out) const noexcept
{
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < masses_.size(); ++k) {
        const double m = masses_[k];
        for (std::size_t s = 0; s < sites_; ++s) {
            out[s] += m * (neighbour(k, s, f) - f[s]);
        }
    }
}

void Stencil::drift_step(std::span<const double> f, double dt, std::span<double> out) const noexcept
{
    const double self = 1.0 - dt * (1.0 - zero_mass_);
    for (std::size_t s = 0; s < sites_; ++s) {
        out[s] = self * f[s];
    }
    for (std::size_t k = 0; k < masses_.size(); ++k) {
        const double w = dt * masses_[k];
        for (std::size_t s = 0; s < sites_; ++s) {
            out[s] += w * neighbour(k, s, f);
        }
    }
}

} // namespace she
