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

#include <functional>
#include <string>
#include <vector>

namespace she {

/// The noise coefficient sigma with its declared constants
/// Lip = sup |sigma(a) - sigma(b)| / |a - b| and ell = inf |sigma(z) / z|.
class Nonlinearity {
public:
    enum class Kind { linear, custom };

    /// Parabolic Anderson model: sigma(u) = q u, Lip = ell = |q|.
    static Nonlinearity linear(double q);

    /// Black-box sigma; Lip and ell are declared, then spot-checked.
    static Nonlinearity custom(std::string name, std::function<double(double)> sigma, double lip,
                               double ell);

    /// Named families used by run manifests:
    ///   saturating: q u / (1 + |u|)      Lip = |q|, ell = 0
    ///   sine:       q sin(u)             Lip = |q|, ell = 0
    ///   tanh:       q tanh(u)            Lip = |q|, ell = 0
    static Nonlinearity named(const std::string& form, double q, double lip, double ell);

    Kind kind() const noexcept { return kind_; }
    bool is_linear() const noexcept { return kind_ == Kind::linear; }
    double q() const noexcept { return q_; }
    double lip() const noexcept { return lip_; }
    double ell() const noexcept { return ell_; }
    const std::string& name() const noexcept { return name_; }
    bool is_zero() const noexcept { return zero_; }

    double operator()(double u) const { return kind_ == Kind::linear ? q_ * u : fn_(u); }

    /// Violations of sigma(0) = 0 and of the sampled slope / lower bounds on
    /// [-10, 10]; empty when the declared constants are consistent.
    std::vector<std::string> check() const;

private:
    Kind kind_ = Kind::linear;
    std::string name_;
    std::function<double(double)> fn_;
    double q_ = 0.0;
    double lip_ = 0.0;
    double ell_ = 0.0;
    bool zero_ = false;
};

} // namespace she
