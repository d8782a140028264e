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

#include "she/nonlinearity.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "she/random.hpp"

namespace she {

Nonlinearity Nonlinearity::linear(double q)
{
    Nonlinearity n;
    n.kind_ = Kind::linear;
    n.name_ = "linear";
    n.q_ = q;
    n.lip_ = std::abs(q);
    n.ell_ = std::abs(q);
    n.zero_ = q == 0.0;
    return n;
}

Nonlinearity Nonlinearity::custom(std::string name, std::function<double(double)> sigma,
                                  double lip, double ell)
{
    if (!(lip >= 0.0) || !(ell >= 0.0) || ell > lip) {
        throw std::invalid_argument("Nonlinearity: require 0 <= ell <= lip");
    }
    Nonlinearity n;
    n.kind_ = Kind::custom;
    n.name_ = std::move(name);
    n.fn_ = std::move(sigma);
    n.lip_ = lip;
    n.ell_ = ell;
    n.zero_ = lip == 0.0;
    return n;
}

Nonlinearity Nonlinearity::named(const std::string& form, double q, double lip, double ell)
{
    std::function<double(double)> f;
    if (form == "saturating") {
        f = [q](double u) { return q * u / (1.0 + std::abs(u)); };
    } else if (form == "sine") {
        f = [q](double u) { return q * std::sin(u); };
    } else if (form == "tanh") {
        f = [q](double u) { return q * std::tanh(u); };
    } else {
        throw std::invalid_argument("unknown sigma form '" + form + "'");
    }
    Nonlinearity n = custom(form, std::move(f), lip, ell);
    n.q_ = q;
    return n;
}

std::vector<std::string> Nonlinearity::check() const
{
    std::vector<std::string> problems;
    if ((*this)(0.0) != 0.0) {
        problems.emplace_back("sigma(0) != 0");
    }
    StreamRng rng(0x5eed, StreamTag::misc, 0x51);
    for (int i = 0; i < 2000; ++i) {
        const double a = -10.0 + 20.0 * rng.uniform();
        const double b = -10.0 + 20.0 * rng.uniform();
        if (a != b && std::abs((*this)(a) - (*this)(b)) > lip_ * std::abs(a - b) + 1e-12) {
            std::ostringstream os;
            os << "slope exceeds declared lip between " << a << " and " << b;
            problems.push_back(os.str());
            break;
        }
        if (std::abs((*this)(a)) < ell_ * std::abs(a) - 1e-12) {
            std::ostringstream os;
            os << "|sigma(z)| < ell |z| at z = " << a;
            problems.push_back(os.str());
            break;
        }
    }
    return problems;
}

} // namespace she
