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

#include <stdexcept>
#include <string>

namespace she {

/// Raised when an iterative or quadrature routine cannot meet its tolerance.
/// `achieved` carries the last error estimate (or contraction factor).
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved)
    {
    }

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SingularIntegrand : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace she
