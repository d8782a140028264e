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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace she {

/// Recursive pairwise summation; the result depends only on the order of
/// the input.
double pairwise_sum(std::span<const double> v) noexcept;

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

/// Sample mean with standard error sd / sqrt(n).
MeanSe mean_se(std::span<const double> v);

/// Delete-one jackknife standard error of a statistic.
double jackknife_se(std::span<const double> v,
                    const std::function<double(std::span<const double>)>& stat);

double normal_cdf(double x) noexcept;

/// Two-sided one-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic 5% critical value 1.36 / sqrt(n).
double ks_critical_5pct(std::size_t n) noexcept;

double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

/// Ordinary least squares y = intercept + slope * x (needs >= 2 distinct x).
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

double quantile(std::vector<double> v, double p);
double median(std::vector<double> v);

} // namespace she
