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

#include "she/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "she/parallel.hpp"

namespace she {

unsigned default_threads() noexcept
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

double pairwise_sum(std::span<const double> v) noexcept
{
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

MeanSe mean_se(std::span<const double> v)
{
    MeanSe r;
    r.n = v.size();
    if (v.empty()) {
        return r;
    }
    r.mean = pairwise_sum(v) / static_cast<double>(v.size());
    if (v.size() < 2) {
        return r;
    }
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        dev[i] = (v[i] - r.mean) * (v[i] - r.mean);
    }
    const double var = pairwise_sum(dev) / static_cast<double>(v.size() - 1);
    r.se = std::sqrt(var / static_cast<double>(v.size()));
    return r;
}

double jackknife_se(std::span<const double> v,
                    const std::function<double(std::span<const double>)>& stat)
{
    const std::size_t n = v.size();
    if (n < 2) {
        return 0.0;
    }
    std::vector<double> loo(n);
    std::vector<double> buf(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(i), buf.begin());
        std::copy(v.begin() + static_cast<std::ptrdiff_t>(i) + 1, v.end(),
                  buf.begin() + static_cast<std::ptrdiff_t>(i));
        loo[i] = stat(buf);
    }
    const double m = pairwise_sum(loo) / static_cast<double>(n);
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) {
        dev[i] = (loo[i] - m) * (loo[i] - m);
    }
    return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * pairwise_sum(dev));
}

double normal_cdf(double x) noexcept
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    if (samples.empty()) {
        throw std::invalid_argument("ks_statistic: no samples");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical_5pct(std::size_t n) noexcept
{
    return 1.36 / std::sqrt(static_cast<double>(n));
}

double pearson_correlation(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("pearson_correlation: need two equal samples of size >= 2");
    }
    const double mx = pairwise_sum(x) / static_cast<double>(x.size());
    const double my = pairwise_sum(y) / static_cast<double>(y.size());
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least_squares: need at least two points");
    }
    const double n = static_cast<double>(x.size());
    const double mx = pairwise_sum(x) / n;
    const double my = pairwise_sum(y) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("least_squares: abscissae are all equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

double quantile(std::vector<double> v, double p)
{
    if (v.empty()) {
        throw std::invalid_argument("quantile: empty sample");
    }
    std::sort(v.begin(), v.end());
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v)
{
    return quantile(std::move(v), 0.5);
}

} // namespace she
