// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <numbers>
#include <vector>

#include "beamdelay/errors.hpp"

namespace beamdelay {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

inline GaussLegendreRule compute_gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre_with_derivative(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre_with_derivative(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

}  // namespace detail

/// Cached n-point rule; safe to call concurrently.
inline const GaussLegendreRule& gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: node count must be >= 1");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const GaussLegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<const GaussLegendreRule>(detail::compute_gauss_legendre(n));
    return *slot;
}

/// integral_a^b f(x) dx with an n-point Gauss-Legendre rule.
template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

/// Maps the rule onto [a, b]; returns (node, weight) pairs.
inline std::vector<std::pair<double, double>> mapped_rule(double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    std::vector<std::pair<double, double>> out;
    out.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        out.emplace_back(mid + half * rule.nodes[i], half * rule.weights[i]);
    return out;
}

}  // namespace beamdelay
