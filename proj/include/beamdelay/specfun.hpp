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

// Scalar special functions and combinatorial kernels behind the closed-form
// outage expressions.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "beamdelay/errors.hpp"

namespace beamdelay {

/// Truncation control for Poisson-weighted series.
struct SeriesTolerance {
    double rel_tol = 1e-12;
    int max_terms = 10000;

    void validate() const {
        if (!(rel_tol > 0.0)) throw DomainError("SeriesTolerance: rel_tol must be > 0");
        if (max_terms < 1) throw DomainError("SeriesTolerance: max_terms must be >= 1");
    }
};

/// Zero-order Bessel function of the first kind.
inline double bessel_j0(double x) {
    if (!std::isfinite(x)) throw DomainError("bessel_j0: non-finite argument");
    return std::cyl_bessel_j(0.0, std::abs(x));
}

/// Regularized lower incomplete gamma for integer shape:
/// (1/(k-1)!) * integral_0^x t^(k-1) e^(-t) dt.
inline double regularized_lower_gamma(int k, double x) {
    if (k < 1) throw DomainError("regularized_lower_gamma: k must be >= 1");
    if (!(x >= 0.0)) throw DomainError("regularized_lower_gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(static_cast<double>(k), x);
}

/// Complement 1 - regularized_lower_gamma(k, x), accurate in the upper tail.
inline double regularized_upper_gamma(int k, double x) {
    if (k < 1) throw DomainError("regularized_upper_gamma: k must be >= 1");
    if (!(x >= 0.0)) throw DomainError("regularized_upper_gamma: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(static_cast<double>(k), x);
}

inline double factorial(int n) {
    if (n < 0) throw DomainError("factorial: negative argument");
    return std::tgamma(static_cast<double>(n) + 1.0);
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

/// Exact binomial coefficient; throws CapabilityError on 64-bit overflow.
inline std::uint64_t binomial_exact(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max())
            throw CapabilityError("binomial_exact: overflow");
    }
    return static_cast<std::uint64_t>(r);
}

/// Lazily extended table of Gamma_{d+k}(beta), k = 0, 1, ...
///
/// The noncentral series evaluates the same ladder for every noncentrality,
/// so quadrature callers build one per beta and share it across nodes.
class GammaLadder {
public:
    GammaLadder(int half_dof, double beta) : d_(half_dof), beta_(beta) {
        if (half_dof < 1) throw DomainError("GammaLadder: half_dof must be >= 1");
        if (!(beta >= 0.0)) throw DomainError("GammaLadder: beta must be >= 0");
    }

    int half_dof() const noexcept { return d_; }
    double beta() const noexcept { return beta_; }

    double operator()(std::size_t k) {
        while (values_.size() <= k) {
            const int n = d_ + static_cast<int>(values_.size());
            // Once a rung underflows every later one does too.
            if (!values_.empty() && values_.back() == 0.0) {
                values_.push_back(0.0);
            } else {
                values_.push_back(regularized_lower_gamma(n, beta_));
            }
        }
        return values_[k];
    }

private:
    int d_;
    double beta_;
    std::vector<double> values_;
};

/// CDF of the noncentral chi-square with 2d degrees of freedom and
/// noncentrality 2*delta, evaluated at 2*beta:
///   sum_k e^{-delta} delta^k / k! * Gamma_{d+k}(beta).
///
/// Stops once (remaining Poisson mass) * Gamma_{d+k+1}(beta), an upper bound
/// on the discarded tail, falls below rel_tol times the partial sum.
inline double noncentral_chi2_cdf(GammaLadder& ladder, double delta, const SeriesTolerance& tol = {}) {
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw DomainError("noncentral_chi2_cdf: delta must be finite and >= 0");
    const double beta = ladder.beta();
    if (beta == 0.0) return 0.0;
    if (delta == 0.0) return ladder(0);

    const double log_delta = std::log(delta);
    double sum = 0.0;
    double cum = 0.0;
    for (int k = 0; k < tol.max_terms; ++k) {
        const double w = std::exp(-delta + k * log_delta - std::lgamma(k + 1.0));
        cum += w;
        sum += w * ladder(static_cast<std::size_t>(k));
        const double remaining = std::max(0.0, 1.0 - cum);
        const double bound = remaining * ladder(static_cast<std::size_t>(k) + 1);
        if (bound <= tol.rel_tol * sum) return std::clamp(sum, 0.0, 1.0);
    }
    throw ConvergenceError("noncentral_chi2_cdf: max_terms reached (delta = " + std::to_string(delta) + ")",
                           sum);
}

inline double noncentral_chi2_cdf(int half_dof, double delta, double beta, const SeriesTolerance& tol = {}) {
    tol.validate();
    GammaLadder ladder(half_dof, beta);
    return noncentral_chi2_cdf(ladder, delta, tol);
}

/// Largest polynomial degree k*(n_r-1) supported by expansion_coeffs.
inline constexpr int kMaxExpansionDegree = 64;

/// Coefficients a_m of (sum_{l<n_r} x^l / l!)^k, m = 0 .. k*(n_r-1).
inline std::vector<double> expansion_coeffs(int n_r, int k) {
    if (n_r < 1) throw DomainError("expansion_coeffs: n_r must be >= 1");
    if (k < 0) throw DomainError("expansion_coeffs: k must be >= 0");
    if (static_cast<long long>(k) * (n_r - 1) > kMaxExpansionDegree)
        throw CapabilityError("expansion_coeffs: degree " + std::to_string(static_cast<long long>(k) * (n_r - 1)) +
                              " exceeds supported maximum " + std::to_string(kMaxExpansionDegree));

    std::vector<double> base(static_cast<std::size_t>(n_r));
    double f = 1.0;
    for (int l = 0; l < n_r; ++l) {
        if (l > 0) f *= l;
        base[static_cast<std::size_t>(l)] = 1.0 / f;
    }

    std::vector<double> out{1.0};
    for (int step = 0; step < k; ++step) {
        std::vector<double> next(out.size() + base.size() - 1, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = 0; j < base.size(); ++j) next[i + j] += out[i] * base[j];
        out = std::move(next);
    }
    return out;
}

/// Both sides of C(m+k, n+k) = sum_{i=0}^{min(k, m-n)} C(k,i) C(m, i+n).
inline std::pair<std::uint64_t, std::uint64_t> lemma1_identity(int m, int n, int k) {
    if (m < 1 || n < 1 || k < 1) throw DomainError("lemma1_identity: arguments must be positive");
    if (m < n) throw DomainError("lemma1_identity: requires m >= n");
    const auto um = static_cast<std::uint64_t>(m);
    const auto un = static_cast<std::uint64_t>(n);
    const auto uk = static_cast<std::uint64_t>(k);
    const std::uint64_t lhs = binomial_exact(um + uk, un + uk);
    std::uint64_t rhs = 0;
    const std::uint64_t upper = std::min(uk, um - un);
    for (std::uint64_t i = 0; i <= upper; ++i) rhs += binomial_exact(uk, i) * binomial_exact(um, i + un);
    return {lhs, rhs};
}

}  // namespace beamdelay
