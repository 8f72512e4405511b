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

// Outage evaluators: closed-form sums, the semi-analytic quadrature engine
// they are checked against, and the conditional outage both are built on.
//
// Every evaluator conditions on the gain g selected from the stale channel.
// The aged gain is then a noncentral chi-square with 2d degrees of freedom
// and noncentrality 2 mu g, and outage is the event that it stays below
// 2 beta:
//     Pr[outage | g] = F_{nc-chi2, 2d, 2 mu g}(2 beta).

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "beamdelay/channel.hpp"
#include "beamdelay/codebook.hpp"
#include "beamdelay/errors.hpp"
#include "beamdelay/gain_distribution.hpp"
#include "beamdelay/quadrature.hpp"
#include "beamdelay/scheme.hpp"
#include "beamdelay/specfun.hpp"

namespace beamdelay {

struct QuadratureSpec {
    int node_count = 256;
    double upper_cut = 0.0;  // gain-axis truncation; 0 picks it from tail_mass
    int nu_node_count = 128;
    double tail_mass = 1e-12;
    SeriesTolerance series{};

    static constexpr double kMaxTailMass = 1e-10;

    void validate() const {
        if (node_count < 16) throw DomainError("QuadratureSpec: node_count must be >= 16");
        if (nu_node_count < 16) throw DomainError("QuadratureSpec: nu_node_count must be >= 16");
        if (!(tail_mass > 0.0 && tail_mass <= kMaxTailMass))
            throw DomainError("QuadratureSpec: tail_mass must lie in (0, 1e-10]");
        if (upper_cut < 0.0) throw DomainError("QuadratureSpec: upper_cut must be >= 0");
        series.validate();
    }
};

enum class EstimateMethod { ClosedForm, Quadrature, MonteCarlo };

inline std::string_view to_string(EstimateMethod m) {
    switch (m) {
        case EstimateMethod::ClosedForm: return "closed";
        case EstimateMethod::Quadrature: return "quadrature";
        case EstimateMethod::MonteCarlo: return "mc";
    }
    return "?";
}

struct OutageEstimate {
    double value = 0.0;
    EstimateMethod method = EstimateMethod::ClosedForm;
    double ci_halfwidth = 0.0;
    std::vector<std::string> flags;
};

/// Pr[outage | selected gain] for an aged gain over `half_dof` complex dimensions.
inline double conditional_outage(double gain, const DerivedParams& params, int half_dof,
                                 const SeriesTolerance& tol = {}) {
    if (params.no_delay) throw DomainError("conditional_outage: undefined without feedback delay");
    if (!(gain >= 0.0)) throw DomainError("conditional_outage: gain must be >= 0");
    return noncentral_chi2_cdf(half_dof, params.mu * gain, params.beta, tol);
}

// ---------------------------------------------------------------------------
// Tradeoff-factor quadrature.

/// Nodes and weights for integral_0^1 g(nu) f_nu(nu) dnu, density folded into the weights.
///
/// The lower end [0, nu_lo) holding less than `tail_mass` of the nu law is
/// dropped so large codebooks, whose density piles up near nu = 1, keep their
/// nodes where the mass is. n_t = 1 yields the point mass at nu = 1.
inline std::vector<std::pair<double, double>> nu_quadrature(int n, int n_t, int nodes, double tail_mass = 1e-12) {
    if (n < 1) throw DomainError("nu_quadrature: cardinality must be >= 1");
    if (n_t == 1) return {{1.0, 1.0}};
    // F_nu(x) = (1 - (1-x)^(n_t-1))^n; invert at tail_mass.
    const double root = -std::expm1(std::log(tail_mass) / n);
    const double nu_lo = std::max(0.0, 1.0 - std::pow(root, 1.0 / (n_t - 1)));
    auto rule = mapped_rule(nu_lo, 1.0, nodes);
    for (auto& [nu, w] : rule) w *= nu_pdf(nu, n, n_t);
    return rule;
}

// ---------------------------------------------------------------------------
// Semi-analytic engine.

namespace detail {

inline double integrate_gain(const GainDistribution& dist, double mu_scale, GammaLadder& ladder,
                             const std::vector<std::pair<double, double>>& gain_rule, const SeriesTolerance& tol) {
    double sum = 0.0;
    for (const auto& [g, w] : gain_rule) {
        const double f = dist.density(g);
        if (f == 0.0) continue;
        sum += w * f * noncentral_chi2_cdf(ladder, mu_scale * g, tol);
    }
    return sum;
}

}  // namespace detail

/// Outage by numerical averaging of the conditional outage over the selected-gain
/// law (and over the RVQ tradeoff factor). `codebook_size` is used by RVQ schemes only.
inline OutageEstimate outage_semianalytic(SchemeId scheme, const SystemConfig& config, int codebook_size = 1,
                                          const QuadratureSpec& quad = {}) {
    check_scheme_config(scheme, config);
    quad.validate();
    const DerivedParams p = derive_params(config);
    const GainDistribution dist = GainDistribution::for_scheme(scheme, config);

    OutageEstimate est;
    est.method = EstimateMethod::Quadrature;

    std::vector<std::pair<double, double>> nu_rule{{1.0, 1.0}};
    if (dist.nu_mixing()) nu_rule = nu_quadrature(codebook_size, config.n_t, quad.nu_node_count, quad.tail_mass);

    if (p.no_delay) {
        // Outage is the gain CDF at gamma0 / nu.
        double v = 0.0;
        for (const auto& [nu, w] : nu_rule) v += w * dist.cdf(p.gamma0 / nu);
        est.value = std::clamp(v, 0.0, 1.0);
        return est;
    }

    double cut = quad.upper_cut;
    if (cut == 0.0) {
        cut = dist.upper_cut(quad.tail_mass);
    } else if (dist.tail(cut) > QuadratureSpec::kMaxTailMass) {
        throw AccuracyError("outage_semianalytic: upper_cut leaves tail mass " + std::to_string(dist.tail(cut)));
    }
    const auto gain_rule = mapped_rule(0.0, cut, quad.node_count);
    GammaLadder ladder(dist.half_dof(), p.beta);

    double v = 0.0;
    for (const auto& [nu, w] : nu_rule) v += w * detail::integrate_gain(dist, p.mu * nu, ladder, gain_rule, quad.series);
    est.value = std::clamp(v, 0.0, 1.0);
    return est;
}

// ---------------------------------------------------------------------------
// Closed forms.
//
// The printed single-user expressions carry typographical errors. Each one is
// exposed as a set of variants so the printed text can be evaluated next to
// the shipped form; the public evaluators use the variant that agrees with
// Monte Carlo and record the correction in OutageEstimate::flags.

/// Coefficient of the k-th term of the PBF sum.
enum class PbfCoefficient {
    Printed,    // mu^k / (k - 1): singular at k = 1
    Factorial,  // mu^k / k!
    Binomial,   // mu^k: binomial mixture weights, shipped
};

/// Single-user perfect beamforming:
///   (1+mu)^{-(n_t-1)} sum_{k<n_t} C(n_t-1,k) c_k Gamma_{k+1}(gamma0).
/// mu^k/(1+mu)^(n_t-1) is evaluated as rho^{2k} (1-rho^2)^{n_t-1-k}.
inline double pbf_closed_variant(const DerivedParams& p, int n_t, PbfCoefficient coef) {
    if (p.no_delay) return regularized_lower_gamma(n_t, p.gamma0);
    const double r2 = p.rho * p.rho;
    const double s2 = (1.0 - p.rho) * (1.0 + p.rho);
    double sum = 0.0;
    for (int k = 0; k < n_t; ++k) {
        double w = binomial(n_t - 1, k) * std::pow(r2, k) * std::pow(s2, n_t - 1 - k);
        switch (coef) {
            case PbfCoefficient::Printed: w /= static_cast<double>(k - 1); break;
            case PbfCoefficient::Factorial: w /= factorial(k); break;
            case PbfCoefficient::Binomial: break;
        }
        sum += w * regularized_lower_gamma(k + 1, p.gamma0);
    }
    return sum;
}

inline constexpr const char* kPbfCoefficientFlag = "pbf-coefficient: mu^k/(k-1) evaluated as mu^k";

inline OutageEstimate outage_pbf_closed(const SystemConfig& config) {
    check_scheme_config(SchemeId::MisoPbf, config);
    const DerivedParams p = derive_params(config);
    OutageEstimate est;
    est.value = std::clamp(pbf_closed_variant(p, config.n_t, PbfCoefficient::Binomial), 0.0, 1.0);
    if (!p.no_delay) est.flags.emplace_back(kPbfCoefficientFlag);
    return est;
}

enum class RvqForm {
    Printed,           // A(k) C(n_t-1,k) mu^k/(k-1) Gamma_{k+1}(gamma0)
    FactorizedMuPow,   // printed factorization with coefficient mu^k
    Exact,             // Gamma_{k+1}(beta/(1+mu nu)) kept inside the nu integral, shipped
};

/// Single-user RVQ with cardinality n.
inline double rvq_closed_variant(const DerivedParams& p, int n_t, int n, const QuadratureSpec& quad, RvqForm form) {
    const auto nu_rule = nu_quadrature(n, n_t, quad.nu_node_count, quad.tail_mass);
    if (p.no_delay) {
        double v = 0.0;
        for (const auto& [nu, w] : nu_rule) v += w * regularized_lower_gamma(n_t, p.gamma0 / nu);
        return v;
    }
    const double r2 = p.rho * p.rho;
    const double s2 = (1.0 - p.rho) * (1.0 + p.rho);
    double sum = 0.0;
    if (form == RvqForm::Exact) {
        // Conditional on nu the aged gain is a Binomial(n_t-1, q) mixture of
        // Gamma(k+1, c) with c = 1 - rho^2 (1 - nu) and q = rho^2 nu / c.
        for (const auto& [nu, w] : nu_rule) {
            const double c = s2 + r2 * nu;
            const double q = r2 * nu / c;
            const double x = p.gamma0 / c;  // = beta / (1 + mu nu)
            double inner = 0.0;
            for (int k = 0; k < n_t; ++k)
                inner += binomial(n_t - 1, k) * std::pow(q, k) * std::pow(1.0 - q, n_t - 1 - k) *
                         regularized_lower_gamma(k + 1, x);
            sum += w * inner;
        }
        return sum;
    }
    for (int k = 0; k < n_t; ++k) {
        double a_k = 0.0;
        for (const auto& [nu, w] : nu_rule) a_k += w * std::pow(nu, k) / std::pow(1.0 + p.mu * nu, n_t - 1);
        double coef = binomial(n_t - 1, k) * std::pow(p.mu, k);
        if (form == RvqForm::Printed) coef /= static_cast<double>(k - 1);
        sum += a_k * coef * regularized_lower_gamma(k + 1, p.gamma0);
    }
    return sum;
}

inline constexpr const char* kRvqFormFlag = "rvq-form: gamma argument beta/(1+mu*nu) kept inside nu integral; coefficient mu^k";

inline OutageEstimate outage_rvq_closed(const SystemConfig& config, int n, const QuadratureSpec& quad = {}) {
    check_scheme_config(SchemeId::MisoRvq, config);
    quad.validate();
    if (n < 1) throw DomainError("outage_rvq_closed: cardinality must be >= 1");
    const DerivedParams p = derive_params(config);
    OutageEstimate est;
    est.value = std::clamp(rvq_closed_variant(p, config.n_t, n, quad, RvqForm::Exact), 0.0, 1.0);
    if (!p.no_delay) est.flags.emplace_back(kRvqFormFlag);
    return est;
}

enum class TasExponent {
    Printed,  // (k+1)/(k+1+mu) * 2 gamma0 / (1 - rho^2)
    Beta,     // (k+1)/(k+1+mu) * beta, shipped
};

/// Single-user transmit antenna selection:
///   n_t sum_k C(n_t-1,k) (-1)^k/(k+1) (1 - exp(-(k+1) X / (k+1+mu))).
inline double tas_closed_variant(const DerivedParams& p, int n_t, TasExponent exponent) {
    if (p.no_delay) return std::pow(-std::expm1(-p.gamma0), n_t);
    const double x = exponent == TasExponent::Printed ? 2.0 * p.beta : p.beta;
    double sum = 0.0;
    for (int k = 0; k < n_t; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += binomial(n_t - 1, k) * sign / (k + 1.0) * -std::expm1(-(k + 1.0) * x / (k + 1.0 + p.mu));
    }
    return n_t * sum;
}

inline constexpr const char* kTasExponentFlag = "tas-exponent: 2*gamma0/(1-rho^2) evaluated as beta";

inline OutageEstimate outage_tas_closed(const SystemConfig& config) {
    check_scheme_config(SchemeId::MisoTas, config);
    const DerivedParams p = derive_params(config);
    OutageEstimate est;
    est.value = std::clamp(tas_closed_variant(p, config.n_t, TasExponent::Beta), 0.0, 1.0);
    if (!p.no_delay) est.flags.emplace_back(kTasExponentFlag);
    return est;
}

/// Outage when the best of `selection_count` i.i.d. Gamma(d) gains is chosen
/// on stale CSI and the aged gain spans d complex dimensions (triple sum with
/// the a_m(d, k) expansion coefficients). Requires mu, beta finite.
inline double selection_outage_series(int selection_count, int d, double mu, double beta) {
    const int z = selection_count;
    if (static_cast<long long>(z - 1) * (d - 1) > kMaxExpansionDegree)
        throw CapabilityError("selection_outage_series: expansion degree (Z-1)(d-1) exceeds supported maximum");
    double total = 0.0;
    for (int k = 0; k < z; ++k) {
        const auto a = expansion_coeffs(d, k);
        const double lambda = 1.0 + k;
        const double x = lambda * beta / (lambda + mu);
        double inner = 0.0;
        for (int m = 0; m < static_cast<int>(a.size()); ++m) {
            if (a[static_cast<std::size_t>(m)] == 0.0) continue;
            double terms = 0.0;
            for (int n = 0; n <= m; ++n) {
                terms += std::pow(mu, n) * factorial(d + n - 1) / (factorial(n) * std::pow(lambda, d + n)) *
                         binomial(d + m - 1, d + n - 1) * regularized_lower_gamma(d + n, x);
            }
            inner += factorial(m) * a[static_cast<std::size_t>(m)] / std::pow(lambda + mu, m) * terms;
        }
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        total += sign * binomial(z - 1, k) * inner;
    }
    return z / factorial(d - 1) * total;
}

/// Multiuser MIMO with joint antenna/user selection and receive MRC.
inline OutageEstimate outage_mutas_closed(const SystemConfig& config) {
    check_scheme_config(SchemeId::MuTas, config);
    const DerivedParams p = derive_params(config);
    const int z = config.n_u * config.n_t;
    OutageEstimate est;
    if (p.no_delay) {
        est.value = std::pow(regularized_lower_gamma(config.n_r, p.gamma0), z);
    } else {
        est.value = std::clamp(selection_outage_series(z, config.n_r, p.mu, p.beta), 0.0, 1.0);
    }
    return est;
}

/// Multiuser MISO with max-norm user selection and perfect beamforming
/// (the MU-TAS expression with the roles of n_r and n_t exchanged, Z = n_u).
inline OutageEstimate outage_mupbf_closed(const SystemConfig& config) {
    check_scheme_config(SchemeId::MuPbf, config);
    const DerivedParams p = derive_params(config);
    OutageEstimate est;
    if (p.no_delay) {
        est.value = std::pow(regularized_lower_gamma(config.n_t, p.gamma0), config.n_u);
    } else {
        est.value = std::clamp(selection_outage_series(config.n_u, config.n_t, p.mu, p.beta), 0.0, 1.0);
    }
    return est;
}

/// Multiuser MISO with RVQ: the MU-PBF sum with mu -> nu mu, averaged over f_nu.
inline OutageEstimate outage_murvq_closed(const SystemConfig& config, int n, const QuadratureSpec& quad = {}) {
    check_scheme_config(SchemeId::MuRvq, config);
    quad.validate();
    if (n < 1) throw DomainError("outage_murvq_closed: cardinality must be >= 1");
    const DerivedParams p = derive_params(config);
    const auto nu_rule = nu_quadrature(n, config.n_t, quad.nu_node_count, quad.tail_mass);
    double v = 0.0;
    for (const auto& [nu, w] : nu_rule) {
        v += w * (p.no_delay ? std::pow(regularized_lower_gamma(config.n_t, p.gamma0 / nu), config.n_u)
                             : selection_outage_series(config.n_u, config.n_t, nu * p.mu, p.beta));
    }
    OutageEstimate est;
    est.value = std::clamp(v, 0.0, 1.0);
    return est;
}

/// Closed-form dispatch; `codebook_size` is used by RVQ schemes only.
inline OutageEstimate outage_closed(SchemeId scheme, const SystemConfig& config, int codebook_size = 1,
                                    const QuadratureSpec& quad = {}) {
    switch (scheme) {
        case SchemeId::MisoPbf: return outage_pbf_closed(config);
        case SchemeId::MisoRvq: return outage_rvq_closed(config, codebook_size, quad);
        case SchemeId::MisoTas: return outage_tas_closed(config);
        case SchemeId::MuTas: return outage_mutas_closed(config);
        case SchemeId::MuPbf: return outage_mupbf_closed(config);
        case SchemeId::MuRvq: return outage_murvq_closed(config, codebook_size, quad);
    }
    throw DomainError("outage_closed: unknown scheme");
}

}  // namespace beamdelay
