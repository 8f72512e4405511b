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
#include <limits>

#include "beamdelay/channel.hpp"
#include "beamdelay/errors.hpp"
#include "beamdelay/scheme.hpp"
#include "beamdelay/specfun.hpp"

namespace beamdelay {

/// Law of the selected stale gain: the largest of `selection_count` i.i.d.
/// Gamma(shape, 1) variables. Covers every scheme:
///   PBF / RVQ   ||h||^2             Z = 1,       shape = n_t
///   TAS         max_i |h_i|^2       Z = n_t,     shape = 1
///   MU-TAS      max_{i,k} row norm  Z = n_u n_t, shape = n_r
///   MU-PBF/RVQ  max_k ||h^(k)||^2   Z = n_u,     shape = n_t
/// `half_dof` is the number of complex dimensions the aged gain sums over.
class GainDistribution {
public:
    GainDistribution(int selection_count, int shape, int half_dof, bool nu_mixing = false)
        : z_(selection_count), shape_(shape), d_(half_dof), nu_mixing_(nu_mixing) {
        if (z_ < 1 || shape_ < 1 || d_ < 1) throw DomainError("GainDistribution: parameters must be >= 1");
    }

    static GainDistribution for_scheme(SchemeId s, const SystemConfig& c) {
        switch (s) {
            case SchemeId::MisoPbf: return {1, c.n_t, 1};
            case SchemeId::MisoRvq: return {1, c.n_t, 1, true};
            case SchemeId::MisoTas: return {c.n_t, 1, 1};
            case SchemeId::MuTas: return {c.n_u * c.n_t, c.n_r, c.n_r};
            case SchemeId::MuPbf: return {c.n_u, c.n_t, c.n_t};
            case SchemeId::MuRvq: return {c.n_u, c.n_t, c.n_t, true};
        }
        throw DomainError("GainDistribution: unknown scheme");
    }

    int selection_count() const noexcept { return z_; }
    int shape() const noexcept { return shape_; }
    int half_dof() const noexcept { return d_; }
    bool nu_mixing() const noexcept { return nu_mixing_; }

    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        return std::pow(regularized_lower_gamma(shape_, x), z_);
    }

    /// 1 - cdf(x), accurate far into the tail.
    double tail(double x) const {
        if (x <= 0.0) return 1.0;
        const double q = regularized_upper_gamma(shape_, x);
        return -std::expm1(z_ * std::log1p(-q));
    }

    double density(double x) const {
        if (x < 0.0) return 0.0;
        if (x == 0.0) return (shape_ == 1 && z_ == 1) ? 1.0 : 0.0;
        double log_f = std::log(static_cast<double>(z_)) + (shape_ - 1) * std::log(x) - x - std::lgamma(shape_);
        if (z_ > 1) {
            const double p = regularized_lower_gamma(shape_, x);
            if (p == 0.0) return 0.0;
            log_f += (z_ - 1) * std::log(p);
        }
        return std::exp(log_f);
    }

    /// Smallest x (to bisection precision) with tail(x) <= mass.
    double upper_cut(double mass) const {
        if (!(mass > 0.0 && mass < 1.0)) throw DomainError("upper_cut: mass must lie in (0, 1)");
        double lo = 0.0;
        double hi = static_cast<double>(shape_) + 1.0;
        while (tail(hi) > mass) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (tail(mid) > mass ? lo : hi) = mid;
        }
        return hi;
    }

private:
    int z_;
    int shape_;
    int d_;
    bool nu_mixing_;
};

}  // namespace beamdelay
