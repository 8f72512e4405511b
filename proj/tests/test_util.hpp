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

#include <algorithm>
#include <cmath>
#include <vector>

#include "beamdelay/channel.hpp"

namespace beamdelay::test_support {

inline SystemConfig make_config(int n_t, int n_r, int n_u, double snr_db, double rho, double rate = 2.0) {
    SystemConfig c;
    c.n_t = n_t;
    c.n_r = n_r;
    c.n_u = n_u;
    c.rate_bits = rate;
    c.snr_linear = db_to_linear(snr_db);
    c.persistence = PersistenceSpec::from_rho(rho);
    return c;
}

inline SystemConfig miso(double snr_db, double rho, int n_t = 4, double rate = 2.0) {
    return make_config(n_t, 1, 1, snr_db, rho, rate);
}

/// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

/// Gamma_k(x) for integer k from the finite Poisson sum 1 - e^-x sum_{j<k} x^j/j!.
inline double gamma_oracle(int k, double x) {
    double term = 1.0;
    double s = 0.0;
    for (int j = 0; j < k; ++j) {
        if (j > 0) term *= x / j;
        s += term;
    }
    return 1.0 - std::exp(-x) * s;
}

}  // namespace beamdelay::test_support
