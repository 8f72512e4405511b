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

// Diversity-order estimation and the RVQ codebook-size search.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "beamdelay/analytic.hpp"

namespace beamdelay {

/// Least-squares slope of -ln P_out against ln(snr) over `snr_grid_db`,
/// with P_out from the quadrature engine.
inline double diversity_order(SchemeId scheme, const SystemConfig& config, std::span<const double> snr_grid_db,
                              int codebook_size = 1, const QuadratureSpec& quad = {}) {
    if (snr_grid_db.size() < 2) throw DomainError("diversity_order: need at least two SNR points");
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (double db : snr_grid_db) {
        SystemConfig c = config;
        c.snr_linear = db_to_linear(db);
        const double p = outage_semianalytic(scheme, c, codebook_size, quad).value;
        if (!(p >= std::numeric_limits<double>::min()))
            throw RangeError("diversity_order: outage underflows at " + std::to_string(db) + " dB");
        const double x = std::log(c.snr_linear);
        const double y = -std::log(p);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(snr_grid_db.size());
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0.0)) throw DomainError("diversity_order: SNR grid points must be distinct");
    return (n * sxy - sx * sy) / denom;
}

struct CodebookSizeResult {
    std::optional<int> size;  // empty when unattainable
    double pbf_floor = 0.0;   // N -> infinity limit
    double outage = 0.0;      // RVQ outage at `size` (or at n_max when unattainable)
    std::string reason;
};

/// Smallest RVQ cardinality N <= n_max whose outage is at most `target`,
/// found by doubling then bisection (outage is nonincreasing in N).
inline CodebookSizeResult min_codebook_size(double target, const SystemConfig& config, int n_max,
                                            const QuadratureSpec& quad = {}) {
    if (!(target > 0.0 && target < 1.0)) throw DomainError("min_codebook_size: target must lie in (0, 1)");
    if (n_max < 1) throw DomainError("min_codebook_size: n_max must be >= 1");

    CodebookSizeResult out;
    out.pbf_floor = outage_pbf_closed(config).value;
    if (out.pbf_floor > target) {
        out.outage = out.pbf_floor;
        out.reason = "target below perfect-beamforming floor";
        return out;
    }
    const auto outage_at = [&](int n) { return outage_rvq_closed(config, n, quad).value; };

    double v = outage_at(1);
    if (v <= target) {
        out.size = 1;
        out.outage = v;
        return out;
    }
    int lo = 1;  // fails
    int hi = 2;
    while (true) {
        if (hi >= n_max) {
            hi = n_max;
            v = outage_at(hi);
            if (v > target) {
                out.outage = v;
                out.reason = "target not reached within n_max";
                return out;
            }
            break;
        }
        v = outage_at(hi);
        if (v <= target) break;
        lo = hi;
        hi *= 2;
    }
    double v_hi = v;
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        const double vm = outage_at(mid);
        if (vm <= target) {
            hi = mid;
            v_hi = vm;
        } else {
            lo = mid;
        }
    }
    out.size = hi;
    out.outage = v_hi;
    return out;
}

}  // namespace beamdelay
