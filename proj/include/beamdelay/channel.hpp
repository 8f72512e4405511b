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

// Rayleigh channel generation, Jakes persistence and one-step Gauss-Markov
// aging of the channel between estimation and use.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "beamdelay/errors.hpp"
#include "beamdelay/rng.hpp"
#include "beamdelay/specfun.hpp"

namespace beamdelay {

using cdouble = std::complex<double>;

/// rho = J0(2 pi f_d dt). Negative correlations are rejected, not clamped.
inline double jakes_persistence(double doppler_hz, double delay_s) {
    if (!(doppler_hz >= 0.0) || !std::isfinite(doppler_hz))
        throw DomainError("jakes_persistence: doppler_hz must be finite and >= 0");
    if (!(delay_s >= 0.0) || !std::isfinite(delay_s))
        throw DomainError("jakes_persistence: delay_s must be finite and >= 0");
    const double rho = bessel_j0(2.0 * std::numbers::pi * doppler_hz * delay_s);
    if (rho < 0.0) throw BeyondFirstZeroError(rho);
    return rho;
}

struct JakesDelay {
    double doppler_hz = 0.0;
    double delay_s = 0.0;
};

/// Channel persistence, either given directly or via Doppler and feedback delay.
class PersistenceSpec {
public:
    PersistenceSpec() = default;

    static PersistenceSpec from_rho(double rho) { return PersistenceSpec(rho); }
    static PersistenceSpec from_jakes(double doppler_hz, double delay_s) {
        return PersistenceSpec(JakesDelay{doppler_hz, delay_s});
    }

    double resolve() const {
        if (const auto* rho = std::get_if<double>(&value_)) {
            if (!(*rho >= 0.0 && *rho <= 1.0)) throw DomainError("persistence rho must lie in [0, 1]");
            return *rho;
        }
        const auto& j = std::get<JakesDelay>(value_);
        return jakes_persistence(j.doppler_hz, j.delay_s);
    }

    bool is_jakes() const noexcept { return std::holds_alternative<JakesDelay>(value_); }

private:
    explicit PersistenceSpec(double rho) : value_(rho) {}
    explicit PersistenceSpec(JakesDelay j) : value_(j) {}

    std::variant<double, JakesDelay> value_{1.0};
};

/// Parameter record consumed by every evaluator.
struct SystemConfig {
    int n_t = 1;
    int n_r = 1;
    int n_u = 1;
    double rate_bits = 1.0;
    double snr_linear = 1.0;
    PersistenceSpec persistence;

    void validate() const {
        if (n_t < 1 || n_r < 1 || n_u < 1) throw DomainError("SystemConfig: antenna and user counts must be >= 1");
        if (!(rate_bits > 0.0) || !std::isfinite(rate_bits)) throw DomainError("SystemConfig: rate must be > 0");
        if (!(snr_linear > 0.0) || !std::isfinite(snr_linear)) throw DomainError("SystemConfig: snr must be > 0");
        (void)persistence.resolve();
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Scalars shared by every outage expression.
///
/// With rho = 1 mu and beta diverge; `no_delay` is set and both hold NaN so an
/// accidental use shows up instead of silently overflowing.
struct DerivedParams {
    double rho = 1.0;
    double mu = 0.0;      // rho^2 / (1 - rho^2)
    double gamma0 = 0.0;  // (2^R - 1) / (snr / n_t)
    double beta = 0.0;    // gamma0 / (1 - rho^2)
    bool no_delay = false;
};

inline DerivedParams derive_params(const SystemConfig& config) {
    config.validate();
    DerivedParams p;
    p.rho = config.persistence.resolve();
    p.gamma0 = std::expm1(config.rate_bits * std::numbers::ln2) / (config.snr_linear / config.n_t);
    if (p.rho == 1.0) {
        p.no_delay = true;
        p.mu = std::numeric_limits<double>::quiet_NaN();
        p.beta = std::numeric_limits<double>::quiet_NaN();
    } else {
        const double one_minus = (1.0 - p.rho) * (1.0 + p.rho);
        p.mu = p.rho * p.rho / one_minus;
        p.beta = p.gamma0 / one_minus;
    }
    return p;
}

/// n_t x n_r complex channel, row i = gains from transmit antenna i.
class ChannelMatrix {
public:
    ChannelMatrix() = default;
    ChannelMatrix(int n_t, int n_r) : n_t_(n_t), n_r_(n_r), data_(static_cast<std::size_t>(n_t) * n_r) {
        if (n_t < 1 || n_r < 1) throw DomainError("ChannelMatrix: dimensions must be >= 1");
    }
    ChannelMatrix(int n_t, int n_r, std::vector<cdouble> entries) : n_t_(n_t), n_r_(n_r), data_(std::move(entries)) {
        if (n_t < 1 || n_r < 1) throw DomainError("ChannelMatrix: dimensions must be >= 1");
        if (data_.size() != static_cast<std::size_t>(n_t) * n_r)
            throw DomainError("ChannelMatrix: entry count does not match dimensions");
    }

    int n_t() const noexcept { return n_t_; }
    int n_r() const noexcept { return n_r_; }
    bool is_miso() const noexcept { return n_r_ == 1; }

    cdouble& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_r_ + j]; }
    cdouble operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_r_ + j]; }

    std::span<cdouble> entries() noexcept { return data_; }
    std::span<const cdouble> entries() const noexcept { return data_; }
    std::span<const cdouble> row(int i) const {
        return std::span<const cdouble>(data_).subspan(static_cast<std::size_t>(i) * n_r_, n_r_);
    }

    double row_norm2(int i) const {
        double s = 0.0;
        for (const auto& v : row(i)) s += std::norm(v);
        return s;
    }

    double norm2() const {
        double s = 0.0;
        for (const auto& v : data_) s += std::norm(v);
        return s;
    }

    friend bool operator==(const ChannelMatrix&, const ChannelMatrix&) = default;

private:
    int n_t_ = 0;
    int n_r_ = 0;
    std::vector<cdouble> data_;
};

/// Overwrites every entry with a fresh CN(0,1) draw.
inline void fill_gaussian(ChannelMatrix& h, RngStream& rng) {
    for (auto& v : h.entries()) v = rng.complex_normal();
}

inline ChannelMatrix draw_channel(RngStream& rng, int n_t, int n_r) {
    ChannelMatrix h(n_t, n_r);
    fill_gaussian(h, rng);
    return h;
}

/// In place: h <- rho h + sqrt(1 - rho^2) e with e fresh CN(0,1).
inline void age_channel_in_place(ChannelMatrix& h, double rho, RngStream& rng) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("age_channel: rho must lie in [0, 1]");
    if (rho == 1.0) return;
    const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
    for (auto& v : h.entries()) v = rho * v + s * rng.complex_normal();
}

inline ChannelMatrix age_channel(const ChannelMatrix& h, double rho, RngStream& rng) {
    ChannelMatrix out = h;
    age_channel_in_place(out, rho, rng);
    return out;
}

}  // namespace beamdelay
