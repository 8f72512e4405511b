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

// Rank-one beamforming codebooks and the selection rules run on stale CSI.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamdelay/channel.hpp"
#include "beamdelay/errors.hpp"
#include "beamdelay/rng.hpp"

namespace beamdelay {

enum class CodebookScheme { Rvq, Tas, Pbf };

inline std::string to_string(CodebookScheme s) {
    switch (s) {
        case CodebookScheme::Rvq: return "RVQ";
        case CodebookScheme::Tas: return "TAS";
        case CodebookScheme::Pbf: return "PBF";
    }
    return "?";
}

/// <a, b> = sum_i a_i conj(b_i).
inline cdouble inner_product(std::span<const cdouble> a, std::span<const cdouble> b) {
    cdouble s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

/// Set of unit-norm vectors in C^{n_t}.
///
/// PBF is virtual: it stands for the matched filter h/||h|| of whatever
/// channel it is applied to and stores no vectors.
class Codebook {
public:
    static constexpr double kNormTolerance = 1e-12;

    static Codebook tas(int n_t) {
        Codebook cb(CodebookScheme::Tas, n_t, n_t);
        for (int i = 0; i < n_t; ++i) cb.vectors_[static_cast<std::size_t>(i) * n_t + i] = 1.0;
        return cb;
    }

    static Codebook pbf(int n_t) { return Codebook(CodebookScheme::Pbf, n_t, 0); }

    /// n isotropic unit vectors from normalized CN(0, I) draws.
    static Codebook rvq(RngStream& rng, int n, int n_t) {
        if (n < 1) throw DomainError("rvq codebook: cardinality must be >= 1");
        Codebook cb(CodebookScheme::Rvq, n_t, n);
        cb.redraw(rng);
        return cb;
    }

    /// Builds a codebook from explicit vectors (row-major, size n * n_t).
    /// Vectors are renormalized after checking they are unit-norm within `tolerance`.
    static Codebook from_vectors(CodebookScheme scheme, int n_t, std::vector<cdouble> flat,
                                 double tolerance = 1e-9) {
        if (scheme == CodebookScheme::Pbf) throw DomainError("PBF codebook has no explicit vectors");
        if (n_t < 1 || flat.empty() || flat.size() % static_cast<std::size_t>(n_t) != 0)
            throw DomainError("codebook: vector data does not match n_t");
        const int n = static_cast<int>(flat.size() / static_cast<std::size_t>(n_t));
        Codebook cb(scheme, n_t, n);
        cb.vectors_ = std::move(flat);
        for (int i = 0; i < n; ++i) {
            auto v = cb.mutable_vector(i);
            double s = 0.0;
            for (const auto& c : v) s += std::norm(c);
            if (std::abs(s - 1.0) > tolerance)
                throw DomainError("codebook: vector " + std::to_string(i) + " is not unit norm");
            const double inv = 1.0 / std::sqrt(s);
            for (auto& c : v) c *= inv;
        }
        if (scheme == CodebookScheme::Tas) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n_t; ++j)
                    if (std::abs(cb.vector(i)[static_cast<std::size_t>(j)] - cdouble(i == j ? 1.0 : 0.0)) > tolerance)
                        throw DomainError("codebook: TAS codebook must be the standard basis");
            if (n != n_t) throw DomainError("codebook: TAS codebook must have n_t vectors");
        }
        return cb;
    }

    CodebookScheme scheme() const noexcept { return scheme_; }
    int n_t() const noexcept { return n_t_; }
    /// Cardinality; 0 for the virtual PBF codebook.
    int size() const noexcept { return n_; }

    std::span<const cdouble> vector(int i) const {
        return std::span<const cdouble>(vectors_).subspan(static_cast<std::size_t>(i) * n_t_, n_t_);
    }

    /// Redraws every RVQ vector in place.
    void redraw(RngStream& rng) {
        if (scheme_ != CodebookScheme::Rvq) throw DomainError("only RVQ codebooks can be redrawn");
        for (int i = 0; i < n_; ++i) {
            auto v = mutable_vector(i);
            double s = 0.0;
            for (auto& c : v) {
                c = rng.complex_normal();
                s += std::norm(c);
            }
            const double inv = 1.0 / std::sqrt(s);
            for (auto& c : v) c *= inv;
        }
    }

private:
    Codebook(CodebookScheme scheme, int n_t, int n)
        : scheme_(scheme), n_t_(n_t), n_(n), vectors_(static_cast<std::size_t>(n) * n_t) {
        if (n_t < 1) throw DomainError("codebook: n_t must be >= 1");
    }

    std::span<cdouble> mutable_vector(int i) {
        return std::span<cdouble>(vectors_).subspan(static_cast<std::size_t>(i) * n_t_, n_t_);
    }

    CodebookScheme scheme_;
    int n_t_;
    int n_;
    std::vector<cdouble> vectors_;
};

struct SelectionOutcome {
    int beam_index = 0;
    int user_index = 0;
    double gain = 0.0;
    std::optional<double> tradeoff;  // nu, RVQ only
};

/// Picks the codeword maximizing |<h, p>|^2 on a MISO channel. Ties go to the
/// lowest index.
inline SelectionOutcome select_beamformer(const ChannelMatrix& h, const Codebook& cb) {
    if (!h.is_miso()) throw DomainError("select_beamformer: channel must be MISO (n_r = 1)");
    if (h.n_t() != cb.n_t()) throw DomainError("select_beamformer: codebook dimension mismatch");
    const auto hv = h.entries();
    SelectionOutcome out;
    switch (cb.scheme()) {
        case CodebookScheme::Pbf:
            out.gain = h.norm2();
            return out;
        case CodebookScheme::Tas:
            out.gain = -1.0;
            for (int i = 0; i < h.n_t(); ++i) {
                const double g = std::norm(hv[static_cast<std::size_t>(i)]);
                if (g > out.gain) {
                    out.gain = g;
                    out.beam_index = i;
                }
            }
            return out;
        case CodebookScheme::Rvq: {
            out.gain = -1.0;
            for (int i = 0; i < cb.size(); ++i) {
                const double g = std::norm(inner_product(hv, cb.vector(i)));
                if (g > out.gain) {
                    out.gain = g;
                    out.beam_index = i;
                }
            }
            const double total = h.norm2();
            out.tradeoff = total > 0.0 ? std::min(1.0, out.gain / total) : 1.0;
            return out;
        }
    }
    return out;
}

/// |<h, p>|^2 for the beam chosen by `selection`; `stale` supplies the PBF direction.
inline double beam_gain(const ChannelMatrix& h, const Codebook& cb, const SelectionOutcome& selection,
                        const ChannelMatrix& stale) {
    const auto hv = h.entries();
    switch (cb.scheme()) {
        case CodebookScheme::Pbf: {
            const double n2 = stale.norm2();
            if (n2 == 0.0) return 0.0;
            return std::norm(inner_product(hv, stale.entries())) / n2;
        }
        case CodebookScheme::Tas:
            return std::norm(hv[static_cast<std::size_t>(selection.beam_index)]);
        case CodebookScheme::Rvq:
            return std::norm(inner_product(hv, cb.vector(selection.beam_index)));
    }
    return 0.0;
}

/// Joint transmit-antenna / user choice maximizing ||h_i^(k)||^2; ties by
/// lowest (k, i).
inline SelectionOutcome select_user_antenna(std::span<const ChannelMatrix> users) {
    if (users.empty()) throw DomainError("select_user_antenna: empty user set");
    SelectionOutcome out;
    out.gain = -1.0;
    for (int k = 0; k < static_cast<int>(users.size()); ++k) {
        const auto& h = users[static_cast<std::size_t>(k)];
        if (h.n_t() != users[0].n_t() || h.n_r() != users[0].n_r())
            throw DomainError("select_user_antenna: users must share dimensions");
        for (int i = 0; i < h.n_t(); ++i) {
            const double g = h.row_norm2(i);
            if (g > out.gain) {
                out.gain = g;
                out.beam_index = i;
                out.user_index = k;
            }
        }
    }
    return out;
}

/// User with the largest ||h^(k)||^2 among MISO channels; ties by lowest k.
inline SelectionOutcome select_user_maxnorm(std::span<const ChannelMatrix> users) {
    if (users.empty()) throw DomainError("select_user_maxnorm: empty user set");
    SelectionOutcome out;
    out.gain = -1.0;
    for (int k = 0; k < static_cast<int>(users.size()); ++k) {
        const auto& h = users[static_cast<std::size_t>(k)];
        if (!h.is_miso()) throw DomainError("select_user_maxnorm: users must be MISO");
        const double g = h.norm2();
        if (g > out.gain) {
            out.gain = g;
            out.user_index = k;
        }
    }
    return out;
}

/// Density of the RVQ tradeoff factor nu for n codewords in C^{n_t}:
///   n (n_t - 1) (1 - (1-nu)^(n_t-1))^(n-1) (1-nu)^(n_t-2).
/// For n_t = 1, nu is a point mass at 1 and has no density.
inline double nu_pdf(double nu, int n, int n_t) {
    if (n < 1) throw DomainError("nu_pdf: cardinality must be >= 1");
    if (n_t < 2) throw DomainError("nu_pdf: n_t = 1 is a point mass at nu = 1");
    if (!(nu >= 0.0 && nu <= 1.0)) throw DomainError("nu_pdf: nu must lie in [0, 1]");
    const double q = 1.0 - nu;
    const double tail = std::pow(q, n_t - 1);
    return n * (n_t - 1.0) * std::pow(1.0 - tail, n - 1) * std::pow(q, n_t - 2);
}

}  // namespace beamdelay
