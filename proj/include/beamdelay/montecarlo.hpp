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

// Monte Carlo link simulation of outage with stale CSI.
//
// Trials are split into fixed-size chunks; chunk c always draws from stream
// (seed, stream_base + c), so the outage count depends on (trials, seed,
// chunk) and never on how many workers share the chunks.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "beamdelay/channel.hpp"
#include "beamdelay/codebook.hpp"
#include "beamdelay/errors.hpp"
#include "beamdelay/rng.hpp"
#include "beamdelay/scheme.hpp"

namespace beamdelay {

struct TrialPlan {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 0;
    int workers = 1;
    std::uint64_t chunk = 1 << 16;
    std::uint64_t stream_base = 0;

    void validate() const {
        if (trials < 1) throw DomainError("TrialPlan: trials must be >= 1");
        if (workers < 1) throw DomainError("TrialPlan: workers must be >= 1");
        if (chunk < 1) throw DomainError("TrialPlan: chunk must be >= 1");
    }
};

struct McResult {
    std::uint64_t outage_count = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double std_err = 0.0;

    static McResult from_counts(std::uint64_t count, std::uint64_t trials) {
        McResult r;
        r.outage_count = count;
        r.trials = trials;
        r.p_hat = static_cast<double>(count) / static_cast<double>(trials);
        r.std_err = std::sqrt(r.p_hat * (1.0 - r.p_hat) / static_cast<double>(trials));
        return r;
    }

    /// Three standard errors; the rule of three (3/trials) when no event was seen.
    double ci_halfwidth() const {
        return outage_count == 0 ? 3.0 / static_cast<double>(trials) : 3.0 * std_err;
    }

    bool consistent_with(double p) const { return std::abs(p - p_hat) <= ci_halfwidth(); }
};

/// Runs `plan.trials` Bernoulli trials. `make_trial()` is called once per
/// worker and must return a callable `bool(RngStream&)`.
template <class MakeTrial>
McResult run_trials(const TrialPlan& plan, MakeTrial&& make_trial) {
    plan.validate();
    const std::uint64_t n_chunks = (plan.trials + plan.chunk - 1) / plan.chunk;
    std::vector<std::uint64_t> counts(n_chunks, 0);
    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(plan.workers));

    auto work = [&](int worker) {
        try {
            auto trial = make_trial();
            for (std::uint64_t c = next++; c < n_chunks; c = next++) {
                RngStream rng(plan.seed, plan.stream_base + c);
                const std::uint64_t begin = c * plan.chunk;
                const std::uint64_t end = std::min(plan.trials, begin + plan.chunk);
                std::uint64_t hits = 0;
                for (std::uint64_t t = begin; t < end; ++t) hits += trial(rng) ? 1 : 0;
                counts[c] = hits;
            }
        } catch (...) {
            errors[static_cast<std::size_t>(worker)] = std::current_exception();
            next = n_chunks;
        }
    };

    const int extra = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(plan.workers), n_chunks)) - 1;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(std::max(extra, 0)));
    for (int w = 1; w <= extra; ++w) threads.emplace_back(work, w);
    work(0);
    for (auto& t : threads) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return McResult::from_counts(total, plan.trials);
}

namespace detail {

/// One link realization: draw stale channels, select on them, age, test the
/// aged effective gain against gamma0.
///
/// Single-user schemes beamform with the stale choice: gain |<h~, p>|^2.
/// MU-TAS combines the selected antenna row with MRC: gain ||h~_i^(k)||^2.
/// MU-PBF / MU-RVQ use the receive-combining dual the multiuser closed forms
/// are derived under: the user is chosen on stale norms and the gain is
/// ||rho sqrt(nu) h^(k) + sqrt(1-rho^2) e||^2 (nu = 1 for PBF).
class OutageTrial {
public:
    OutageTrial(SchemeId scheme, const SystemConfig& config, int codebook_size, const Codebook* fixed)
        : scheme_(scheme), config_(config), fixed_(fixed) {
        const DerivedParams p = derive_params(config);
        rho_ = p.rho;
        noise_ = std::sqrt((1.0 - p.rho) * (1.0 + p.rho));
        gamma0_ = p.gamma0;
        const int user_rx = scheme == SchemeId::MuTas ? config.n_r : 1;
        users_.assign(static_cast<std::size_t>(config.n_u), ChannelMatrix(config.n_t, user_rx));
        switch (scheme) {
            case SchemeId::MisoPbf: codebook_.emplace(Codebook::pbf(config.n_t)); break;
            case SchemeId::MisoTas: codebook_.emplace(Codebook::tas(config.n_t)); break;
            case SchemeId::MisoRvq:
            case SchemeId::MuRvq:
                if (!fixed_) {
                    // Storage only; redrawn before every use.
                    RngStream seed_stream(0, 0);
                    codebook_.emplace(Codebook::rvq(seed_stream, codebook_size, config.n_t));
                }
                break;
            default: break;
        }
    }

    bool operator()(RngStream& rng) {
        for (auto& h : users_) fill_gaussian(h, rng);
        switch (scheme_) {
            case SchemeId::MisoPbf:
            case SchemeId::MisoTas:
            case SchemeId::MisoRvq: return miso(rng);
            case SchemeId::MuTas: return mu_tas(rng);
            case SchemeId::MuPbf:
            case SchemeId::MuRvq: return mu_bf(rng);
        }
        return false;
    }

private:
    const Codebook& active_codebook(RngStream& rng) {
        if (fixed_) return *fixed_;
        if (codebook_->scheme() == CodebookScheme::Rvq) codebook_->redraw(rng);
        return *codebook_;
    }

    bool miso(RngStream& rng) {
        const ChannelMatrix& h = users_[0];
        const Codebook& cb = active_codebook(rng);
        const SelectionOutcome sel = select_beamformer(h, cb);
        aged_ = h;
        age_channel_in_place(aged_, rho_, rng);
        return beam_gain(aged_, cb, sel, h) < gamma0_;
    }

    bool mu_tas(RngStream& rng) {
        const SelectionOutcome sel = select_user_antenna(users_);
        const auto row = users_[static_cast<std::size_t>(sel.user_index)].row(sel.beam_index);
        double gain = 0.0;
        for (const auto& v : row) gain += std::norm(rho_ * v + noise_ * rng.complex_normal());
        return gain < gamma0_;
    }

    bool mu_bf(RngStream& rng) {
        const SelectionOutcome user = select_user_maxnorm(users_);
        const ChannelMatrix& h = users_[static_cast<std::size_t>(user.user_index)];
        double scale = rho_;
        if (scheme_ == SchemeId::MuRvq) {
            const SelectionOutcome beam = select_beamformer(h, active_codebook(rng));
            scale *= std::sqrt(*beam.tradeoff);
        }
        double gain = 0.0;
        for (const auto& v : h.entries()) gain += std::norm(scale * v + noise_ * rng.complex_normal());
        return gain < gamma0_;
    }

    SchemeId scheme_;
    SystemConfig config_;
    const Codebook* fixed_;
    std::optional<Codebook> codebook_;
    std::vector<ChannelMatrix> users_;
    ChannelMatrix aged_;
    double rho_ = 1.0;
    double noise_ = 0.0;
    double gamma0_ = 0.0;
};

}  // namespace detail

/// Empirical outage probability. RVQ schemes redraw their codebook every
/// trial unless `fixed_codebook` is given; PBF and TAS use their virtual
/// codebooks and ignore it.
inline McResult simulate_outage(SchemeId scheme, const SystemConfig& config, int codebook_size, const TrialPlan& plan,
                                const Codebook* fixed_codebook = nullptr) {
    check_scheme_config(scheme, config);
    plan.validate();
    if (is_rvq(scheme)) {
        if (fixed_codebook) {
            if (fixed_codebook->scheme() != CodebookScheme::Rvq || fixed_codebook->n_t() != config.n_t)
                throw DomainError("simulate_outage: fixed codebook must be RVQ with matching n_t");
        } else if (codebook_size < 1) {
            throw DomainError("simulate_outage: RVQ needs codebook_size >= 1");
        }
    } else {
        fixed_codebook = nullptr;
    }
    return run_trials(plan, [&] { return detail::OutageTrial(scheme, config, codebook_size, fixed_codebook); });
}

enum class SweepAxis { SnrDb, Rho, CodebookSize, Users };

inline std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::SnrDb: return "snr_db";
        case SweepAxis::Rho: return "rho";
        case SweepAxis::CodebookSize: return "codebook_size";
        case SweepAxis::Users: return "users";
    }
    return "?";
}

inline std::optional<SweepAxis> parse_axis(std::string_view s) {
    if (s == "snr_db" || s == "snr-db" || s == "snr") return SweepAxis::SnrDb;
    if (s == "rho") return SweepAxis::Rho;
    if (s == "codebook_size" || s == "codebook-size" || s == "n") return SweepAxis::CodebookSize;
    if (s == "users" || s == "nu") return SweepAxis::Users;
    return std::nullopt;
}

/// Applies one axis value to a configuration / codebook size pair.
inline void apply_axis(SweepAxis axis, double value, SystemConfig& config, int& codebook_size) {
    const auto as_count = [&](const char* what) {
        if (!(value >= 1.0) || value != std::floor(value) || value > 1e9)
            throw DomainError(std::string("sweep: ") + what + " values must be positive integers");
        return static_cast<int>(value);
    };
    switch (axis) {
        case SweepAxis::SnrDb: config.snr_linear = db_to_linear(value); break;
        case SweepAxis::Rho: config.persistence = PersistenceSpec::from_rho(value); break;
        case SweepAxis::CodebookSize: codebook_size = as_count("codebook size"); break;
        case SweepAxis::Users: config.n_u = as_count("user"); break;
    }
}

struct SweepPoint {
    double value = 0.0;
    McResult result;
};

/// One simulate_outage per axis value. Value i draws from streams offset by
/// i << 32, so value 0 reproduces a direct call with the same plan.
inline std::vector<SweepPoint> sweep(SchemeId scheme, const SystemConfig& config_template, int codebook_size,
                                     SweepAxis axis, std::span<const double> values, const TrialPlan& plan,
                                     const Codebook* fixed_codebook = nullptr) {
    std::vector<SweepPoint> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        SystemConfig c = config_template;
        int n = codebook_size;
        apply_axis(axis, values[i], c, n);
        TrialPlan p = plan;
        p.stream_base = plan.stream_base + (static_cast<std::uint64_t>(i) << 32);
        out.push_back({values[i], simulate_outage(scheme, c, n, p, fixed_codebook)});
    }
    return out;
}

}  // namespace beamdelay
