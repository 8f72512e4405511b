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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "beamdelay/analysis.hpp"
#include "beamdelay/analytic.hpp"
#include "beamdelay/gain_distribution.hpp"
#include "beamdelay/montecarlo.hpp"
#include "test_util.hpp"

using namespace beamdelay;
using test_support::make_config;
using test_support::miso;

namespace {

McResult mc(SchemeId s, const SystemConfig& c, int n, std::uint64_t seed) {
    TrialPlan plan;
    plan.trials = 1'000'000;
    plan.seed = seed;
    return simulate_outage(s, c, n, plan);
}

struct Case {
    SchemeId scheme;
    int n_t, n_r, n_u, n;
};

const std::vector<Case> kCases{
    {SchemeId::MisoPbf, 4, 1, 1, 1}, {SchemeId::MisoRvq, 4, 1, 1, 8}, {SchemeId::MisoTas, 4, 1, 1, 1},
    {SchemeId::MuTas, 4, 2, 2, 1},   {SchemeId::MuPbf, 4, 1, 2, 1},   {SchemeId::MuRvq, 4, 1, 2, 8},
};

}  // namespace

TEST(ConditionalOutage, Limits) {
    const auto p = derive_params(miso(10.0, 0.8));
    for (int d : {1, 2, 4}) EXPECT_EQ(conditional_outage(0.0, p, d), regularized_lower_gamma(d, p.beta));
    DerivedParams zero = p;
    zero.beta = 0.0;
    EXPECT_EQ(conditional_outage(3.0, zero, 1), 0.0);
    EXPECT_THROW(conditional_outage(1.0, derive_params(miso(10.0, 1.0)), 1), DomainError);
    EXPECT_THROW(conditional_outage(-1.0, p, 1), DomainError);
}

TEST(ConditionalOutage, SamplingOracle) {
    DerivedParams p;
    p.mu = 4.2632;
    p.beta = 2.7778;
    // |sqrt(2 mu g) + sqrt(2) z|^2 < 2 beta with z ~ CN(0,1).
    RngStream rng(77, 0);
    const int n = 1'000'000;
    int hits = 0;
    const double a = std::sqrt(2 * p.mu * 2.0);
    for (int i = 0; i < n; ++i) hits += std::norm(a + std::numbers::sqrt2 * rng.complex_normal()) < 2 * p.beta;
    const double ph = static_cast<double>(hits) / n;
    EXPECT_NEAR(conditional_outage(2.0, p, 1), ph, 3 * std::sqrt(ph * (1 - ph) / n));
}

TEST(ConditionalOutage, BoundedAndMonotoneInBeta) {
    DerivedParams p;
    p.mu = 3.0;
    for (int d : {1, 3}) {
        for (double g : {0.0, 0.5, 4.0}) {
            double prev = 0.0;
            for (double beta = 0.0; beta < 40.0; beta += 0.5) {
                p.beta = beta;
                const double v = conditional_outage(g, p, d);
                EXPECT_GE(v, prev);
                EXPECT_LE(v, 1.0);
                prev = v;
            }
        }
    }
}

TEST(GainDistribution, DensityNormalized) {
    for (const auto& c : kCases) {
        const auto cfg = make_config(c.n_t, c.n_r, c.n_u, 10.0, 0.9);
        const auto dist = GainDistribution::for_scheme(c.scheme, cfg);
        const double cut = dist.upper_cut(1e-12);
        EXPECT_LE(dist.tail(cut), 1e-12);
        const double mass = test_support::simpson([&](double g) { return dist.density(g); }, 0.0, cut, 20000);
        EXPECT_NEAR(mass, 1.0, 1e-8) << to_string(c.scheme);
        const double x = 0.7 * c.n_t;
        const double partial = test_support::simpson([&](double g) { return dist.density(g); }, 0.0, x, 20000);
        EXPECT_NEAR(partial, dist.cdf(x), 1e-10);
    }
}

TEST(Semianalytic, VanishingRate) {
    for (const auto& c : kCases)
        for (double rho : {0.9, 1.0}) {
            const auto cfg = make_config(c.n_t, c.n_r, c.n_u, 10.0, rho, 1e-9);
            EXPECT_LT(outage_semianalytic(c.scheme, cfg, c.n).value, 1e-8) << to_string(c.scheme);
            EXPECT_LT(outage_closed(c.scheme, cfg, c.n).value, 1e-8) << to_string(c.scheme);
        }
}

TEST(Semianalytic, PbfWithoutDelayIsGammaCdf) {
    for (double db : {0.0, 10.0, 20.0}) {
        const auto cfg = miso(db, 1.0);
        const double g0 = derive_params(cfg).gamma0;
        EXPECT_NEAR(outage_semianalytic(SchemeId::MisoPbf, cfg).value, test_support::gamma_oracle(4, g0), 1e-13);
    }
}

TEST(Semianalytic, ExplicitCutMustHoldTailMass) {
    QuadratureSpec q;
    q.upper_cut = 5.0;
    EXPECT_THROW(outage_semianalytic(SchemeId::MisoPbf, miso(10.0, 0.9), 1, q), AccuracyError);
    q.upper_cut = 80.0;
    EXPECT_NEAR(outage_semianalytic(SchemeId::MisoPbf, miso(10.0, 0.9), 1, q).value,
                outage_semianalytic(SchemeId::MisoPbf, miso(10.0, 0.9)).value, 1e-8);
    q.node_count = 8;
    EXPECT_THROW(q.validate(), DomainError);
}

TEST(Semianalytic, SchemeConfigChecked) {
    EXPECT_THROW(outage_semianalytic(SchemeId::MisoTas, make_config(4, 2, 1, 10.0, 0.9)), DomainError);
    EXPECT_THROW(outage_semianalytic(SchemeId::MisoPbf, make_config(4, 1, 2, 10.0, 0.9)), DomainError);
    EXPECT_THROW(outage_semianalytic(SchemeId::MuPbf, make_config(4, 2, 2, 10.0, 0.9)), DomainError);
    EXPECT_THROW(outage_closed(SchemeId::MisoRvq, miso(10.0, 0.9), 0), DomainError);
}

TEST(ClosedVsQuadrature, AllSchemesOnGrid) {
    for (const auto& c : kCases)
        for (double rho : {0.0, 0.5, 0.8, 0.9, 0.99, 1.0})
            for (double db : {0.0, 10.0, 25.0}) {
                const auto cfg = make_config(c.n_t, c.n_r, c.n_u, db, rho);
                EXPECT_NEAR(outage_closed(c.scheme, cfg, c.n).value, outage_semianalytic(c.scheme, cfg, c.n).value,
                            1e-6)
                    << to_string(c.scheme) << " rho=" << rho << " db=" << db;
            }
}

TEST(PbfClosed, Examples) {
    for (double db : {5.0, 15.0}) {
        const auto cfg = miso(db, 1.0);
        EXPECT_NEAR(outage_pbf_closed(cfg).value, test_support::gamma_oracle(4, derive_params(cfg).gamma0), 1e-13);
        EXPECT_TRUE(outage_pbf_closed(cfg).flags.empty());
    }
    const auto cfg = miso(15.0, 0.8);
    EXPECT_NEAR(outage_pbf_closed(cfg).value, outage_semianalytic(SchemeId::MisoPbf, cfg).value, 1e-6);
    EXPECT_EQ(outage_pbf_closed(cfg).flags, std::vector<std::string>{kPbfCoefficientFlag});

    // Single antenna: Exp(1) gain, conditional outage averaged by a direct integral.
    const auto one = miso(10.0, 0.7, 1);
    const auto p = derive_params(one);
    const double direct = test_support::simpson(
        [&](double g) { return std::exp(-g) * noncentral_chi2_cdf(1, p.mu * g, p.beta); }, 0.0, 60.0, 40000);
    EXPECT_NEAR(outage_pbf_closed(one).value, direct, 1e-9);
}

TEST(PbfClosed, PrintedCoefficientIsNotEvaluable) {
    const auto p = derive_params(miso(10.0, 0.9));
    EXPECT_FALSE(std::isfinite(pbf_closed_variant(p, 4, PbfCoefficient::Printed)));
    EXPECT_GT(std::abs(pbf_closed_variant(p, 4, PbfCoefficient::Factorial) -
                       pbf_closed_variant(p, 4, PbfCoefficient::Binomial)),
              1e-3);
}

TEST(PbfClosed, MatchesDirectIntegralOracle) {
    // Integral of the conditional outage against the Gamma(4) density, in test code.
    for (double rho : {0.3, 0.8, 0.95}) {
        const auto cfg = miso(12.0, rho);
        const auto p = derive_params(cfg);
        const double direct = test_support::simpson(
            [&](double g) { return g * g * g * std::exp(-g) / 6.0 * noncentral_chi2_cdf(1, p.mu * g, p.beta); }, 0.0,
            60.0, 40000);
        EXPECT_NEAR(outage_pbf_closed(cfg).value, direct, 1e-9) << rho;
    }
}

TEST(RvqClosed, ConvergesToPbfWithoutDelay) {
    const auto cfg = miso(10.0, 1.0);
    const double pbf = outage_pbf_closed(cfg).value;
    const double first_gap = outage_rvq_closed(cfg, 1).value - pbf;
    double prev = 1.0;
    for (int n = 1; n <= 256; n *= 2) {
        const double v = outage_rvq_closed(cfg, n).value;
        EXPECT_LT(v, prev) << n;
        EXPECT_GT(v, pbf) << n;
        prev = v;
    }
    EXPECT_LT(prev - pbf, 0.1 * first_gap);
}

TEST(RvqClosed, SingleAntennaEqualsPbf) {
    for (double rho : {0.6, 1.0}) {
        const auto cfg = miso(8.0, rho, 1);
        EXPECT_NEAR(outage_rvq_closed(cfg, 7).value, outage_pbf_closed(cfg).value, 1e-14);
    }
}

TEST(RvqClosed, PrintedFormsDeviate) {
    const auto p = derive_params(miso(10.0, 0.9));
    EXPECT_FALSE(std::isfinite(rvq_closed_variant(p, 4, 8, {}, RvqForm::Printed)));
    EXPECT_GT(std::abs(rvq_closed_variant(p, 4, 8, {}, RvqForm::FactorizedMuPow) -
                       rvq_closed_variant(p, 4, 8, {}, RvqForm::Exact)),
              1e-3);
}

TEST(RvqClosed, MatchesMonteCarlo) {
    const auto cfg = miso(10.0, 0.9);
    const auto r = mc(SchemeId::MisoRvq, cfg, 8, 101);
    EXPECT_TRUE(r.consistent_with(outage_rvq_closed(cfg, 8).value)) << r.p_hat;
}

TEST(TasClosed, Examples) {
    const auto one = miso(10.0, 0.7, 1);
    EXPECT_NEAR(outage_tas_closed(one).value, outage_semianalytic(SchemeId::MisoTas, one).value, 1e-9);
    const auto p = derive_params(one);
    EXPECT_NEAR(outage_tas_closed(one).value, -std::expm1(-p.beta / (1 + p.mu)), 1e-14);
    for (double db : {0.0, 10.0}) {
        const auto cfg = miso(db, 1.0);
        EXPECT_NEAR(outage_tas_closed(cfg).value, std::pow(1 - std::exp(-derive_params(cfg).gamma0), 4), 1e-14);
    }
    const auto cfg = miso(10.0, 0.8);
    const auto r = mc(SchemeId::MisoTas, cfg, 1, 102);
    EXPECT_TRUE(r.consistent_with(outage_tas_closed(cfg).value)) << r.p_hat;
    EXPECT_FALSE(r.consistent_with(tas_closed_variant(derive_params(cfg), 4, TasExponent::Printed)));
}

TEST(TasClosed, SemianalyticMatchesMonteCarlo) {
    const auto cfg = miso(10.0, 0.9);
    const auto r = mc(SchemeId::MisoTas, cfg, 1, 103);
    EXPECT_TRUE(r.consistent_with(outage_semianalytic(SchemeId::MisoTas, cfg).value)) << r.p_hat;
}

TEST(MuTasClosed, ReducesToTas) {
    for (double rho : {0.5, 0.9, 1.0})
        for (double db : {0.0, 10.0, 20.0}) {
            const auto cfg = miso(db, rho);
            EXPECT_NEAR(outage_mutas_closed(cfg).value, outage_tas_closed(cfg).value, 1e-9) << rho << ' ' << db;
        }
}

TEST(MuTasClosed, Examples) {
    const auto cfg = make_config(4, 2, 2, 10.0, 0.9);
    const auto r = mc(SchemeId::MuTas, cfg, 1, 104);
    EXPECT_TRUE(r.consistent_with(outage_mutas_closed(cfg).value)) << r.p_hat;
    const auto nd = make_config(4, 2, 2, 10.0, 1.0);
    const double g0 = derive_params(nd).gamma0;
    EXPECT_NEAR(outage_mutas_closed(nd).value, std::pow(test_support::gamma_oracle(2, g0), 8), 1e-14);
    EXPECT_THROW(outage_mutas_closed(make_config(4, 2, 17, 10.0, 0.9)), CapabilityError);
}

TEST(MuPbfClosed, SwapIdentity) {
    for (double rho : {0.5, 0.9})
        for (double db : {0.0, 10.0, 20.0}) {
            const auto bf = make_config(3, 1, 2, db, rho);
            auto sel = make_config(1, 3, 2, db, rho);
            sel.snr_linear = bf.snr_linear / 3.0;
            EXPECT_NEAR(outage_mupbf_closed(bf).value, outage_mutas_closed(sel).value, 1e-12);
        }
}

TEST(MuPbfClosed, MatchesMonteCarlo) {
    const auto cfg = make_config(4, 1, 2, 10.0, 0.9);
    const auto r = mc(SchemeId::MuPbf, cfg, 1, 105);
    EXPECT_TRUE(r.consistent_with(outage_mupbf_closed(cfg).value)) << r.p_hat;
}

// The multiuser beamforming forms are derived under receive combining over
// n_t dimensions; their single-user limit is Gamma_{n_t}(gamma0) for every rho,
// which is the delayed single-user PBF value only when rho = 1.
TEST(MuPbfClosed, SingleUserReducesToMisoPbf) {
    for (double rho : {0.8, 0.9, 1.0})
        for (double db : {5.0, 10.0, 15.0, 20.0}) {
            const auto cfg = miso(db, rho);
            EXPECT_NEAR(outage_mupbf_closed(cfg).value, outage_pbf_closed(cfg).value, 1e-9) << rho << ' ' << db;
        }
}

TEST(MuRvqClosed, SingleUserReducesToMisoRvq) {
    for (double rho : {0.8, 0.9, 1.0})
        for (double db : {5.0, 10.0, 15.0, 20.0}) {
            const auto cfg = miso(db, rho);
            EXPECT_NEAR(outage_murvq_closed(cfg, 8).value, outage_rvq_closed(cfg, 8).value, 1e-9)
                << rho << ' ' << db;
        }
}

TEST(MuRvqClosed, Examples) {
    for (double rho : {0.7, 1.0}) {
        const auto one = make_config(1, 1, 3, 10.0, rho);
        EXPECT_NEAR(outage_murvq_closed(one, 5).value, outage_mupbf_closed(one).value, 1e-14);
        const auto cfg = make_config(4, 1, 2, 10.0, rho);
        const double pbf = outage_mupbf_closed(cfg).value;
        double prev = 1.0;
        for (int n = 1; n <= 256; n *= 2) {
            const double v = outage_murvq_closed(cfg, n).value;
            EXPECT_LT(v, prev) << n;
            EXPECT_GE(v, pbf) << n;
            prev = v;
        }
    }
    const auto cfg = make_config(4, 1, 2, 10.0, 0.9);
    const auto r = mc(SchemeId::MuRvq, cfg, 8, 106);
    EXPECT_TRUE(r.consistent_with(outage_murvq_closed(cfg, 8).value)) << r.p_hat;
}

class Monotonicity : public ::testing::TestWithParam<Case> {};

TEST_P(Monotonicity, DecreasingInSnr) {
    const auto c = GetParam();
    for (double rho : {0.5, 0.9, 1.0}) {
        double prev = 1.0;
        for (double db = 0.0; db <= 20.0; db += 5.0) {
            const double v = outage_semianalytic(c.scheme, make_config(c.n_t, c.n_r, c.n_u, db, rho), c.n).value;
            EXPECT_LT(v, prev) << rho << ' ' << db;
            prev = v;
        }
    }
}

TEST_P(Monotonicity, IncreasingInRate) {
    const auto c = GetParam();
    double prev = 0.0;
    for (double rate : {0.5, 1.0, 2.0, 3.0}) {
        const double v = outage_semianalytic(c.scheme, make_config(c.n_t, c.n_r, c.n_u, 10.0, 0.9, rate), c.n).value;
        EXPECT_GT(v, prev) << rate;
        prev = v;
    }
}

TEST_P(Monotonicity, DecreasingInRho) {
    const auto c = GetParam();
    for (double db : {5.0, 10.0, 20.0}) {
        double prev = 1.0;
        for (double rho : {0.0, 0.3, 0.6, 0.8, 0.9, 0.95, 0.99}) {
            const double v = outage_semianalytic(c.scheme, make_config(c.n_t, c.n_r, c.n_u, db, rho), c.n).value;
            EXPECT_LT(v, prev) << "snr=" << db << " rho=" << rho;
            prev = v;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(AllSchemes, Monotonicity, ::testing::ValuesIn(kCases),
                         [](const auto& info) {
                             std::string s(to_string(info.param.scheme));
                             std::replace(s.begin(), s.end(), '-', '_');
                             return s;
                         });

TEST(Ordering, PbfBeatsRvqAndTas) {
    for (double rho : {0.5, 0.8, 0.9, 1.0})
        for (double db = 0.0; db <= 20.0; db += 2.0) {
            const auto cfg = miso(db, rho);
            const double pbf = outage_semianalytic(SchemeId::MisoPbf, cfg).value;
            EXPECT_LE(pbf, outage_semianalytic(SchemeId::MisoRvq, cfg, 8).value);
            EXPECT_LE(pbf, outage_semianalytic(SchemeId::MisoTas, cfg).value);
        }
}

TEST(Diversity, Examples) {
    const std::vector<double> grid{40.0, 50.0};
    const double rvq_nd = diversity_order(SchemeId::MisoRvq, miso(40.0, 1.0), grid, 8);
    EXPECT_GE(rvq_nd, 3.6);
    EXPECT_LE(rvq_nd, 4.4);
    const double rvq_d = diversity_order(SchemeId::MisoRvq, miso(40.0, 0.9), grid, 8);
    EXPECT_GE(rvq_d, 0.85);
    EXPECT_LE(rvq_d, 1.15);
    const double mutas = diversity_order(SchemeId::MuTas, make_config(4, 2, 2, 40.0, 0.9), grid);
    EXPECT_GE(mutas, 1.7);
    EXPECT_LE(mutas, 2.3);
}

TEST(Diversity, Errors) {
    const std::vector<double> one{40.0};
    EXPECT_THROW(diversity_order(SchemeId::MisoPbf, miso(40.0, 0.9), one), DomainError);
    const std::vector<double> same{40.0, 40.0};
    EXPECT_THROW(diversity_order(SchemeId::MisoPbf, miso(40.0, 0.9), same), DomainError);
    const std::vector<double> huge{300.0, 350.0};
    EXPECT_THROW(diversity_order(SchemeId::MuTas, make_config(4, 2, 2, 40.0, 1.0), huge), RangeError);
}

TEST(MinCodebookSize, Boundaries) {
    const auto cfg = miso(10.0, 0.95);
    const double at_one = outage_rvq_closed(cfg, 1).value;
    const auto r1 = min_codebook_size(at_one + 1e-9, cfg, 64);
    ASSERT_TRUE(r1.size);
    EXPECT_EQ(*r1.size, 1);
    const double floor = outage_pbf_closed(cfg).value;
    const auto r2 = min_codebook_size(0.9 * floor, cfg, 64);
    EXPECT_FALSE(r2.size);
    EXPECT_EQ(r2.pbf_floor, floor);
    EXPECT_THROW(min_codebook_size(0.0, cfg, 64), DomainError);
    EXPECT_THROW(min_codebook_size(0.1, cfg, 0), DomainError);
}

TEST(MinCodebookSize, MatchesLinearScan) {
    const auto cfg = miso(10.0, 0.95);
    constexpr int n_max = 256;
    std::optional<int> scan;
    for (int n = 1; n <= n_max && !scan; ++n)
        if (outage_rvq_closed(cfg, n).value <= 0.1) scan = n;
    const auto r = min_codebook_size(0.1, cfg, n_max);
    ASSERT_TRUE(scan);
    ASSERT_TRUE(r.size);
    EXPECT_EQ(*r.size, *scan);
    EXPECT_LE(r.outage, 0.1);
}

TEST(MinCodebookSize, NotReachedWithinLimit) {
    const auto cfg = miso(10.0, 0.95);
    const auto full = min_codebook_size(0.1, cfg, 256);
    ASSERT_TRUE(full.size);
    ASSERT_GT(*full.size, 2);
    const auto capped = min_codebook_size(0.1, cfg, *full.size - 1);
    EXPECT_FALSE(capped.size);
    EXPECT_GT(capped.outage, 0.1);
}
