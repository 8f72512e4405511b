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
#include <complex>
#include <numbers>

#include "beamdelay/channel.hpp"
#include "beamdelay/rng.hpp"
#include "test_util.hpp"

using namespace beamdelay;

TEST(Philox, KnownAnswerVectors) {
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
              (Philox4x32Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (Philox4x32Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (Philox4x32Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, DeterministicAndStreamSeparated) {
    RngStream a(7, 3);
    RngStream b(7, 3);
    RngStream c(7, 4);
    RngStream d(8, 3);
    int same_c = 0;
    int same_d = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        same_c += x == c();
        same_d += x == d();
    }
    EXPECT_EQ(same_c, 0);
    EXPECT_EQ(same_d, 0);
}

TEST(RngStream, InterleavingDoesNotMatter) {
    RngStream a(11, 0);
    RngStream b(11, 1);
    std::vector<std::uint64_t> seq_a;
    std::vector<std::uint64_t> seq_b;
    for (int i = 0; i < 50; ++i) {
        seq_a.push_back(a());
        if (i % 3 == 0) seq_b.push_back(b());
    }
    RngStream b2(11, 1);
    for (auto v : seq_b) EXPECT_EQ(v, b2());
    RngStream a2(11, 0);
    for (auto v : seq_a) EXPECT_EQ(v, a2());
}

TEST(RngStream, UniformMoments) {
    RngStream rng(1, 0);
    const int n = 1'000'000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / n, 0.5, 3 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12, 1e-3);
}

TEST(Jakes, Examples) {
    EXPECT_EQ(jakes_persistence(123.0, 0.0), 1.0);
    EXPECT_EQ(jakes_persistence(0.0, 5.0), 1.0);
    EXPECT_NEAR(jakes_persistence(10.0, 1e-3), 0.999013, 5e-7);
    // 2 pi * 10 Hz * 5 ms = pi / 10, well inside the first lobe.
    EXPECT_NEAR(jakes_persistence(10.0, 5e-3), 0.975477774075250, 1e-12);
    try {
        jakes_persistence(10.0, 50e-3);
        FAIL() << "expected BeyondFirstZeroError";
    } catch (const BeyondFirstZeroError& e) {
        EXPECT_NEAR(e.rho(), -0.30424217764409, 1e-9);  // J0(pi)
    }
    EXPECT_THROW(jakes_persistence(-1.0, 1e-3), DomainError);
    EXPECT_THROW(jakes_persistence(1.0, std::nan("")), DomainError);
}

TEST(Jakes, ContinuousAtZeroDelay) {
    double prev = 1.0;
    for (double dt = 1e-6; dt < 1e-2; dt *= 2) {
        const double r = jakes_persistence(10.0, dt);
        EXPECT_LE(r, prev);
        prev = r;
    }
    EXPECT_NEAR(jakes_persistence(10.0, 1e-9), 1.0, 1e-12);
}

TEST(PersistenceSpec, Resolution) {
    EXPECT_EQ(PersistenceSpec{}.resolve(), 1.0);
    EXPECT_EQ(PersistenceSpec::from_rho(0.3).resolve(), 0.3);
    EXPECT_THROW(PersistenceSpec::from_rho(1.2).resolve(), DomainError);
    EXPECT_THROW(PersistenceSpec::from_rho(-0.1).resolve(), DomainError);
    EXPECT_TRUE(PersistenceSpec::from_jakes(10.0, 1e-3).is_jakes());
    EXPECT_THROW(PersistenceSpec::from_jakes(10.0, 50e-3).resolve(), BeyondFirstZeroError);
}

TEST(DeriveParams, Examples) {
    auto c = test_support::miso(0.0, 1.0);
    c.snr_linear = 12.0;
    auto p = derive_params(c);
    EXPECT_NEAR(p.gamma0, 1.0, 1e-15);
    EXPECT_TRUE(p.no_delay);
    EXPECT_TRUE(std::isnan(p.mu));

    c.persistence = PersistenceSpec::from_rho(0.9);
    p = derive_params(c);
    EXPECT_FALSE(p.no_delay);
    EXPECT_NEAR(p.mu, 0.81 / 0.19, 1e-12);

    c.persistence = PersistenceSpec::from_rho(0.8);
    p = derive_params(c);
    EXPECT_NEAR(p.beta, 1.0 / 0.36, 1e-12);
}

TEST(DeriveParams, ConfigValidation) {
    auto c = test_support::miso(10.0, 0.9);
    c.n_t = 0;
    EXPECT_THROW(derive_params(c), DomainError);
    c = test_support::miso(10.0, 0.9);
    c.rate_bits = 0.0;
    EXPECT_THROW(derive_params(c), DomainError);
    c = test_support::miso(10.0, 0.9);
    c.snr_linear = std::numeric_limits<double>::infinity();
    EXPECT_THROW(derive_params(c), DomainError);
}

TEST(DbConversion, Examples) {
    EXPECT_EQ(db_to_linear(0.0), 1.0);
    EXPECT_NEAR(db_to_linear(10.0), 10.0, 1e-14);
    EXPECT_NEAR(db_to_linear(-3.0), 0.501187233627, 1e-12);
}

TEST(DrawChannel, Moments) {
    RngStream rng(99, 0);
    const auto h = draw_channel(rng, 1000, 1000);
    std::complex<double> mean = 0.0;
    double power = 0.0;
    double re2 = 0.0;
    for (const auto& v : h.entries()) {
        mean += v;
        power += std::norm(v);
        re2 += v.real() * v.real();
    }
    const double n = 1e6;
    EXPECT_LT(std::abs(mean.real() / n), 0.004);
    EXPECT_LT(std::abs(mean.imag() / n), 0.004);
    EXPECT_NEAR(power / n, 1.0, 0.005);
    EXPECT_NEAR(re2 / n, 0.5, 0.003);
}

TEST(DrawChannel, Deterministic) {
    RngStream a(5, 2);
    RngStream b(5, 2);
    EXPECT_EQ(draw_channel(a, 4, 2), draw_channel(b, 4, 2));
    EXPECT_THROW(ChannelMatrix(0, 1), DomainError);
    EXPECT_THROW(ChannelMatrix(2, 2, std::vector<cdouble>(3)), DomainError);
}

TEST(AgeChannel, Limits) {
    RngStream rng(3, 0);
    const auto h = draw_channel(rng, 8, 2);
    EXPECT_EQ(age_channel(h, 1.0, rng), h);
    EXPECT_THROW(age_channel(h, 1.5, rng), DomainError);
    EXPECT_THROW(age_channel(h, -0.2, rng), DomainError);
}

TEST(AgeChannel, CorrelationAndStationarity) {
    for (double rho : {0.0, 0.5, 0.9}) {
        RngStream rng(17, static_cast<std::uint64_t>(rho * 10));
        const auto h = draw_channel(rng, 1000, 1000);
        const auto aged = age_channel(h, rho, rng);
        std::complex<double> corr = 0.0;
        double power = 0.0;
        const auto a = aged.entries();
        const auto b = h.entries();
        for (std::size_t i = 0; i < a.size(); ++i) {
            corr += a[i] * std::conj(b[i]);
            power += std::norm(a[i]);
        }
        const double n = 1e6;
        EXPECT_NEAR(power / n, 1.0, 0.005) << rho;
        if (rho == 0.0) {
            EXPECT_LT(std::abs(corr / n), 0.004);
        } else {
            EXPECT_NEAR(corr.real() / n, rho, 0.01);
            EXPECT_NEAR(corr.imag() / n, 0.0, 0.01);
        }
    }
}
