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

// Acceptance checks shared by the `verify` subcommand and the acceptance test.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "beamdelay/analysis.hpp"
#include "beamdelay/analytic.hpp"
#include "beamdelay/montecarlo.hpp"
#include "beamdelay/output.hpp"
#include "beamdelay/specfun.hpp"

namespace beamdelay::verify {

struct Options {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 20100601;
    int workers = 1;
};

struct CheckResult {
    std::string id;
    std::string title;
    bool passed = true;
    std::vector<std::string> log;

    void note(std::string line) { log.push_back(std::move(line)); }
    void expect(bool ok, std::string line) {
        if (!ok) passed = false;
        log.push_back(std::string(ok ? "  ok   " : "  FAIL ") + std::move(line));
    }
};

namespace detail {

inline std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

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

struct SchemeCase {
    SchemeId scheme;
    int n_t, n_r, n_u, n;
    const char* label;
};

inline const std::vector<SchemeCase>& agreement_cases() {
    static const std::vector<SchemeCase> cases{
        {SchemeId::MisoPbf, 4, 1, 1, 1, "MISO_PBF"},     {SchemeId::MisoRvq, 4, 1, 1, 8, "MISO_RVQ(N=8)"},
        {SchemeId::MisoTas, 4, 1, 1, 1, "MISO_TAS"},     {SchemeId::MuTas, 4, 2, 2, 1, "MU_TAS(2,4,2)"},
        {SchemeId::MuPbf, 4, 1, 2, 1, "MU_PBF(2,4)"},    {SchemeId::MuRvq, 4, 1, 2, 8, "MU_RVQ(2,4,8)"},
    };
    return cases;
}

inline constexpr double kSnrGridDb[] = {5.0, 10.0, 15.0, 20.0};
inline constexpr double kRhoGrid[] = {0.8, 0.9, 1.0};

inline TrialPlan plan_for(const Options& opt, std::uint64_t point) {
    TrialPlan plan;
    plan.trials = opt.trials;
    plan.seed = opt.seed;
    plan.workers = opt.workers;
    plan.stream_base = point << 32;
    return plan;
}

}  // namespace detail

/// Closed form, quadrature and Monte Carlo on the 6 x 4 x 3 grid.
inline CheckResult three_way_agreement(const Options& opt) {
    using namespace detail;
    CheckResult r{"1", "three-way agreement (closed / quadrature / Monte Carlo)"};
    std::uint64_t point = 0;
    for (const auto& sc : agreement_cases()) {
        for (double rho : kRhoGrid) {
            for (double db : kSnrGridDb) {
                const auto cfg = make_config(sc.n_t, sc.n_r, sc.n_u, db, rho);
                const double closed = outage_closed(sc.scheme, cfg, sc.n).value;
                const double quad = outage_semianalytic(sc.scheme, cfg, sc.n).value;
                const auto mc = simulate_outage(sc.scheme, cfg, sc.n, plan_for(opt, 1000 + point++));
                const bool ok_cq = std::abs(closed - quad) <= 1e-6;
                const bool ok_cm = mc.consistent_with(closed);
                const bool ok_qm = mc.consistent_with(quad);
                r.expect(ok_cq && ok_cm && ok_qm,
                         fmt("%-14s snr=%4.1f dB rho=%.2f closed=%.6e quad=%.6e |d|=%.1e mc=%.6e 3se=%.1e z=%+.2f",
                             sc.label, db, rho, closed, quad, std::abs(closed - quad), mc.p_hat, mc.ci_halfwidth(),
                             mc.std_err > 0 ? (mc.p_hat - closed) / mc.std_err : 0.0));
            }
        }
    }
    return r;
}

/// Printed versus corrected single-user expressions against Monte Carlo.
inline CheckResult typo_arbitration(const Options& opt) {
    using namespace detail;
    CheckResult r{"2", "typo-ledger arbitration (printed vs corrected PBF coefficient)"};
    bool printed_refuted = false;
    std::uint64_t point = 0;
    for (double rho : {0.8, 0.9}) {
        for (double db : kSnrGridDb) {
            const auto cfg = make_config(4, 1, 1, db, rho);
            const auto p = derive_params(cfg);
            const auto mc = simulate_outage(SchemeId::MisoPbf, cfg, 1, plan_for(opt, 5000 + point));
            const auto mc_rvq = simulate_outage(SchemeId::MisoRvq, cfg, 8, plan_for(opt, 6000 + point));
            const auto mc_tas = simulate_outage(SchemeId::MisoTas, cfg, 1, plan_for(opt, 7000 + point));
            ++point;
            const auto dev = [&](const McResult& m, double v) {
                return std::isfinite(v) ? std::abs(v - m.p_hat) / m.std_err : std::numeric_limits<double>::infinity();
            };
            const double printed = pbf_closed_variant(p, 4, PbfCoefficient::Printed);
            const double factorial_form = pbf_closed_variant(p, 4, PbfCoefficient::Factorial);
            const double corrected = pbf_closed_variant(p, 4, PbfCoefficient::Binomial);
            const bool refuted = !std::isfinite(printed) || !mc.consistent_with(printed);
            printed_refuted = printed_refuted || refuted;
            r.note(fmt("  PBF snr=%4.1f rho=%.2f mc=%.6e | printed mu^k/(k-1)=%.6e (%.1f se) %s | mu^k/k!=%.6e "
                       "(%.1f se) | mu^k=%.6e (%.2f se)",
                       db, rho, mc.p_hat, printed, dev(mc, printed), refuted ? "inconsistent" : "consistent",
                       factorial_form, dev(mc, factorial_form), corrected, dev(mc, corrected)));
            r.expect(mc.consistent_with(corrected), fmt("corrected PBF consistent at snr=%.1f rho=%.2f", db, rho));

            const double rvq_printed = rvq_closed_variant(p, 4, 8, {}, RvqForm::Printed);
            const double rvq_fact = rvq_closed_variant(p, 4, 8, {}, RvqForm::FactorizedMuPow);
            const double rvq_exact = rvq_closed_variant(p, 4, 8, {}, RvqForm::Exact);
            r.note(fmt("  RVQ(8) snr=%4.1f rho=%.2f mc=%.6e | printed=%.6e (%.1f se) | factorized mu^k=%.6e (%.1f se) "
                       "| exact=%.6e (%.2f se)",
                       db, rho, mc_rvq.p_hat, rvq_printed, dev(mc_rvq, rvq_printed), rvq_fact, dev(mc_rvq, rvq_fact),
                       rvq_exact, dev(mc_rvq, rvq_exact)));
            r.expect(mc_rvq.consistent_with(rvq_exact), fmt("corrected RVQ consistent at snr=%.1f rho=%.2f", db, rho));

            const double tas_printed = tas_closed_variant(p, 4, TasExponent::Printed);
            const double tas_beta = tas_closed_variant(p, 4, TasExponent::Beta);
            r.note(fmt("  TAS snr=%4.1f rho=%.2f mc=%.6e | printed 2*beta=%.6e (%.1f se) | beta=%.6e (%.2f se)", db,
                       rho, mc_tas.p_hat, tas_printed, dev(mc_tas, tas_printed), tas_beta, dev(mc_tas, tas_beta)));
            r.expect(mc_tas.consistent_with(tas_beta), fmt("corrected TAS consistent at snr=%.1f rho=%.2f", db, rho));
        }
    }
    r.expect(printed_refuted, "printed PBF coefficient inconsistent with Monte Carlo at >= 1 grid point");
    return r;
}

/// Two-point 40/50 dB slopes against the stated diversity orders.
inline CheckResult diversity_orders() {
    using namespace detail;
    CheckResult r{"3", "diversity orders (40-50 dB two-point slopes)"};
    const std::vector<double> grid{40.0, 50.0};
    struct Case {
        SchemeId scheme;
        int n_t, n_r, n_u, n;
        double rho, expected, rel_tol;
        const char* label;
    };
    const Case cases[] = {
        {SchemeId::MisoPbf, 4, 1, 1, 1, 0.9, 1.0, 0.15, "MISO_PBF rho=0.9"},
        {SchemeId::MisoRvq, 4, 1, 1, 8, 0.9, 1.0, 0.15, "MISO_RVQ(8) rho=0.9"},
        {SchemeId::MisoTas, 4, 1, 1, 1, 0.9, 1.0, 0.15, "MISO_TAS rho=0.9"},
        {SchemeId::MisoPbf, 4, 1, 1, 1, 1.0, 4.0, 0.10, "MISO_PBF rho=1"},
        {SchemeId::MisoRvq, 4, 1, 1, 8, 1.0, 4.0, 0.10, "MISO_RVQ(8) rho=1"},
        {SchemeId::MisoTas, 4, 1, 1, 1, 1.0, 4.0, 0.10, "MISO_TAS rho=1"},
        {SchemeId::MuTas, 4, 2, 2, 1, 0.9, 2.0, 0.15, "MU_TAS(2,4,2) rho=0.9"},
        {SchemeId::MuPbf, 4, 1, 2, 1, 0.9, 4.0, 0.15, "MU_PBF(2,4) rho=0.9"},
        {SchemeId::MuRvq, 4, 1, 2, 8, 0.9, 4.0, 0.15, "MU_RVQ(2,4,8) rho=0.9"},
    };
    for (const auto& c : cases) {
        const auto cfg = make_config(c.n_t, c.n_r, c.n_u, 40.0, c.rho);
        const double d = diversity_order(c.scheme, cfg, grid, c.n);
        r.expect(std::abs(d - c.expected) <= c.rel_tol * c.expected,
                 fmt("%-22s slope=%.4f expected %.0f +/- %.0f%%", c.label, d, c.expected, 100 * c.rel_tol));
    }
    return r;
}

/// Single-user reductions of the multiuser forms and the n_r <-> n_t swap.
inline CheckResult reduction_identities() {
    using namespace detail;
    CheckResult r{"4", "reduction identities (closed forms, 1e-9)"};
    constexpr double tol = 1e-9;
    for (double rho : kRhoGrid) {
        for (double db : kSnrGridDb) {
            const auto miso = make_config(4, 1, 1, db, rho);
            const double tas = outage_tas_closed(miso).value;
            const double mutas = outage_mutas_closed(make_config(4, 1, 1, db, rho)).value;
            r.expect(std::abs(tas - mutas) <= tol,
                     fmt("MU_TAS(N_u=1,N_r=1)=MISO_TAS   snr=%4.1f rho=%.2f  %.12e vs %.12e", db, rho, mutas, tas));

            const double pbf = outage_pbf_closed(miso).value;
            const double mupbf = outage_mupbf_closed(miso).value;
            r.expect(std::abs(pbf - mupbf) <= tol,
                     fmt("MU_PBF(N_u=1)=MISO_PBF         snr=%4.1f rho=%.2f  %.12e vs %.12e", db, rho, mupbf, pbf));

            const double rvq = outage_rvq_closed(miso, 8).value;
            const double murvq = outage_murvq_closed(miso, 8).value;
            r.expect(std::abs(rvq - murvq) <= tol,
                     fmt("MU_RVQ(N_u=1)=MISO_RVQ(8)      snr=%4.1f rho=%.2f  %.12e vs %.12e", db, rho, murvq, rvq));

            // n_t transmit antennas with beamforming vs one transmit antenna and
            // n_t receive antennas; the SNR is rescaled so gamma0 is unchanged.
            const auto bf = make_config(3, 1, 2, db, rho);
            auto sel = make_config(1, 3, 2, db, rho);
            sel.snr_linear = bf.snr_linear / 3.0;
            const double a = outage_mupbf_closed(bf).value;
            const double b = outage_mutas_closed(sel).value;
            r.expect(std::abs(a - b) <= tol,
                     fmt("swap MU_PBF(2,N_t=3)=MU_TAS(2,1,N_r=3) snr=%4.1f rho=%.2f  %.12e vs %.12e", db, rho, a, b));
        }
    }
    return r;
}

/// Qualitative curve shapes.
inline CheckResult figure_shapes() {
    using namespace detail;
    CheckResult r{"5", "curve-shape properties"};

    // (a) RVQ decreasing in N toward PBF, gap monotone.
    for (double db : {0.0, 5.0, 10.0, 15.0, 20.0}) {
        const auto cfg = make_config(4, 1, 1, db, 0.9);
        const double pbf = outage_pbf_closed(cfg).value;
        double prev = 1.0;
        double prev_gap = std::numeric_limits<double>::infinity();
        bool ok = true;
        std::string row;
        for (int n = 1; n <= 256; n *= 2) {
            const double v = outage_rvq_closed(cfg, n).value;
            const double gap = v - pbf;
            if (!(v < prev) || !(gap > 0.0) || !(gap < prev_gap)) ok = false;
            prev = v;
            prev_gap = gap;
            row += fmt(" %d:%.4e", n, v);
        }
        r.expect(ok, fmt("(a) snr=%4.1f PBF=%.4e RVQ%s", db, pbf, row.c_str()));
    }

    // (b) PBF <= RVQ(8), PBF <= TAS at rho = 0.8.
    {
        bool ok = true;
        std::string row;
        for (double db = 0.0; db <= 30.0; db += 2.0) {
            const auto cfg = make_config(4, 1, 1, db, 0.8);
            const double pbf = outage_pbf_closed(cfg).value;
            const double rvq = outage_rvq_closed(cfg, 8).value;
            const double tas = outage_tas_closed(cfg).value;
            if (!(pbf <= rvq && pbf <= tas)) ok = false;
            row += fmt(" %g:(%.3e,%.3e,%.3e)", db, pbf, rvq, tas);
        }
        r.expect(ok, "(b) rho=0.8 snr:(PBF,RVQ8,TAS) 0..30 dB step 2");
        r.note("      " + row);
    }

    // (c) MU-TAS nonincreasing in N_u.
    for (double rho : {0.8, 0.9, 1.0}) {
        for (double db : {0.0, 10.0, 20.0}) {
            double prev = 1.0;
            bool ok = true;
            std::string row;
            for (int nu : {1, 2, 4}) {
                const double v = outage_mutas_closed(make_config(4, 2, nu, db, rho)).value;
                if (!(v <= prev)) ok = false;
                prev = v;
                row += fmt(" N_u=%d:%.4e", nu, v);
            }
            r.expect(ok, fmt("(c) MU_TAS N_t=4 N_r=2 snr=%4.1f rho=%.2f%s", db, rho, row.c_str()));
        }
    }

    // (d) min codebook size nondecreasing as rho decreases.
    const double rhos[] = {1.0, 0.99, 0.98, 0.95, 0.9, 0.85, 0.8, 0.7, 0.6};
    for (double target : {0.01, 0.1}) {
        double prev = 0.0;
        bool ok = true;
        std::string row;
        for (double rho : rhos) {
            const auto res = min_codebook_size(target, make_config(4, 1, 1, 15.0, rho), 4096);
            const double size = res.size ? static_cast<double>(*res.size) : std::numeric_limits<double>::infinity();
            if (!(size >= prev)) ok = false;
            prev = size;
            row += res.size ? fmt(" %.2f:%d", rho, *res.size) : fmt(" %.2f:inf", rho);
        }
        r.expect(ok, fmt("(d) target=%.2f snr=15 dB N_t=4 R=2 rho:N%s", target, row.c_str()));
    }
    return r;
}

/// Binomial sum identity, expansion coefficients and the noncentral CDF.
inline CheckResult special_functions(const Options& opt) {
    using namespace detail;
    CheckResult r{"6", "combinatorial and special-function suites"};

    bool lemma_ok = true;
    int lemma_cases = 0;
    for (int m = 1; m <= 12; ++m)
        for (int n = 1; n <= m; ++n)
            for (int k = 1; k <= 12; ++k) {
                const auto [lhs, rhs] = lemma1_identity(m, n, k);
                lemma_ok = lemma_ok && lhs == rhs;
                ++lemma_cases;
            }
    r.expect(lemma_ok, fmt("binomial sum identity exact over 1<=n<=m<=12, 1<=k<=12 (%d cases)", lemma_cases));

    // Brute force: enumerate every exponent tuple (l_1..l_k), l_i < n_r, and
    // add prod 1/l_i! to the coefficient of x^(sum l_i).
    double worst = 0.0;
    for (int nr = 1; nr <= 5; ++nr) {
        for (int k = 0; k <= 8; ++k) {
            std::vector<double> brute(static_cast<std::size_t>(k * (nr - 1) + 1), 0.0);
            std::vector<int> l(static_cast<std::size_t>(k), 0);
            while (true) {
                int deg = 0;
                double c = 1.0;
                for (int x : l) {
                    deg += x;
                    c /= std::tgamma(x + 1.0);
                }
                brute[static_cast<std::size_t>(deg)] += c;
                int i = 0;
                while (i < k && ++l[static_cast<std::size_t>(i)] == nr) l[static_cast<std::size_t>(i++)] = 0;
                if (i == k) break;
            }
            const auto got = expansion_coeffs(nr, k);
            if (got.size() != brute.size()) {
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            for (std::size_t j = 0; j < got.size(); ++j)
                worst = std::max(worst, std::abs(got[j] - brute[j]) / std::max(1.0, std::abs(brute[j])));
        }
    }
    r.expect(worst <= 1e-12, fmt("expansion_coeffs vs brute-force powers, n_r<=5, k<=8: max rel err %.2e", worst));

    struct Triple {
        int d;
        double delta, beta;
    };
    const Triple triples[] = {{1, 0.5, 1.0}, {1, 2.0, 1.5}, {1, 5.0, 3.0}, {2, 1.0, 2.0}, {2, 4.0, 3.0},
                              {2, 10.0, 8.0}, {4, 0.5, 2.0}, {4, 3.0, 5.0}, {4, 8.0, 10.0}};
    std::uint64_t idx = 0;
    for (const auto& t : triples) {
        TrialPlan plan = plan_for(opt, 9000 + idx++);
        // sum_j |a_j + z_j|^2 over d unit complex normals with sum |a_j|^2 = delta:
        // half of a noncentral chi-square with 2d dof and noncentrality 2 delta.
        const double a = std::sqrt(t.delta);
        const auto mc = run_trials(plan, [&] {
            return [&](RngStream& rng) {
                double s = 0.0;
                for (int j = 0; j < t.d; ++j) {
                    auto z = rng.complex_normal();
                    if (j == 0) z += a;
                    s += std::norm(z);
                }
                return s < t.beta;
            };
        });
        const double cdf = noncentral_chi2_cdf(t.d, t.delta, t.beta);
        r.expect(mc.consistent_with(cdf), fmt("F(d=%d, delta=%.1f, beta=%.1f)=%.8f empirical=%.6f 3se=%.1e", t.d,
                                              t.delta, t.beta, cdf, mc.p_hat, mc.ci_halfwidth()));
    }
    return r;
}

/// Renders a small Monte Carlo sweep table as CSV.
inline std::string determinism_csv(const Options& opt, int workers) {
    using namespace detail;
    auto table = outage_table();
    const double values[] = {5.0, 10.0};
    TrialPlan plan = plan_for(opt, 12000);
    plan.trials = std::min<std::uint64_t>(opt.trials, 100'000);
    plan.workers = workers;
    plan.chunk = 4096;
    for (const auto& sc : agreement_cases()) {
        const auto pts = sweep(sc.scheme, make_config(sc.n_t, sc.n_r, sc.n_u, 0.0, 0.9), sc.n, SweepAxis::SnrDb,
                               values, plan);
        for (const auto& pt : pts)
            table.add_row({std::string("snr_db"), pt.value, std::string(to_string(sc.scheme)), std::string("mc"),
                           pt.result.p_hat, pt.result.std_err, std::string()});
    }
    std::ostringstream os;
    table.write_csv(os);
    return os.str();
}

/// Worker-count invariance and byte-stable reruns.
inline CheckResult determinism(const Options& opt) {
    using namespace detail;
    CheckResult r{"7", "determinism (workers 1/4/16, byte-identical CSV)"};
    std::uint64_t point = 0;
    for (const auto& sc : agreement_cases()) {
        const auto cfg = make_config(sc.n_t, sc.n_r, sc.n_u, 10.0, 0.9);
        std::vector<std::uint64_t> counts;
        for (int w : {1, 4, 16}) {
            TrialPlan plan = plan_for(opt, 11000 + point);
            plan.trials = std::min<std::uint64_t>(opt.trials, 200'000);
            plan.workers = w;
            plan.chunk = 4096;
            counts.push_back(simulate_outage(sc.scheme, cfg, sc.n, plan).outage_count);
        }
        ++point;
        r.expect(counts[0] == counts[1] && counts[1] == counts[2],
                 fmt("%-14s outage counts w=1:%llu w=4:%llu w=16:%llu", sc.label,
                     static_cast<unsigned long long>(counts[0]), static_cast<unsigned long long>(counts[1]),
                     static_cast<unsigned long long>(counts[2])));
    }
    const auto first = determinism_csv(opt, 1);
    const auto second = determinism_csv(opt, 1);
    const auto threaded = determinism_csv(opt, 4);
    r.expect(first == second, fmt("CSV rerun byte-identical (%zu bytes)", first.size()));
    r.expect(first == threaded, "CSV identical with 4 workers");
    return r;
}

struct Criterion {
    const char* id;
    std::function<CheckResult(const Options&)> run;
};

inline std::vector<Criterion> all_criteria() {
    return {
        {"1", three_way_agreement},
        {"2", typo_arbitration},
        {"3", [](const Options&) { return diversity_orders(); }},
        {"4", [](const Options&) { return reduction_identities(); }},
        {"5", [](const Options&) { return figure_shapes(); }},
        {"6", special_functions},
        {"7", determinism},
    };
}

}  // namespace beamdelay::verify
