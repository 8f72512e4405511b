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

// Command-line front end. `run` is kept in a header so tests drive it in-process.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamdelay/beamdelay.hpp"
#include "beamdelay/codebook_io.hpp"
#include "beamdelay/output.hpp"
#include "beamdelay/verify.hpp"

namespace beamdelay::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2, kVerification = 3 };

/// Usage problems detected after flag parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunSpec {
    std::string scheme = "miso-pbf";
    std::vector<std::string> schemes;
    int n_t = 4;
    int n_r = 1;
    int n_u = 1;
    double rate = 2.0;
    double snr_db = 10.0;
    std::optional<double> rho;
    std::optional<double> doppler_hz;
    std::optional<double> delay_s;
    int codebook_size = 8;
    std::vector<std::string> evals;
    std::uint64_t trials = 1'000'000;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::uint64_t chunk = 1 << 16;
    std::string format = "csv";
    std::string output;
    std::string codebook_file;
    std::string axis;
    std::vector<double> values;
    std::vector<double> targets{0.01, 0.1};
    std::vector<double> rho_grid;
    int n_max = 4096;
    std::vector<double> snr_grid_db{40.0, 50.0};
    std::vector<std::string> only;
    int nodes = 256;
    int nu_nodes = 128;
    std::string config_path;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

/// Flat key=value lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

/// Inserts config entries ahead of the user's flags, skipping keys the user set.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    std::set<std::string> given;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const auto& a = args[i];
        if (a.rfind("--", 0) != 0) continue;
        const auto eq = a.find('=');
        const std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
        given.insert(name);
        if (name == "config") {
            if (eq != std::string::npos) path = a.substr(eq + 1);
            else if (i + 1 < args.size()) path = args[i + 1];
        }
    }
    if (!path || args.size() < 2) return args;
    std::vector<std::string> merged{args[0], args[1]};
    for (const auto& [key, value] : read_config(*path)) {
        if (key == "config" || given.count(key)) continue;
        merged.push_back("--" + key + "=" + value);
    }
    merged.insert(merged.end(), args.begin() + 2, args.end());
    return merged;
}

inline SchemeId scheme_from(const std::string& name) {
    const auto s = parse_scheme(name);
    if (!s) throw UsageError("unknown scheme: " + name);
    return *s;
}

inline SystemConfig system_config(const RunSpec& spec) {
    SystemConfig c;
    c.n_t = spec.n_t;
    c.n_r = spec.n_r;
    c.n_u = spec.n_u;
    c.rate_bits = spec.rate;
    c.snr_linear = db_to_linear(spec.snr_db);
    if (spec.doppler_hz || spec.delay_s) {
        if (!spec.doppler_hz || !spec.delay_s) throw UsageError("--doppler-hz and --delay-s must be given together");
        c.persistence = PersistenceSpec::from_jakes(*spec.doppler_hz, *spec.delay_s);
    } else {
        c.persistence = PersistenceSpec::from_rho(spec.rho.value_or(1.0));
    }
    return c;
}

inline QuadratureSpec quadrature(const RunSpec& spec) {
    QuadratureSpec q;
    q.node_count = spec.nodes;
    q.nu_node_count = spec.nu_nodes;
    return q;
}

inline TrialPlan trial_plan(const RunSpec& spec) {
    if (!spec.seed) throw UsageError("--seed is required for Monte Carlo evaluation");
    TrialPlan p;
    p.trials = spec.trials;
    p.seed = *spec.seed;
    p.workers = spec.workers;
    p.chunk = spec.chunk;
    return p;
}

inline std::vector<EstimateMethod> evaluators(const RunSpec& spec, std::vector<std::string> fallback) {
    const auto& names = spec.evals.empty() ? fallback : spec.evals;
    std::vector<EstimateMethod> out;
    for (const auto& n : names) {
        EstimateMethod m;
        if (n == "closed") m = EstimateMethod::ClosedForm;
        else if (n == "quadrature") m = EstimateMethod::Quadrature;
        else if (n == "mc") m = EstimateMethod::MonteCarlo;
        else throw UsageError("unknown evaluator: " + n);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw UsageError("at least one evaluator is required");
    return out;
}

inline std::optional<Codebook> load_codebook(const RunSpec& spec) {
    if (spec.codebook_file.empty()) return std::nullopt;
    std::ifstream in(spec.codebook_file);
    if (!in) throw UsageError("cannot open codebook file: " + spec.codebook_file);
    return read_codebook(in);
}

/// Evaluates one analytic method; Monte Carlo is handled by the callers.
inline OutageEstimate analytic_estimate(EstimateMethod m, SchemeId scheme, const SystemConfig& cfg, int n,
                                        const QuadratureSpec& quad) {
    auto est = m == EstimateMethod::ClosedForm ? outage_closed(scheme, cfg, n, quad)
                                               : outage_semianalytic(scheme, cfg, n, quad);
    est.method = m;
    return est;
}

class Emitter {
public:
    Emitter(const RunSpec& spec, std::ostream& out) : spec_(spec), out_(out) {
        if (spec.format != "csv" && spec.format != "json") throw UsageError("--format must be csv or json");
    }

    void emit(const Table& t) {
        std::ofstream file;
        std::ostream* os = &out_;
        if (!spec_.output.empty()) {
            file.open(spec_.output, std::ios::binary);
            if (!file) throw UsageError("cannot open output file: " + spec_.output);
            os = &file;
        }
        if (spec_.format == "json") t.write_json(*os);
        else t.write_csv(*os);
    }

private:
    const RunSpec& spec_;
    std::ostream& out_;
};

inline void add_system_options(CLI::App* app, RunSpec& s) {
    app->add_option("--scheme", s.scheme, "miso-pbf | miso-rvq | miso-tas | mu-tas | mu-pbf | mu-rvq");
    app->add_option("--nt", s.n_t, "transmit antennas")->check(CLI::PositiveNumber);
    app->add_option("--nr", s.n_r, "receive antennas")->check(CLI::PositiveNumber);
    app->add_option("--nu", s.n_u, "users")->check(CLI::PositiveNumber);
    app->add_option("--rate", s.rate, "rate in bits/s/Hz");
    app->add_option("--snr-db", s.snr_db, "SNR in dB");
    auto* rho = app->add_option("--rho", s.rho, "channel persistence in [0,1]");
    auto* fd = app->add_option("--doppler-hz", s.doppler_hz, "maximum Doppler shift (Jakes persistence)");
    auto* dt = app->add_option("--delay-s", s.delay_s, "feedback delay in seconds");
    rho->excludes(fd)->excludes(dt);
    app->add_option("--codebook-size", s.codebook_size, "RVQ codebook cardinality")->check(CLI::PositiveNumber);
    app->add_option("--nodes", s.nodes, "Gauss-Legendre nodes on the gain axis");
    app->add_option("--nu-nodes", s.nu_nodes, "Gauss-Legendre nodes on the tradeoff-factor axis");
    app->add_option("--config", s.config_path, "key=value file; command-line flags take precedence");
}

inline void add_output_options(CLI::App* app, RunSpec& s) {
    app->add_option("--format", s.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--output", s.output, "output path (default stdout)");
}

inline void add_mc_options(CLI::App* app, RunSpec& s, bool seed_required) {
    app->add_option("--trials", s.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    auto* seed = app->add_option("--seed", s.seed, "RNG seed");
    if (seed_required) seed->required();
    app->add_option("--workers", s.workers, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    app->add_option("--chunk", s.chunk, "trials per RNG stream")->check(CLI::PositiveNumber);
    app->add_option("--codebook-file", s.codebook_file, "fixed RVQ codebook (Monte Carlo only)");
}

inline int cmd_point(const RunSpec& spec, bool mc_only, std::ostream& out) {
    const SchemeId scheme = scheme_from(spec.scheme);
    const SystemConfig cfg = system_config(spec);
    const auto quad = quadrature(spec);
    const auto methods = mc_only ? std::vector<EstimateMethod>{EstimateMethod::MonteCarlo}
                                 : evaluators(spec, {"closed", "quadrature"});
    const auto fixed = load_codebook(spec);
    int n = spec.codebook_size;
    if (fixed) n = fixed->size();
    Emitter emitter(spec, out);
    auto table = outage_table();
    for (auto m : methods) {
        if (m == EstimateMethod::MonteCarlo) {
            const auto r = simulate_outage(scheme, cfg, n, trial_plan(spec), fixed ? &*fixed : nullptr);
            table.add_row({std::string("snr_db"), spec.snr_db, std::string(to_string(scheme)), std::string("mc"),
                           r.p_hat, r.std_err, std::string(fixed ? "fixed-codebook" : "")});
        } else {
            if (fixed) throw UsageError("--codebook-file applies to Monte Carlo evaluation only");
            const auto e = analytic_estimate(m, scheme, cfg, n, quad);
            table.add_row({std::string("snr_db"), spec.snr_db, std::string(to_string(scheme)),
                           std::string(to_string(m)), e.value, 0.0, join_flags(e.flags)});
        }
    }
    emitter.emit(table);
    return kOk;
}

inline int cmd_sweep(const RunSpec& spec, std::ostream& out) {
    const SchemeId scheme = scheme_from(spec.scheme);
    const auto axis = parse_axis(spec.axis);
    if (!axis) throw UsageError("unknown axis: " + spec.axis + " (snr_db | rho | codebook_size | users)");
    if (spec.values.empty()) throw UsageError("--values must list at least one value");
    const SystemConfig base = system_config(spec);
    const auto quad = quadrature(spec);
    const auto methods = evaluators(spec, {"closed", "quadrature"});
    const auto fixed = load_codebook(spec);
    Emitter emitter(spec, out);

    std::vector<SweepPoint> mc;
    for (auto m : methods) {
        if (m == EstimateMethod::MonteCarlo) {
            mc = sweep(scheme, base, fixed ? fixed->size() : spec.codebook_size, *axis, spec.values,
                       trial_plan(spec), fixed ? &*fixed : nullptr);
        } else if (fixed) {
            throw UsageError("--codebook-file applies to Monte Carlo evaluation only");
        }
    }
    auto table = outage_table();
    const std::string axis_name(to_string(*axis));
    const std::string scheme_name(to_string(scheme));
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        SystemConfig cfg = base;
        int n = spec.codebook_size;
        apply_axis(*axis, spec.values[i], cfg, n);
        for (auto m : methods) {
            if (m == EstimateMethod::MonteCarlo) {
                table.add_row({axis_name, spec.values[i], scheme_name, std::string("mc"), mc[i].result.p_hat,
                               mc[i].result.std_err, std::string(fixed ? "fixed-codebook" : "")});
            } else {
                const auto e = analytic_estimate(m, scheme, cfg, n, quad);
                table.add_row({axis_name, spec.values[i], scheme_name, std::string(to_string(m)), e.value, 0.0,
                               join_flags(e.flags)});
            }
        }
    }
    emitter.emit(table);
    return kOk;
}

inline int cmd_codebook_size(const RunSpec& spec, std::ostream& out) {
    const SystemConfig base = system_config(spec);
    const auto quad = quadrature(spec);
    std::vector<double> rhos = spec.rho_grid;
    if (rhos.empty()) rhos = {1.0, 0.99, 0.98, 0.95, 0.9, 0.85, 0.8, 0.7, 0.6};
    Emitter emitter(spec, out);
    Table table({"target", "rho", "min_size", "outage", "pbf_floor", "status"});
    for (double target : spec.targets) {
        for (double rho : rhos) {
            SystemConfig cfg = base;
            cfg.persistence = PersistenceSpec::from_rho(rho);
            const auto r = min_codebook_size(target, cfg, spec.n_max, quad);
            table.add_row({target, rho, static_cast<long long>(r.size.value_or(-1)), r.outage, r.pbf_floor,
                           std::string(r.size ? "ok" : "unattainable: " + r.reason)});
        }
    }
    emitter.emit(table);
    return kOk;
}

inline int cmd_diversity(const RunSpec& spec, std::ostream& out) {
    std::vector<std::string> names = spec.schemes;
    if (names.empty()) names.push_back(spec.scheme);
    std::vector<double> rhos = spec.rho_grid;
    if (rhos.empty()) rhos.push_back(spec.rho.value_or(1.0));
    const auto quad = quadrature(spec);
    std::string grid;
    for (double g : spec.snr_grid_db) grid += (grid.empty() ? "" : ";") + Table::format_real(g);
    Emitter emitter(spec, out);
    Table table({"scheme", "rho", "snr_grid_db", "slope"});
    for (const auto& name : names) {
        const SchemeId scheme = scheme_from(name);
        for (double rho : rhos) {
            SystemConfig cfg = system_config(spec);
            cfg.persistence = PersistenceSpec::from_rho(rho);
            const double d = diversity_order(scheme, cfg, spec.snr_grid_db, spec.codebook_size, quad);
            table.add_row({std::string(to_string(scheme)), rho, grid, d});
        }
    }
    emitter.emit(table);
    return kOk;
}

inline int cmd_make_codebook(const RunSpec& spec, std::ostream& out) {
    if (!spec.seed) throw UsageError("--seed is required");
    RngStream rng(*spec.seed, 0);
    const auto cb = Codebook::rvq(rng, spec.codebook_size, spec.n_t);
    if (spec.output.empty()) {
        write_codebook(out, cb);
    } else {
        std::ofstream f(spec.output, std::ios::binary);
        if (!f) throw UsageError("cannot open output file: " + spec.output);
        write_codebook(f, cb);
    }
    return kOk;
}

inline int cmd_verify(const RunSpec& spec, std::ostream& out) {
    verify::Options opt;
    opt.trials = spec.trials;
    if (spec.seed) opt.seed = *spec.seed;
    opt.workers = spec.workers;
    std::vector<std::pair<std::string, bool>> summary;
    for (const auto& c : verify::all_criteria()) {
        if (!spec.only.empty() && std::find(spec.only.begin(), spec.only.end(), c.id) == spec.only.end()) continue;
        const auto r = c.run(opt);
        out << "[" << r.id << "] " << r.title << '\n';
        for (const auto& line : r.log) out << line << '\n';
        out << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << "\n\n";
        out.flush();
        summary.emplace_back(r.id, r.passed);
    }
    bool all = true;
    out << "summary:";
    for (const auto& [id, ok] : summary) {
        out << ' ' << id << '=' << (ok ? "pass" : "fail");
        all = all && ok;
    }
    out << '\n';
    return all ? kOk : kVerification;
}

}  // namespace detail

/// Parses `args` (args[0] is the program name) and runs the chosen subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunSpec spec;
    CLI::App app{"Outage probability of delayed-CSI beamforming and antenna selection", "beamdelay"};
    app.require_subcommand(1);

    auto* analytic = app.add_subcommand("analytic", "single-point evaluation, one row per evaluator");
    detail::add_system_options(analytic, spec);
    detail::add_output_options(analytic, spec);
    detail::add_mc_options(analytic, spec, false);
    analytic->add_option("--eval", spec.evals, "closed,quadrature,mc")->delimiter(',');

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo single point");
    detail::add_system_options(simulate, spec);
    detail::add_output_options(simulate, spec);
    detail::add_mc_options(simulate, spec, true);

    auto* sweep_cmd = app.add_subcommand("sweep", "axis sweep, one row per (value, evaluator)");
    detail::add_system_options(sweep_cmd, spec);
    detail::add_output_options(sweep_cmd, spec);
    detail::add_mc_options(sweep_cmd, spec, false);
    sweep_cmd->add_option("--eval", spec.evals, "closed,quadrature,mc")->delimiter(',');
    sweep_cmd->add_option("--axis", spec.axis, "snr_db | rho | codebook_size | users")->required();
    sweep_cmd->add_option("--values", spec.values, "comma-separated axis values")->delimiter(',')->required();

    auto* cbsize = app.add_subcommand("codebook-size", "minimum RVQ codebook size over a rho grid");
    detail::add_system_options(cbsize, spec);
    detail::add_output_options(cbsize, spec);
    cbsize->add_option("--targets", spec.targets, "outage targets")->delimiter(',');
    cbsize->add_option("--rho-grid", spec.rho_grid, "persistence values")->delimiter(',');
    cbsize->add_option("--n-max", spec.n_max, "largest codebook size searched")->check(CLI::PositiveNumber);

    auto* diversity = app.add_subcommand("diversity", "high-SNR slope per scheme and rho");
    detail::add_system_options(diversity, spec);
    detail::add_output_options(diversity, spec);
    diversity->add_option("--schemes", spec.schemes, "comma-separated schemes (overrides --scheme)")->delimiter(',');
    diversity->add_option("--rho-grid", spec.rho_grid, "persistence values")->delimiter(',');
    diversity->add_option("--snr-grid-db", spec.snr_grid_db, "SNR points in dB")->delimiter(',');

    auto* make_cb = app.add_subcommand("make-codebook", "draw an RVQ codebook file");
    make_cb->add_option("--nt", spec.n_t, "transmit antennas")->check(CLI::PositiveNumber);
    make_cb->add_option("--codebook-size", spec.codebook_size, "cardinality")->check(CLI::PositiveNumber);
    make_cb->add_option("--seed", spec.seed, "RNG seed")->required();
    make_cb->add_option("--output", spec.output, "output path (default stdout)");
    make_cb->add_option("--config", spec.config_path, "key=value file; command-line flags take precedence");

    auto* verify_cmd = app.add_subcommand("verify", "acceptance suite with pass/fail summary");
    verify_cmd->add_option("--trials", spec.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", spec.seed, "RNG seed");
    verify_cmd->add_option("--workers", spec.workers, "worker threads")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--only", spec.only, "criterion ids to run")->delimiter(',');
    verify_cmd->add_option("--config", spec.config_path, "key=value file; command-line flags take precedence");

    try {
        const auto merged = detail::merge_config(args);
        std::vector<const char*> argv;
        for (const auto& a : merged) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (*analytic) return detail::cmd_point(spec, false, out);
        if (*simulate) return detail::cmd_point(spec, true, out);
        if (*sweep_cmd) return detail::cmd_sweep(spec, out);
        if (*cbsize) return detail::cmd_codebook_size(spec, out);
        if (*diversity) return detail::cmd_diversity(spec, out);
        if (*make_cb) return detail::cmd_make_codebook(spec, out);
        if (*verify_cmd) return detail::cmd_verify(spec, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConvergenceError& e) {
        err << "numeric error: " << e.what() << " (partial sum " << e.partial_sum() << ")\n";
        return kNumeric;
    } catch (const CapabilityError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const AccuracyError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const RangeError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    }
    return kUsage;
}

}  // namespace beamdelay::cli
