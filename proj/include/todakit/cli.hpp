#pragma once

// Batch command-line front end.  One subcommand per module pipeline; every
// run ingests a curve JSON, writes the module's JSON/CSV artifacts into the
// output directory, and reports through the exit status:
//
//   0  success, all residuals within tolerance
//   1  validation failure or a computational error (error.json written)
//   2  input error (unreadable file, malformed JSON or option string)
//
// Outputs are deterministic: fixed summation orders, fixed node ladders, and
// serialization through io.hpp, so identical config + input produce
// byte-identical artifacts.

#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "theta.hpp"

namespace todakit {

enum class Command { Periods, Flow, Equilibrium, Pell, Toda, Schlesinger, Validate, SwDeform };

struct PathSpec {
    std::vector<std::vector<double>> waypoints;
    double step = 0.0;
};

struct TimeRange {
    double start = 0.0, end = 0.0, step = 1.0;

    std::vector<double> samples() const {
        std::vector<double> out;
        if (step <= 0.0 || end < start) {
            out.push_back(start);
            return out;
        }
        const int count = static_cast<int>(std::floor((end - start) / step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) out.push_back(start + step * i);
        return out;
    }
};

struct RunConfig {
    Command command = Command::Validate;
    std::string input_path;
    std::string output_path;
    std::map<std::string, double> tolerances; // overrides of the per-command defaults
    std::optional<PathSpec> path;
    std::optional<std::vector<double>> alpha;
    std::optional<int> N;
    std::vector<int> k;
    std::pair<int, int> n_range{-4, 4};
    TimeRange t_range;
    double t_scalar = 1.0; // deformation parameter picked up from --t
    int jobs = 1;
};

// ---------------------------------------------------------------------------
// option-string parsers

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return parts;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputParseError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw InputParseError("trailing characters in number: '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw InputParseError("not an integer: '" + s + "'");
    }
    if (used != s.size()) throw InputParseError("trailing characters in integer: '" + s + "'");
    return v;
}

} // namespace detail

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& part : detail::split(s, ',')) out.push_back(detail::parse_double(part));
    return out;
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const std::string& part : detail::split(s, ',')) out.push_back(detail::parse_int(part));
    return out;
}

// "2:2.5:0.01" — colon-separated waypoints (comma-separated components each),
// the trailing field being the integration step.
inline PathSpec parse_path_spec(const std::string& s) {
    std::vector<std::string> parts = detail::split(s, ':');
    if (parts.size() < 2)
        throw InputParseError("path needs at least one waypoint and a step: '" + s + "'");
    PathSpec spec;
    spec.step = detail::parse_double(parts.back());
    if (!(spec.step > 0.0)) throw InputParseError("path step must be positive");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
        spec.waypoints.push_back(parse_double_list(parts[i]));
    return spec;
}

// "-4:4" — inclusive integer range.
inline std::pair<int, int> parse_int_range(const std::string& s) {
    std::vector<std::string> parts = detail::split(s, ':');
    if (parts.size() != 2) throw InputParseError("range must be lo:hi: '" + s + "'");
    std::pair<int, int> r{detail::parse_int(parts[0]), detail::parse_int(parts[1])};
    if (r.second < r.first) throw InputParseError("range is empty: '" + s + "'");
    return r;
}

// "0:1:0.1" — start:end:step; a single number means one sample.
inline TimeRange parse_time_range(const std::string& s) {
    std::vector<std::string> parts = detail::split(s, ':');
    TimeRange r;
    if (parts.size() == 1) {
        r.start = r.end = detail::parse_double(parts[0]);
        r.step = 0.0;
        return r;
    }
    if (parts.size() != 3) throw InputParseError("time range must be start:end:step: '" + s + "'");
    r.start = detail::parse_double(parts[0]);
    r.end = detail::parse_double(parts[1]);
    r.step = detail::parse_double(parts[2]);
    if (!(r.step > 0.0)) throw InputParseError("time step must be positive");
    if (r.end < r.start) throw InputParseError("time range is empty: '" + s + "'");
    return r;
}

// ---------------------------------------------------------------------------
// tolerances

inline double tolerance_scale() {
    const char* env = std::getenv("TODAKIT_TOL_SCALE");
    if (env == nullptr || *env == '\0') return 1.0;
    const double v = detail::parse_double(env);
    if (!(v > 0.0)) throw InputParseError("TODAKIT_TOL_SCALE must be positive");
    return v;
}

inline double tolerance(const RunConfig& cfg, const std::string& key, double fallback) {
    auto it = cfg.tolerances.find(key);
    const double base = it == cfg.tolerances.end() ? fallback : it->second;
    return base * tolerance_scale();
}

// ---------------------------------------------------------------------------
// command implementations

namespace detail {

inline void write_artifact(const RunConfig& cfg, const std::string& name,
                           const std::string& content) {
    std::filesystem::path dir(cfg.output_path);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    write_text_file((dir / name).string(), content);
}

inline void write_json(const RunConfig& cfg, const std::string& name, const ojson& doc) {
    write_artifact(cfg, name, doc.dump(2) + "\n");
}

inline void write_error(const RunConfig& cfg, const std::string& type, const std::string& msg) {
    ojson doc;
    doc["error"]["type"] = type;
    doc["error"]["message"] = msg;
    std::cerr << doc.dump() << "\n";
    if (cfg.output_path.empty()) return;
    try {
        write_json(cfg, "error.json", doc);
    } catch (const IoError&) {
        // stderr already carries the report; nothing else to do
    }
}

inline std::vector<double> alpha_or_zero(const RunConfig& cfg, int genus) {
    if (!cfg.alpha) return std::vector<double>(static_cast<std::size_t>(genus), 0.0);
    if (static_cast<int>(cfg.alpha->size()) != genus)
        throw InputParseError("alpha needs one component per handle");
    return *cfg.alpha;
}

inline const PathSpec& require_path(const RunConfig& cfg, int genus) {
    if (!cfg.path) throw InputParseError("this command requires --path");
    for (const auto& wp : cfg.path->waypoints)
        if (static_cast<int>(wp.size()) != genus)
            throw InputParseError("path waypoints need one component per handle");
    return *cfg.path;
}

inline int run_periods(const RunConfig& cfg, const CurveSpec& curve) {
    PeriodData pd(curve);
    std::optional<ThirdKind> tk;
    if (cfg.alpha) tk = pd.third_kind(alpha_or_zero(cfg, curve.genus));
    write_json(cfg, "periods.json", period_data_json(pd, tk));
    return 0;
}

inline int run_flow(const RunConfig& cfg, const CurveSpec& curve) {
    const PathSpec& path = require_path(cfg, curve.genus);
    FlowState state = make_flow_state(curve, alpha_or_zero(cfg, curve.genus));
    FlowTrajectory traj = integrate_flow(state, path.waypoints, path.step);
    write_artifact(cfg, "trajectory.csv", trajectory_csv(traj));

    double max_drift = 0.0;
    for (const FlowSample& s : traj.samples)
        for (const cplx& d : s.drift) max_drift = std::max(max_drift, std::abs(d));
    ojson rep;
    rep["completed"] = traj.completed();
    rep["abort_reason"] = traj.abort_reason;
    rep["samples"] = traj.samples.size();
    rep["max_drift"] = max_drift;
    write_json(cfg, "flow.json", rep);

    const double tol = tolerance(cfg, "drift", 1e-6);
    if (!traj.completed()) {
        write_error(cfg, "ValidationFailure", "flow aborted: " + traj.abort_reason);
        return 1;
    }
    if (max_drift >= tol) {
        write_error(cfg, "ValidationFailure", "b-period drift " + fmt_double(max_drift) +
                                                  " exceeds tolerance " + fmt_double(tol));
        return 1;
    }
    return 0;
}

inline int run_equilibrium(const RunConfig& cfg, const CurveSpec& curve) {
    PeriodData pd(curve);
    MeasureVector measures{pd.band_weights};
    measures.validate();
    std::vector<cplx> b = pd.third_kind(std::vector<double>(curve.x.size(), 0.0)).b_periods;
    write_json(cfg, "measures.json",
               measure_report_json(measures, b, rational_measure_detect(measures)));

    if (!cfg.path) return 0;
    const PathSpec& path = require_path(cfg, curve.genus);
    EquilibriumTrajectory et = isoequilibrium_flow(curve, path.waypoints, path.step);
    write_artifact(cfg, "trajectory.csv", trajectory_csv(et.flow));
    double worst = 0.0;
    for (double d : et.measure_drift) worst = std::max(worst, d);
    ojson rep;
    rep["completed"] = et.flow.completed();
    rep["abort_reason"] = et.flow.abort_reason;
    rep["samples"] = et.flow.samples.size();
    rep["measure_drift"] = et.measure_drift;
    write_json(cfg, "equilibrium_flow.json", rep);

    const double tol = tolerance(cfg, "measure", 1e-6);
    if (!et.flow.completed()) {
        write_error(cfg, "ValidationFailure", "flow aborted: " + et.flow.abort_reason);
        return 1;
    }
    if (worst >= tol) {
        write_error(cfg, "ValidationFailure", "measure drift " + fmt_double(worst) +
                                                  " exceeds tolerance " + fmt_double(tol));
        return 1;
    }
    return 0;
}

inline int run_pell(const RunConfig& cfg, const CurveSpec& curve) {
    if (!cfg.N) throw InputParseError("pell requires --N");
    std::vector<int> k = cfg.k;
    if (k.empty()) {
        PeriodData pd(curve);
        MeasureVector m{pd.band_weights};
        auto cert = rational_measure_detect(m, *cfg.N);
        if (!cert)
            throw NotRational("band masses share no denominator up to the requested degree");
        k = cert->k;
    }
    PellCertificate cert = chebyshev_from_curve(curve, *cfg.N, k);
    write_json(cfg, "certificate.json", certificate_json(cert));
    const double tol = tolerance(cfg, "residual", 1e-10);
    if (cert.residual >= tol) {
        write_error(cfg, "ValidationFailure", "certificate residual " + fmt_double(cert.residual) +
                                                  " exceeds tolerance " + fmt_double(tol));
        return 1;
    }
    return 0;
}

inline int run_toda(const RunConfig& cfg, const CurveSpec& curve) {
    PeriodData pd(curve);
    TodaSolutionParams params = toda_wave_vectors(curve, pd);
    ThetaParams tp = theta_params_for(pd.riemann);

    const std::vector<double> times = cfg.t_range.samples();
    const int n_lo = cfg.n_range.first, n_hi = cfg.n_range.second;
    const std::size_t per_n = times.size();
    std::vector<LatticeRow> rows(static_cast<std::size_t>(n_hi - n_lo + 1) * per_n);

    const int jobs = std::max(1, cfg.jobs);
    std::exception_ptr first_error;
    std::mutex error_gate;
    auto worker = [&](int stride_from) {
        try {
            for (int n = n_lo + stride_from; n <= n_hi; n += jobs) {
                const std::size_t base = static_cast<std::size_t>(n - n_lo) * per_n;
                for (std::size_t it = 0; it < per_n; ++it) {
                    TodaPoint pt = toda_solution(params, tp, n, times[it]);
                    rows[base + it] = LatticeRow{n, times[it], pt.c, pt.v};
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_gate);
            if (!first_error) first_error = std::current_exception();
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    write_artifact(cfg, "lattice.csv", lattice_csv(rows));
    write_json(cfg, "lattice.json", lattice_sidecar_json(params, tp));

    const double tol = tolerance(cfg, "calibration", 1e-6);
    if (params.calibration_residual >= tol) {
        write_error(cfg, "ValidationFailure",
                    "calibration residual " + fmt_double(params.calibration_residual) +
                        " exceeds tolerance " + fmt_double(tol));
        return 1;
    }
    return 0;
}

inline int run_schlesinger(const RunConfig& cfg, const CurveSpec& curve) {
    const std::vector<double> alpha = alpha_or_zero(cfg, curve.genus);
    const cplx t_param(cfg.t_scalar, 0.0);
    ResidueMatrixSet set = build_residue_matrices(curve, alpha, t_param);
    const bool sum_ok = sum_rule_check(set, curve.genus);
    SchlesingerReport rep = constrained_residual(curve, alpha, t_param, 1e-4);

    write_json(cfg, "matrices.json", matrix_set_json(set));
    ojson doc;
    doc["t"] = json_complex(t_param);
    doc["sum_rule"] = sum_ok;
    doc["max_residual"] = rep.max_residual;
    doc["sum_drift"] = rep.sum_drift;
    doc["h"] = rep.h;
    write_json(cfg, "schlesinger.json", doc);

    const double tol = tolerance(cfg, "residual", 1e-6);
    if (!sum_ok) {
        write_error(cfg, "ValidationFailure", "residue sum rule violated");
        return 1;
    }
    if (rep.max_residual >= tol || rep.sum_drift >= tol) {
        write_error(cfg, "ValidationFailure",
                    "deformation residual " + fmt_double(std::max(rep.max_residual, rep.sum_drift)) +
                        " exceeds tolerance " + fmt_double(tol));
        return 1;
    }
    return 0;
}

inline int run_validate(const RunConfig& cfg, const CurveSpec& curve) {
    const std::vector<double> alpha = alpha_or_zero(cfg, curve.genus);
    IdentityReport ir = validate_identities(curve, alpha);
    VariationalReport vr = validate_variational(curve, alpha);

    const double tol_rat = tolerance(cfg, "rational", 1e-12);
    const double tol_res = tolerance(cfg, "residue", 1e-8);
    const double tol_var = tolerance(cfg, "variational", 1e-5);

    ojson doc;
    ojson ident;
    ident["partial_fractions"] = ir.partial_fractions;
    ident["partial_fractions_pair"] = ir.partial_fractions_pair;
    ident["residue_frame"] = ir.residue_frame;
    ident["residue_bidifferential"] = ir.residue_bidifferential;
    ident["residue_basis"] = ir.residue_basis;
    ident["residue_basis_weighted"] = ir.residue_basis_weighted;
    ident["residue_rational"] = ir.residue_rational;
    doc["identities"] = std::move(ident);
    ojson vari;
    vari["rauch_riemann"] = vr.rauch_riemann;
    vari["rauch_third_kind"] = vr.rauch_third_kind;
    vari["self_derivative"] = vr.self_derivative;
    vari["flow_fixed_point"] = vr.flow_fixed_point;
    vari["flow_movable_point"] = vr.flow_movable_point;
    vari["flow_active_point"] = vr.flow_active_point;
    vari["flow_frame"] = vr.flow_frame;
    vari["flow_basis"] = vr.flow_basis;
    doc["variational"] = std::move(vari);
    ojson tols;
    tols["rational"] = tol_rat;
    tols["residue"] = tol_res;
    tols["variational"] = tol_var;
    doc["tolerances"] = std::move(tols);
    write_json(cfg, "validate.json", doc);

    double worst_rat = std::max(ir.partial_fractions, ir.partial_fractions_pair);
    double worst_res = std::max({ir.residue_frame, ir.residue_bidifferential, ir.residue_basis,
                                 ir.residue_basis_weighted, ir.residue_rational});
    double worst_var = std::max({vr.rauch_riemann, vr.rauch_third_kind, vr.self_derivative,
                                 vr.flow_fixed_point, vr.flow_movable_point, vr.flow_active_point,
                                 vr.flow_frame, vr.flow_basis});
    if (worst_rat >= tol_rat || worst_res >= tol_res || worst_var >= tol_var) {
        write_error(cfg, "ValidationFailure", "identity residual above tolerance");
        return 1;
    }
    return 0;
}

inline int run_sw_deform(const RunConfig& cfg, const CurveInput& input) {
    // At the genus-0 boundary the whole moduli space of the regime collapses
    // to a point, so there is nothing to deform and nothing to re-certify.
    if (input.genus == 0) {
        ojson doc;
        doc["message"] = "no nontrivial deformations";
        doc["samples"] = ojson::array();
        write_json(cfg, "sw_deform.json", doc);
        std::cout << "no nontrivial deformations\n";
        return 0;
    }
    const CurveSpec curve = input.to_curve();
    if (!cfg.N) throw InputParseError("sw-deform requires --N");
    const PathSpec& path = require_path(cfg, curve.genus);
    const int expected = *cfg.N - curve.genus - 1;
    if (expected < 0) throw InputParseError("degree too small: N must exceed the genus");

    std::vector<int> k = cfg.k;
    if (k.empty()) {
        PeriodData pd(curve);
        MeasureVector m{pd.band_weights};
        auto cert = rational_measure_detect(m, *cfg.N);
        if (!cert)
            throw NotRational("band masses share no denominator up to the requested degree");
        k = cert->k;
    }

    // the measure-preserving flow keeps the band masses at k/N, so every
    // sample stays inside the regime and the certificate must survive with
    // the same zero structure
    EquilibriumTrajectory et = isoequilibrium_flow(curve, path.waypoints, path.step);
    write_artifact(cfg, "trajectory.csv", trajectory_csv(et.flow));

    const double tol = tolerance(cfg, "residual", 1e-10);
    bool count_ok = true;
    double worst = 0.0;
    ojson samples = ojson::array();
    for (std::size_t s = 0; s < et.flow.samples.size(); ++s) {
        const FlowSample& smp = et.flow.samples[s];
        PellCertificate cert = chebyshev_from_curve(CurveSpec(curve.genus, smp.x, smp.u), *cfg.N, k);
        const int zeros = cert.Q.degree();
        ojson entry;
        entry["step"] = s;
        entry["x"] = smp.x;
        entry["u"] = smp.u;
        entry["residual"] = cert.residual;
        entry["double_zeros"] = zeros;
        entry["signature"] = cert.signature;
        samples.push_back(std::move(entry));
        count_ok = count_ok && zeros == expected;
        worst = std::max(worst, cert.residual);
    }
    ojson doc;
    doc["N"] = *cfg.N;
    doc["expected_double_zeros"] = expected;
    doc["count_constant"] = count_ok;
    doc["max_residual"] = worst;
    doc["samples"] = std::move(samples);
    write_json(cfg, "sw_deform.json", doc);

    if (!et.flow.completed()) {
        write_error(cfg, "ValidationFailure", "flow aborted: " + et.flow.abort_reason);
        return 1;
    }
    if (!count_ok) {
        write_error(cfg, "ValidationFailure", "double-zero count changed along the deformation");
        return 1;
    }
    if (worst >= tol) {
        write_error(cfg, "ValidationFailure", "certificate residual " + fmt_double(worst) +
                                                  " exceeds tolerance " + fmt_double(tol));
        return 1;
    }
    return 0;
}

} // namespace detail

// Execute one parsed configuration.  Exceptions follow the exit contract:
// input-shaped problems come back as 2, anything thrown by the numerics as 1.
inline int run_command(const RunConfig& cfg) {
    CurveInput input;
    try {
        input = read_curve_file(cfg.input_path);
        if (cfg.command == Command::SwDeform) return detail::run_sw_deform(cfg, input);
        const CurveSpec curve = input.to_curve();
        switch (cfg.command) {
            case Command::Periods: return detail::run_periods(cfg, curve);
            case Command::Flow: return detail::run_flow(cfg, curve);
            case Command::Equilibrium: return detail::run_equilibrium(cfg, curve);
            case Command::Pell: return detail::run_pell(cfg, curve);
            case Command::Toda: return detail::run_toda(cfg, curve);
            case Command::Schlesinger: return detail::run_schlesinger(cfg, curve);
            case Command::Validate: return detail::run_validate(cfg, curve);
            case Command::SwDeform: break; // handled above
        }
        throw DimensionMismatch("unknown command");
    } catch (const InputParseError& e) {
        detail::write_error(cfg, "InputParseError", e.what());
        return 2;
    } catch (const IoError& e) {
        detail::write_error(cfg, "IoError", e.what());
        return 2;
    } catch (const OrderingViolation& e) {
        detail::write_error(cfg, "OrderingViolation", e.what());
        return 2;
    } catch (const DimensionMismatch& e) {
        detail::write_error(cfg, "DimensionMismatch", e.what());
        return 2;
    } catch (const Error& e) {
        detail::write_error(cfg, "ComputationError", e.what());
        return 1;
    }
}

// ---------------------------------------------------------------------------
// argv front end

inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"todakit: band curves, isoperiodic flows, Pell certificates, lattice synthesis"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string path_str, alpha_str, k_str, n_str, t_str;
    std::vector<std::string> tol_kv;
    int n_value = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input_path, "curve JSON file")->required();
        sub->add_option("--output", cfg.output_path, "artifact directory")->required();
        sub->add_option("--path", path_str, "waypoints and step, e.g. 2:2.5:0.01");
        sub->add_option("--alpha", alpha_str, "marking parameters, comma separated");
        sub->add_option("--N", n_value, "polynomial degree / lattice period");
        sub->add_option("--k", k_str, "band multiplicities, comma separated");
        sub->add_option("--n", n_str, "lattice site range lo:hi");
        sub->add_option("--t", t_str, "time grid start:end:step, or a single value");
        sub->add_option("--tol", tol_kv, "tolerance override key=value")->take_all();
        sub->add_option("--jobs", cfg.jobs, "worker threads for independent grid rows");
        return sub;
    };

    const std::vector<std::pair<std::string, Command>> table = {
        {"periods", Command::Periods},       {"flow", Command::Flow},
        {"equilibrium", Command::Equilibrium}, {"pell", Command::Pell},
        {"toda", Command::Toda},             {"schlesinger", Command::Schlesinger},
        {"validate", Command::Validate},     {"sw-deform", Command::SwDeform},
    };
    for (const auto& [name, cmd] : table) {
        CLI::App* sub = add_common(app.add_subcommand(name));
        sub->callback([&cfg, cmd] { cfg.command = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        ojson doc;
        doc["error"]["type"] = "InputParseError";
        doc["error"]["message"] = e.what();
        std::cerr << doc.dump() << "\n";
        return 2;
    }

    try {
        if (!path_str.empty()) cfg.path = parse_path_spec(path_str);
        if (!alpha_str.empty()) cfg.alpha = parse_double_list(alpha_str);
        if (app.get_subcommands().front()->count("--N") > 0) cfg.N = n_value;
        if (!k_str.empty()) cfg.k = parse_int_list(k_str);
        if (!n_str.empty()) cfg.n_range = parse_int_range(n_str);
        if (!t_str.empty()) {
            cfg.t_range = parse_time_range(t_str);
            cfg.t_scalar = cfg.t_range.start;
        }
        for (const std::string& kv : tol_kv) {
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw InputParseError("tolerance override must be key=value: '" + kv + "'");
            cfg.tolerances[kv.substr(0, eq)] = detail::parse_double(kv.substr(eq + 1));
        }
        if (cfg.jobs < 1) throw InputParseError("--jobs must be at least 1");
        tolerance_scale(); // reject a malformed env override before running
    } catch (const InputParseError& e) {
        detail::write_error(cfg, "InputParseError", e.what());
        return 2;
    }

    return run_command(cfg);
}

} // namespace todakit
