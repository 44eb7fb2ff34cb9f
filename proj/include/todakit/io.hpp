#pragma once

// Artifact plumbing: curve JSON input plus the JSON/CSV output formats shared
// by the command-line front end and the regression harness.
//
// Conventions, fixed so that identical inputs serialize byte-identically:
//   - complex numbers as [re, im] pairs, matrices row-major,
//   - JSON objects keep insertion order (nlohmann ordered_json),
//   - CSV doubles printed with %.17g (shortest exact round trip).

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curve.hpp"
#include "equilibrium.hpp"
#include "isoflow.hpp"
#include "pell.hpp"
#include "periods.hpp"
#include "schlesinger.hpp"
#include "toda.hpp"

namespace todakit {

using ojson = nlohmann::ordered_json;

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// curve input

// Raw curve description as it appears on disk.  Kept separate from CurveSpec
// so the genus-0 boundary case (x and u empty) stays representable: some
// commands need to see it and answer gracefully rather than reject it.
struct CurveInput {
    int genus = 0;
    std::vector<double> x;
    std::vector<double> u;

    CurveSpec to_curve() const { return CurveSpec(genus, x, u); }
};

inline CurveInput parse_curve_input(const std::string& text) {
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const std::exception& e) {
        throw InputParseError(std::string("curve JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("genus") || !doc.contains("x") || !doc.contains("u"))
        throw InputParseError("curve JSON needs the fields genus, x, u");
    CurveInput in;
    try {
        in.genus = doc.at("genus").get<int>();
        in.x = doc.at("x").get<std::vector<double>>();
        in.u = doc.at("u").get<std::vector<double>>();
    } catch (const std::exception& e) {
        throw InputParseError(std::string("curve JSON field types: ") + e.what());
    }
    return in;
}

inline CurveInput read_curve_file(const std::string& path) {
    return parse_curve_input(read_text_file(path));
}

// ---------------------------------------------------------------------------
// JSON building blocks

inline ojson json_complex(cplx z) { return ojson::array({z.real(), z.imag()}); }

inline ojson json_complex_vector(const std::vector<cplx>& v) {
    ojson arr = ojson::array();
    for (const cplx& z : v) arr.push_back(json_complex(z));
    return arr;
}

inline ojson json_complex_matrix(const CMat& M) {
    ojson rows = ojson::array();
    for (int i = 0; i < M.n; ++i) {
        ojson row = ojson::array();
        for (int j = 0; j < M.m; ++j) row.push_back(json_complex(M(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string branch_label(BranchId id) {
    switch (id.kind) {
        case BranchKind::Zero: return "zero";
        case BranchKind::One: return "one";
        case BranchKind::X: return "x" + std::to_string(id.index);
        case BranchKind::U: return "u" + std::to_string(id.index);
    }
    throw DimensionMismatch("branch_label: bad id");
}

// ---------------------------------------------------------------------------
// module artifacts

inline ojson period_data_json(const PeriodData& pd,
                              const std::optional<ThirdKind>& tk = std::nullopt) {
    ojson doc;
    doc["genus"] = pd.curve.genus;
    doc["branch_points"] = pd.curve.branch_points();
    doc["riemann"] = json_complex_matrix(pd.riemann);
    doc["abel"] = pd.abel;
    doc["gap_poly"] = pd.q_gap.c;
    doc["band_weights"] = pd.band_weights;
    if (tk) {
        ojson third;
        third["alpha"] = tk->alpha;
        third["numerator"] = tk->p.c;
        third["b_periods"] = json_complex_vector(tk->b_periods);
        doc["third_kind"] = std::move(third);
    }
    return doc;
}

inline std::string trajectory_csv(const FlowTrajectory& traj) {
    if (traj.samples.empty()) throw IoError("trajectory has no samples to write");
    const std::size_t g = traj.samples.front().x.size();
    std::ostringstream out;
    out << "step_index";
    for (std::size_t j = 1; j <= g; ++j) out << ",x_" << j;
    for (std::size_t j = 1; j <= g; ++j) out << ",u_" << j;
    for (std::size_t j = 1; j <= g; ++j) out << ",drift_re_" << j << ",drift_im_" << j;
    out << "\n";
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        const FlowSample& smp = traj.samples[s];
        out << s;
        for (double v : smp.x) out << ',' << fmt_double(v);
        for (double v : smp.u) out << ',' << fmt_double(v);
        for (const cplx& d : smp.drift)
            out << ',' << fmt_double(d.real()) << ',' << fmt_double(d.imag());
        out << "\n";
    }
    return out.str();
}

inline ojson measure_report_json(const MeasureVector& m, const std::vector<cplx>& b_periods,
                                 const std::optional<RationalCertificate>& rational) {
    ojson doc;
    doc["rho"] = m.rho;
    doc["b_periods"] = json_complex_vector(b_periods);
    if (rational) {
        ojson r;
        r["N"] = rational->N;
        r["k"] = rational->k;
        doc["rational"] = std::move(r);
    } else {
        doc["rational"] = nullptr;
    }
    return doc;
}

inline ojson certificate_json(const PellCertificate& cert) {
    ojson doc;
    doc["N"] = cert.N;
    doc["P"] = cert.P.c;
    doc["Q"] = cert.Q.c;
    doc["residual"] = cert.residual;
    doc["signature"] = cert.signature;
    return doc;
}

struct LatticeRow {
    int n = 0;
    double t = 0.0;
    cplx c;
    cplx v;
};

inline std::string lattice_csv(const std::vector<LatticeRow>& rows) {
    std::ostringstream out;
    out << "n,t,re_c,im_c,re_v,im_v\n";
    for (const LatticeRow& r : rows) {
        out << r.n << ',' << fmt_double(r.t) << ',' << fmt_double(r.c.real()) << ','
            << fmt_double(r.c.imag()) << ',' << fmt_double(r.v.real()) << ','
            << fmt_double(r.v.imag()) << "\n";
    }
    return out.str();
}

inline ojson lattice_sidecar_json(const TodaSolutionParams& p, const ThetaParams& tp) {
    ojson doc;
    doc["U"] = json_complex_vector(p.U);
    doc["V"] = json_complex_vector(p.V);
    doc["z0"] = json_complex_vector(p.z0);
    doc["c_scale"] = p.c_scale;
    doc["v_sign"] = p.v_sign;
    doc["calibration_residual"] = p.calibration_residual;
    doc["theta_radius"] = tp.radius;
    return doc;
}

inline ojson matrix_set_json(const ResidueMatrixSet& set) {
    ojson doc;
    for (std::size_t j = 0; j < set.labels.size(); ++j) {
        const CMat& A = set.matrices[j];
        ojson flat = ojson::array();
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) flat.push_back(json_complex(A(r, c)));
        doc[branch_label(set.labels[j])] = std::move(flat);
    }
    return doc;
}

} // namespace todakit
