#pragma once

// Equilibrium measures of systems of real intervals and deformations that
// preserve them.  For the union [0,1] ∪ [x_1,u_1] ∪ ... ∪ [x_g,u_g] the
// logarithmic-energy minimizer puts mass rho_j on each interval; those masses
// are band integrals of the monic polynomial whose gap integrals vanish, and
// they translate into handle periods of the weightless third-kind
// differential.  Moving the left edges while re-solving for the right edges
// with zero weights keeps every mass fixed; a measure vector whose entries
// share one small denominator certifies the system as the essential spectrum
// of a periodic Jacobi matrix.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "isoflow.hpp"
#include "linalg.hpp"
#include "periods.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"

namespace todakit {

// A curve presented as its system of spectral bands.
struct IntervalSystem {
    std::vector<std::pair<double, double>> bands; // g+1 of them, first [0,1]

    static IntervalSystem from_curve(const CurveSpec& c) {
        IntervalSystem s;
        s.bands.emplace_back(0.0, 1.0);
        for (int j = 0; j < c.genus; ++j)
            s.bands.emplace_back(c.x[static_cast<std::size_t>(j)],
                                 c.u[static_cast<std::size_t>(j)]);
        return s;
    }

    CurveSpec to_curve() const {
        if (bands.empty() || bands.front() != std::make_pair(0.0, 1.0))
            throw OrderingViolation("interval system must start with the unit interval");
        std::vector<double> xs, us;
        for (std::size_t j = 1; j < bands.size(); ++j) {
            xs.push_back(bands[j].first);
            us.push_back(bands[j].second);
        }
        return CurveSpec(static_cast<int>(bands.size()) - 1, std::move(xs), std::move(us));
    }
};

// Probability masses, one per band.
struct MeasureVector {
    std::vector<double> rho;

    void validate() const {
        if (rho.empty()) throw DimensionMismatch("measure vector needs at least one band");
        if (rho.size() == 1) {
            if (std::abs(rho[0] - 1.0) > 1e-9)
                throw InputParseError("a single band must carry the whole measure");
            return;
        }
        double total = 0.0;
        for (double r : rho) {
            if (!(r > 0.0) || !(r < 1.0))
                throw InputParseError("band measures must lie strictly between 0 and 1");
            total += r;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw InputParseError("band measures must sum to one");
    }
};

namespace detail {

// integral over [lo, hi] of p(t) / sqrt(|D(t)|) where lo and hi are branch
// points; the inverse-square-root endpoint factors are the quadrature weight
inline double edge_density_integral(const CurveSpec& curve, double lo, double hi,
                                    const RPoly& p, const QuadratureControl& quad) {
    std::vector<double> rest;
    for (double e : curve.branch_points())
        if (e != lo && e != hi) rest.push_back(e);
    auto f = [&](double t) {
        double prod = 1.0;
        for (double e : rest) prod *= std::abs(t - e);
        return p(t) / std::sqrt(prod);
    };
    return chebyshev_singular_integral(f, lo, hi, quad);
}

// int_lo^hi p/sqrt(|D|) where exactly one endpoint sits on the branch locus.
// Substituting t = e +- s^2 cancels the inverse square root in exact
// arithmetic (sqrt|D| = s sqrt|D/(t-e)| against dt = 2s ds), so the smooth
// remainder never divides by a rounded distance-to-branch-point.
inline double one_sided_density_integral(const CurveSpec& curve, double lo, double hi,
                                         const RPoly& p, bool singular_at_lo,
                                         const QuadratureControl& quad) {
    const double e = singular_at_lo ? lo : hi;
    auto f = [&](double s) {
        const double t = singular_at_lo ? lo + s * s : hi - s * s;
        return p(t) / std::sqrt(std::abs(curve.delta_excluding(t, e, e)));
    };
    return 2.0 * tanh_sinh_integral(f, 0.0, std::sqrt(hi - lo), quad);
}

} // namespace detail

// Monic degree-g polynomial whose density integral vanishes across every gap
// (one zero per gap, none elsewhere); its negative is the polynomial part of
// the weightless third-kind differential.
inline RPoly gap_vanishing_polynomial(const CurveSpec& curve, QuadratureControl quad = {}) {
    const int g = curve.genus;
    if (g == 0) return RPoly({1.0});
    RMat A(g, g);
    std::vector<double> rhs(static_cast<std::size_t>(g));
    for (int j = 0; j < g; ++j) {
        Interval gap = curve.gaps()[static_cast<std::size_t>(j)];
        for (int k = 0; k < g; ++k) {
            std::vector<double> mono(static_cast<std::size_t>(k) + 1, 0.0);
            mono.back() = 1.0;
            A(j, k) = detail::edge_density_integral(curve, gap.lo, gap.hi, RPoly(std::move(mono)),
                                                    quad);
        }
        std::vector<double> lead(static_cast<std::size_t>(g) + 1, 0.0);
        lead.back() = 1.0;
        rhs[static_cast<std::size_t>(j)] =
            -detail::edge_density_integral(curve, gap.lo, gap.hi, RPoly(std::move(lead)), quad);
    }
    LU<double> lu(A);
    if (lu.singular)
        throw SingularPeriodMatrix("gap moment matrix is numerically singular");
    std::vector<double> sol = lu.solve(rhs);
    sol.push_back(1.0);
    RPoly q(std::move(sol));

    for (int j = 0; j < g; ++j) {
        Interval gap = curve.gaps()[static_cast<std::size_t>(j)];
        if (sturm_count(q, gap.lo, gap.hi) != 1)
            throw RealityLost("gap polynomial must change sign exactly once per gap");
    }
    return q;
}

// Mass of every band under the equilibrium measure of the interval union.
inline MeasureVector equilibrium_measures(const CurveSpec& curve, QuadratureControl quad = {}) {
    const int g = curve.genus;
    MeasureVector out;
    out.rho.assign(static_cast<std::size_t>(g) + 1, 0.0);
    if (g == 0) {
        out.rho[0] = 1.0;
        return out;
    }
    RPoly q = gap_vanishing_polynomial(curve, quad);
    double tail = 0.0;
    for (int j = 1; j <= g; ++j) {
        double lo = curve.x[static_cast<std::size_t>(j - 1)];
        double hi = curve.u[static_cast<std::size_t>(j - 1)];
        // the polynomial keeps one sign across a band, so the absolute-value
        // integrand is smooth and equals |plain integral|
        if (sturm_count(q, lo, hi) != 0)
            throw RealityLost("gap polynomial developed a root inside a band");
        double mass = std::abs(detail::edge_density_integral(curve, lo, hi, q, quad)) / M_PI;
        out.rho[static_cast<std::size_t>(j)] = mass;
        tail += mass;
    }
    out.rho[0] = 1.0 - tail;

    double direct =
        std::abs(detail::edge_density_integral(curve, 0.0, 1.0, q, quad)) / M_PI;
    if (std::abs(direct - out.rho[0]) > 1e-8)
        throw QuadratureNotConverged("band masses do not close up to a probability measure");
    out.validate();
    return out;
}

// Handle periods of the weightless differential, as running partial sums of
// the masses; the two maps below are mutually inverse.
inline std::vector<cplx> measures_to_bperiods(const MeasureVector& m) {
    m.validate();
    const int g = static_cast<int>(m.rho.size()) - 1;
    std::vector<cplx> out(static_cast<std::size_t>(g));
    double run = 0.0;
    for (int k = 0; k < g; ++k) {
        run += m.rho[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(k)] = cplx(0.0, 2.0 * M_PI * run);
    }
    return out;
}

inline MeasureVector bperiods_to_measures(const std::vector<cplx>& b) {
    MeasureVector m;
    double prev = 0.0;
    for (const cplx& bk : b) {
        m.rho.push_back((bk.imag() - prev) / (2.0 * M_PI));
        prev = bk.imag();
    }
    m.rho.push_back(1.0 - prev / (2.0 * M_PI));
    m.validate();
    return m;
}

// A measure vector whose entries are k_j / N for one shared denominator
// N <= n_max; k says how many elementary spectral bands merged into each
// interval, and N is the period of the Jacobi matrix realizing the system.
struct RationalCertificate {
    int N = 0;
    std::vector<int> k;
};

inline std::optional<RationalCertificate> rational_measure_detect(const MeasureVector& m,
                                                                  int n_max = 64,
                                                                  double tol = 1e-8) {
    m.validate();
    const int bands = static_cast<int>(m.rho.size());
    if (n_max < bands)
        throw DimensionMismatch("denominator bound must reach the number of bands");
    for (int N = bands; N <= n_max; ++N) {
        RationalCertificate cert;
        cert.N = N;
        long long total = 0;
        bool ok = true;
        for (double r : m.rho) {
            long long kj = std::llround(r * N);
            if (kj < 1 || std::abs(r - static_cast<double>(kj) / N) >= tol) {
                ok = false;
                break;
            }
            cert.k.push_back(static_cast<int>(kj));
            total += kj;
        }
        if (ok && total == N) return cert;
    }
    return std::nullopt;
}

// Flow that moves the left band edges along a path while preserving every
// band's mass, together with the measures observed along the way.
struct EquilibriumTrajectory {
    FlowTrajectory flow;
    std::vector<MeasureVector> measures; // one per retained sample
    std::vector<double> measure_drift;   // per band, max deviation from start
};

inline EquilibriumTrajectory isoequilibrium_flow(const CurveSpec& curve,
                                                 const std::vector<std::vector<double>>& path,
                                                 double step, FlowOptions opt = {}) {
    const int g = curve.genus;
    FlowState state = make_flow_state(curve, std::vector<double>(static_cast<std::size_t>(g), 0.0),
                                      opt.quad);
    EquilibriumTrajectory out;
    out.flow = integrate_flow(state, path, step, opt);
    out.measure_drift.assign(static_cast<std::size_t>(g) + 1, 0.0);

    for (const FlowSample& s : out.flow.samples) {
        CurveSpec cs(g, s.x, s.u); // re-validates the ordering invariant
        PeriodData pd(cs, opt.quad);
        CMat M = first_order_rhs(pd, pd.third_kind(state.alpha), opt.denominator_floor);
        for (int m = 0; m < g; ++m)
            for (int i = 0; i < g; ++i)
                if (std::abs(M(m, i).imag()) > 1e-9 * (1.0 + std::abs(M(m, i))))
                    throw RealityLost("deformation field developed an imaginary part");
        for (const cplx& d : s.drift)
            if (std::abs(d.real()) > 1e-9)
                throw RealityLost("handle periods drifted off the imaginary axis");

        MeasureVector mv{pd.band_weights};
        mv.validate();
        out.measures.push_back(std::move(mv));
    }
    for (std::size_t n = 0; n < out.measures.size(); ++n)
        for (std::size_t j = 0; j < out.measures[n].rho.size(); ++j)
            out.measure_drift[j] = std::max(
                out.measure_drift[j],
                std::abs(out.measures[n].rho[j] - out.measures[0].rho[j]));
    return out;
}

} // namespace todakit
