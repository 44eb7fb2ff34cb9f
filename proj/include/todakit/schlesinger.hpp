#pragma once

// Triangular residue matrices attached to the branch points, and the
// constrained deformation system they satisfy along isoperiodic families.
//
// Each branch point a carries the upper triangular traceless matrix
//
//     A_a = [ -1/4   (t/4) Omega(P_a) phi(P_a) ]
//           [  0      1/4                      ]
//
// whose corner entries are residues of (t/2) Omega du / (phi v^2) -- a
// differential with simple poles exactly over the branch locus, so the
// corners sum to zero and the full matrices sum to diag(-(g+1)/2, (g+1)/2).
// Along a deformation that moves x_i while keeping the periods of Omega
// fixed, the matrices obey a Schlesinger-type system whose right-hand sides
// are commutators weighted by 1/(position differences), with the dependent
// edges entering through du_k/dx_i.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "isoflow.hpp"
#include "linalg.hpp"
#include "periods.hpp"

namespace todakit {

// The 2g+2 branch labels in the fixed order 0, 1, x_1, u_1, ..., x_g, u_g.
inline std::vector<BranchId> branch_labels(int genus) {
    std::vector<BranchId> ids{BranchId::zero(), BranchId::one()};
    for (int j = 1; j <= genus; ++j) {
        ids.push_back(BranchId::x(j));
        ids.push_back(BranchId::u(j));
    }
    return ids;
}

struct ResidueMatrixSet {
    std::vector<BranchId> labels; // aligned with `matrices`
    std::vector<CMat> matrices;   // 2x2 upper triangular, diagonal (-1/4, 1/4)
    cplx t_param{};

    const CMat& at(BranchId id) const {
        for (std::size_t j = 0; j < labels.size(); ++j)
            if (labels[j].kind == id.kind && labels[j].index == id.index) return matrices[j];
        throw DimensionMismatch("residue matrix set: unknown branch label");
    }
};

inline ResidueMatrixSet build_residue_matrices(const CurveSpec& curve,
                                               const std::vector<double>& alpha, cplx t_param,
                                               QuadratureControl quad = {}) {
    PeriodData pd(curve, quad);
    ThirdKind tk = pd.third_kind(alpha);
    ResidueMatrixSet out;
    out.t_param = t_param;
    out.labels = branch_labels(curve.genus);
    for (BranchId id : out.labels) {
        CMat A(2, 2);
        A(0, 0) = cplx(-0.25, 0.0);
        A(0, 1) = 0.25 * t_param * third_kind_at_branch(pd, tk, id) * curve.phi_at_branch(id);
        A(1, 0) = cplx(0.0, 0.0);
        A(1, 1) = cplx(0.25, 0.0);
        out.matrices.push_back(A);
    }
    return out;
}

inline bool sum_rule_check(const ResidueMatrixSet& set, int genus) {
    CMat sum(2, 2);
    for (const CMat& A : set.matrices)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) sum(r, c) += A(r, c);
    const double half = 0.5 * (genus + 1);
    double worst = std::max(std::abs(sum(0, 0) + half), std::abs(sum(1, 1) - half));
    worst = std::max({worst, std::abs(sum(0, 1)), std::abs(sum(1, 0))});
    return worst < 1e-10;
}

namespace detail {

inline CMat mat2_commutator(const CMat& A, const CMat& B) {
    CMat C(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int k = 0; k < 2; ++k) C(r, c) += A(r, k) * B(k, c) - B(r, k) * A(k, c);
    return C;
}

inline void mat2_axpy(CMat& acc, cplx w, const CMat& M) {
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) acc(r, c) += w * M(r, c);
}

inline double mat2_max_abs(const CMat& M) {
    double worst = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) worst = std::max(worst, std::abs(M(r, c)));
    return worst;
}

} // namespace detail

struct SchlesingerReport {
    double max_residual = 0.0; // worst entry of dA/dx_i minus the commutator sides
    double sum_drift = 0.0;    // worst entry of d/dx_i (sum of all matrices)
    double h = 0.0;
};

// Differentiate every residue matrix along the isoperiodic family (x moved by
// +-h e_i with u re-solved by the period corrector, so the check is
// independent of the flow integrator) and compare against the commutator
// right-hand sides.  The closing equation for A_{x_i} is verified in its
// explicit form, and the drift of the matrix sum -- the alternative closing
// form -- is reported separately; both vanish to the same order.
inline SchlesingerReport constrained_residual(const CurveSpec& curve,
                                              const std::vector<double>& alpha, cplx t_param,
                                              double h, QuadratureControl quad = {}) {
    const int g = curve.genus;
    PeriodData pd(curve, quad);
    ThirdKind tk = pd.third_kind(alpha);
    const CMat du = first_order_rhs(pd, tk); // (m,i) = du_m/dx_i
    const ResidueMatrixSet base = build_residue_matrices(curve, alpha, t_param, quad);
    const std::vector<BranchId> labels = branch_labels(g);

    auto value_of = [&](BranchId id) { return curve.branch_value(id); };

    SchlesingerReport rep;
    rep.h = h;
    for (int i = 1; i <= g; ++i) {
        std::vector<double> xp = curve.x, xm = curve.x;
        xp[static_cast<std::size_t>(i - 1)] += h;
        xm[static_cast<std::size_t>(i - 1)] -= h;
        std::vector<double> up = newton_period_corrector(curve, alpha, tk.b_periods, xp, quad, 1e-12);
        std::vector<double> um = newton_period_corrector(curve, alpha, tk.b_periods, xm, quad, 1e-12);
        ResidueMatrixSet plus = build_residue_matrices(CurveSpec(g, xp, up), alpha, t_param, quad);
        ResidueMatrixSet minus = build_residue_matrices(CurveSpec(g, xm, um), alpha, t_param, quad);

        CMat sum_diff(2, 2);
        const double xi = curve.x[static_cast<std::size_t>(i - 1)];
        const CMat& Axi = base.at(BranchId::x(i));

        for (std::size_t j = 0; j < labels.size(); ++j) {
            const BranchId aj = labels[j];
            const double a = value_of(aj);
            const CMat& Aj = base.matrices[j];

            CMat lhs(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    lhs(r, c) = (plus.matrices[j](r, c) - minus.matrices[j](r, c)) / (2.0 * h);
            detail::mat2_axpy(sum_diff, cplx(1.0, 0.0), lhs);

            CMat rhs(2, 2);
            if (aj.kind == BranchKind::X && aj.index == i) {
                // closing equation: minus the sum of the x_i commutators plus
                // the dependent-edge chain terms
                for (std::size_t l = 0; l < labels.size(); ++l) {
                    if (l == j) continue;
                    detail::mat2_axpy(rhs, -1.0 / cplx(xi - value_of(labels[l]), 0.0),
                                      detail::mat2_commutator(Axi, base.matrices[l]));
                }
                for (int k = 1; k <= g; ++k)
                    detail::mat2_axpy(
                        rhs, du(k - 1, i - 1) / cplx(curve.u[static_cast<std::size_t>(k - 1)] - xi, 0.0),
                        detail::mat2_commutator(base.at(BranchId::u(k)), Axi));
            } else if (aj.kind == BranchKind::U) {
                const int m = aj.index;
                detail::mat2_axpy(rhs, 1.0 / cplx(xi - a, 0.0), detail::mat2_commutator(Axi, Aj));
                for (int k = 1; k <= g; ++k) {
                    if (k == m) continue;
                    detail::mat2_axpy(
                        rhs, du(k - 1, i - 1) / cplx(curve.u[static_cast<std::size_t>(k - 1)] - a, 0.0),
                        detail::mat2_commutator(base.at(BranchId::u(k)), Aj));
                }
                for (std::size_t l = 0; l < labels.size(); ++l) {
                    if (l == j) continue;
                    detail::mat2_axpy(rhs,
                                      -du(m - 1, i - 1) / cplx(value_of(labels[l]) - a, 0.0),
                                      detail::mat2_commutator(base.matrices[l], Aj));
                }
            } else {
                detail::mat2_axpy(rhs, 1.0 / cplx(xi - a, 0.0), detail::mat2_commutator(Axi, Aj));
                for (int k = 1; k <= g; ++k)
                    detail::mat2_axpy(
                        rhs, du(k - 1, i - 1) / cplx(curve.u[static_cast<std::size_t>(k - 1)] - a, 0.0),
                        detail::mat2_commutator(base.at(BranchId::u(k)), Aj));
            }

            CMat diff(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) diff(r, c) = lhs(r, c) - rhs(r, c);
            rep.max_residual = std::max(rep.max_residual, detail::mat2_max_abs(diff));
        }
        rep.sum_drift = std::max(rep.sum_drift, detail::mat2_max_abs(sum_diff));
    }
    return rep;
}

} // namespace todakit
