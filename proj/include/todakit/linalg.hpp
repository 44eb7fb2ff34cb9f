#pragma once

// Minimal dense linear algebra for the g x g systems that show up here
// (g <= ~4): complex LU with partial pivoting, solves, determinant-free
// condition estimate, and a Jacobi eigensolver for small symmetric real
// matrices.  Nothing clever -- the matrices are tiny and well scaled.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace todakit {

template <class T>
struct Mat {
    int n = 0, m = 0;
    std::vector<T> a; // row major

    Mat() = default;
    Mat(int rows, int cols) : n(rows), m(cols), a(static_cast<std::size_t>(rows) * cols, T{}) {}

    T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * m + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }
};

using CMat = Mat<std::complex<double>>;
using RMat = Mat<double>;

template <class T>
double mat_norm_inf(const Mat<T>& A) {
    double best = 0.0;
    for (int i = 0; i < A.n; ++i) {
        double row = 0.0;
        for (int j = 0; j < A.m; ++j) row += std::abs(A(i, j));
        best = std::max(best, row);
    }
    return best;
}

// LU factorization with partial pivoting, kept alongside the permutation so
// one factorization serves many right-hand sides.
template <class T>
struct LU {
    Mat<T> lu;
    std::vector<int> perm;
    bool singular = false;

    explicit LU(Mat<T> A) : lu(std::move(A)), perm(static_cast<std::size_t>(lu.n)) {
        const int n = lu.n;
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int k = 0; k < n; ++k) {
            int piv = k;
            double best = std::abs(lu(k, k));
            for (int i = k + 1; i < n; ++i)
                if (std::abs(lu(i, k)) > best) { best = std::abs(lu(i, k)); piv = i; }
            if (best == 0.0) { singular = true; return; }
            if (piv != k) {
                for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
                std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
            }
            for (int i = k + 1; i < n; ++i) {
                lu(i, k) = lu(i, k) / lu(k, k);
                for (int j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
            }
        }
    }

    std::vector<T> solve(const std::vector<T>& b) const {
        const int n = lu.n;
        std::vector<T> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= lu(i, j) * x[static_cast<std::size_t>(j)];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) x[static_cast<std::size_t>(i)] -= lu(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] /= lu(i, i);
        }
        return x;
    }
};

template <class T>
Mat<T> mat_inverse(const Mat<T>& A, const LU<T>& f) {
    const int n = A.n;
    Mat<T> inv(n, n);
    std::vector<T> e(static_cast<std::size_t>(n), T{});
    for (int j = 0; j < n; ++j) {
        e[static_cast<std::size_t>(j)] = T{1};
        auto col = f.solve(e);
        e[static_cast<std::size_t>(j)] = T{};
        for (int i = 0; i < n; ++i) inv(i, j) = col[static_cast<std::size_t>(i)];
    }
    return inv;
}

// Infinity-norm condition number via the explicit inverse (fine at this size).
template <class T>
double cond_inf(const Mat<T>& A) {
    if (A.n == 0) return 1.0;
    LU<T> f(A);
    if (f.singular) return std::numeric_limits<double>::infinity();
    return mat_norm_inf(A) * mat_norm_inf(mat_inverse(A, f));
}

// Smallest eigenvalue of a symmetric real matrix by cyclic Jacobi sweeps.
inline double sym_eig_min(RMat A) {
    const int n = A.n;
    if (n == 1) return A(0, 0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < 1e-18) continue;
                double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
            }
    }
    double mn = A(0, 0);
    for (int i = 1; i < n; ++i) mn = std::min(mn, A(i, i));
    return mn;
}

} // namespace todakit
