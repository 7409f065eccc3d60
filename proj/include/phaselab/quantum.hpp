// quantum.hpp — complex vectors and operators on small dense Hilbert spaces:
// inner products, the Pancharatnam connection, spin operators, Hermitian
// eigensolves with deterministic gauge, ray equivalence.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "phaselab/angles.hpp"
#include "phaselab/errors.hpp"

namespace phaselab {

using cplx = std::complex<double>;
using Vec  = Eigen::VectorXcd;
using Mat  = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// Default tolerances (absolute).
inline constexpr double hermitian_tol     = 1e-12;  // entrywise H vs H†
inline constexpr double unitary_tol       = 1e-10;  // entrywise U†U vs 1
inline constexpr double ray_tol           = 1e-9;   // 1 - |<a|b>| for ray equality
inline constexpr double orthogonality_tol = 1e-9;   // |<a|b>| below which ph<a|b> is undefined

// arg z reduced to (-pi, pi]; arg of a positive real is exactly 0.
inline double principal_arg(cplx z) {
    double a = std::atan2(z.imag(), z.real());
    if (a <= -pi) a += two_pi;
    return a;
}

inline void require_square(const Mat& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw contract_error(std::string(who) + ": operator must be square and non-empty");
}

inline bool is_hermitian(const Mat& h, double tol = hermitian_tol) {
    if (h.rows() != h.cols()) return false;
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const Mat& u, double tol = unitary_tol) {
    if (u.rows() != u.cols()) return false;
    Mat g = u.adjoint() * u;
    g -= Mat::Identity(u.rows(), u.cols());
    return g.cwiseAbs().maxCoeff() <= tol;
}

inline void require_hermitian(const Mat& h, const char* who, double tol = hermitian_tol) {
    require_square(h, who);
    if (!is_hermitian(h, tol))
        throw contract_error(std::string(who) + ": operator is not Hermitian within tolerance");
}

inline void require_unitary(const Mat& u, const char* who, double tol = unitary_tol) {
    require_square(u, who);
    if (!is_unitary(u, tol))
        throw contract_error(std::string(who) + ": operator is not unitary within tolerance");
}

// Normalize to unit Euclidean norm.
inline Vec normalized(const Vec& a) {
    double n = a.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw contract_error("normalized: zero or non-finite state vector");
    return a / n;
}

// <a|b> with conjugation on the first argument.
inline cplx inner_product(const Vec& a, const Vec& b) {
    if (a.size() != b.size() || a.size() == 0)
        throw contract_error("inner_product: dimension mismatch");
    return a.dot(b);  // Eigen conjugates the left factor
}

// Pancharatnam phase difference ph<a|b>, in (-pi, pi].
// Undefined (throws) when the states are orthogonal within ortho_tol.
inline double pancharatnam_phase(const Vec& a, const Vec& b,
                                 double ortho_tol = orthogonality_tol) {
    cplx o = inner_product(a, b);
    if (std::abs(o) <= ortho_tol)
        throw undefined_phase_error(
            "pancharatnam_phase: states are orthogonal, phase difference undefined");
    return principal_arg(o);
}

// Two states represent the same ray iff |<a|b>| = 1 after normalization.
inline bool rays_equal(const Vec& a, const Vec& b, double tol = ray_tol) {
    if (a.size() != b.size() || a.size() == 0)
        throw contract_error("rays_equal: dimension mismatch");
    return std::abs(inner_product(normalized(a), normalized(b))) >= 1.0 - tol;
}

// Deterministic single-point gauge: rotate the global phase so the
// largest-magnitude component (lowest index on ties) is real positive.
inline Vec canonical_gauge(const Vec& v) {
    Eigen::Index best = 0;
    double best_mag = std::norm(v[0]);
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        double m = std::norm(v[i]);
        if (m > best_mag) { best_mag = m; best = i; }
    }
    cplx c = v[best];
    double mag = std::sqrt(std::norm(c));
    if (!(mag > 0.0))
        throw contract_error("canonical_gauge: zero state vector");
    return v * (std::conj(c) / mag);
}

// ----------------------------- spin operators --------------------------------

struct SpinOperators {
    double s = 0.0;
    Mat sx, sy, sz;
    int dim() const { return static_cast<int>(sz.rows()); }
};

// Standard angular-momentum representation of dimension 2s+1.
// Sz is diagonal with entries descending s, s-1, ..., -s; Sx, Sy come from
// the ladder operators.
inline SpinOperators spin_operators(double s) {
    double two_s = 2.0 * s;
    if (!(s >= 0.0) || std::abs(two_s - std::round(two_s)) > 1e-9)
        throw contract_error("spin_operators: s must be a nonnegative half-integer");
    int dim = static_cast<int>(std::lround(two_s)) + 1;

    Mat sz = Mat::Zero(dim, dim);
    Mat sp = Mat::Zero(dim, dim);  // raising operator S+
    for (int i = 0; i < dim; ++i) {
        double m = s - i;
        sz(i, i) = m;
        if (i >= 1) sp(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
    Mat sm = sp.adjoint();
    SpinOperators ops;
    ops.s  = s;
    ops.sz = sz;
    ops.sx = (sp + sm) / 2.0;
    ops.sy = (sp - sm) / cplx(0.0, 2.0);
    return ops;
}

// --------------------------- Hermitian eigensolve -----------------------------

struct SpectralFrame {
    RVec parameter;                                // parameter point R (may be empty)
    RVec eigenvalues;                              // ascending
    Mat  eigenvectors;                             // orthonormal columns, canonical gauge
    std::vector<std::vector<int>> degeneracy_blocks;  // index clusters by eigenvalue

    int dim() const { return static_cast<int>(eigenvalues.size()); }
    Vec vector(int k) const { return eigenvectors.col(k); }
};

// Cluster ascending eigenvalues: i and i+1 share a block iff their gap is
// below max(1e-9, 1e-9 * spectral range).
inline std::vector<std::vector<int>> degeneracy_clusters(const RVec& evals) {
    double range = evals[evals.size() - 1] - evals[0];
    double tol = std::max(1e-9, 1e-9 * range);
    std::vector<std::vector<int>> blocks;
    blocks.push_back({0});
    for (int i = 1; i < evals.size(); ++i) {
        if (evals[i] - evals[i - 1] <= tol) blocks.back().push_back(i);
        else blocks.push_back({i});
    }
    return blocks;
}

inline SpectralFrame eig_hermitian(const Mat& h, RVec parameter = RVec()) {
    require_hermitian(h, "eig_hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
    SpectralFrame f;
    f.parameter    = std::move(parameter);
    f.eigenvalues  = solver.eigenvalues();
    f.eigenvectors = solver.eigenvectors();
    for (Eigen::Index k = 0; k < f.eigenvectors.cols(); ++k)
        f.eigenvectors.col(k) = canonical_gauge(f.eigenvectors.col(k));
    f.degeneracy_blocks = degeneracy_clusters(f.eigenvalues);
    return f;
}

}  // namespace phaselab
