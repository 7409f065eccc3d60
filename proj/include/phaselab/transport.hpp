// transport.hpp — discrete parallel-transport primitives shared by the
// phase-extraction modules: closed-chain Pancharatnam products and their
// winding-resolved accumulation.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "phaselab/angles.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/quantum.hpp"

namespace phaselab {

// Overlaps <c_k|c_{k+1}> for k < K plus the closure overlap <c_K|c_0>.
inline std::vector<cplx> chain_overlaps(const std::vector<Vec>& chain) {
    const std::size_t n = chain.size();
    if (n < 2) throw contract_error("chain_overlaps: need at least 2 states");
    std::vector<cplx> ov;
    ov.reserve(n);
    for (std::size_t k = 0; k + 1 < n; ++k) ov.push_back(inner_product(chain[k], chain[k + 1]));
    ov.push_back(inner_product(chain.back(), chain.front()));
    return ov;
}

inline double min_abs(const std::vector<cplx>& zs) {
    double m = std::abs(zs.front());
    for (const cplx& z : zs) m = std::min(m, std::abs(z));
    return m;
}

// Principal value of -arg(prod_k overlaps_k): the gauge-invariant closed-chain
// geometric phase, reduced to (-pi, pi]. The running product is renormalized
// to unit magnitude so long chains cannot underflow.
inline double chain_phase_principal(const std::vector<cplx>& overlaps) {
    cplx prod(1.0, 0.0);
    for (const cplx& o : overlaps) {
        prod *= o;
        double m = std::abs(prod);
        if (!(m > 0.0)) throw undersampled_loop_error("chain_phase: vanishing overlap product");
        prod /= m;
    }
    return -principal_arg(prod);
}

// Winding-resolved closed-chain phase: the chain is fanned against a fixed
// apex state, and each geodesic-triangle invariant
//   B_k = <a|c_k><c_k|c_next><c_next|a>
// contributes its principal argument. Every B_k is invariant under per-sample
// rephasing of the chain, so the accumulated value (winding included) is
// exactly gauge-invariant. Returns nullopt when some |<a|c_k>| falls below
// min_apex_overlap, where the fan loses its branch resolution.
inline std::optional<double> chain_phase_accumulated(const std::vector<Vec>& chain,
                                                     const Vec& apex,
                                                     double min_apex_overlap = 0.1) {
    const std::size_t n = chain.size();
    std::vector<cplx> a(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = inner_product(apex, chain[k]);
        if (std::abs(a[k]) < min_apex_overlap) return std::nullopt;
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t next = (k + 1) % n;
        cplx b = a[k] * inner_product(chain[k], chain[next]) * std::conj(a[next]);
        acc += principal_arg(b);
    }
    return -acc;
}

// Nearest-unitary (polar) factor of a square complex matrix via SVD.
inline Mat polar_unitary(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline double smallest_singular_value(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

inline double operator_norm(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

}  // namespace phaselab
