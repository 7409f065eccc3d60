// wilczek_zee.hpp — non-Abelian adiabatic holonomy of degenerate levels:
// smoothly aligned eigenspace bases along a loop, the discrete path-ordered
// holonomy (products of unitary polar factors), and the direct degenerate
// adiabatic evolution used as its oracle.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "phaselab/errors.hpp"
#include "phaselab/evolution.hpp"
#include "phaselab/quantum.hpp"
#include "phaselab/transport.hpp"

namespace phaselab {

struct DegenerateFrameField {
    HamiltonianFamily family;
    ParameterPath path;
    std::vector<Mat> bases;        // per-sample orthonormal block basis (columns)
    std::vector<double> energies;  // block eigenvalue per sample (cluster mean)
    int block_index = 0;           // index into the ascending distinct-eigenvalue clusters
    int block_dim = 0;

    std::size_t samples() const { return bases.size(); }
};

struct HolonomyMatrix {
    Mat matrix;          // unitary d x d
    int block_index = 0;
    double leakage = 0.0;  // oracle route only: || I - D^H D || before polar projection

    int dim() const { return static_cast<int>(matrix.rows()); }
};

namespace detail {

struct BlockPick {
    std::vector<int> indices;
    double energy;
};

inline BlockPick pick_block(const SpectralFrame& f, int block_index, std::size_t sample) {
    const auto& blocks = f.degeneracy_blocks;
    if (block_index < 0 || block_index >= static_cast<int>(blocks.size()))
        throw degeneracy_splitting_error(
            "wilczek_zee: block index " + std::to_string(block_index) +
                " not present at sample " + std::to_string(sample),
            static_cast<long>(sample));
    BlockPick pick;
    pick.indices = blocks[block_index];
    double e = 0.0;
    for (int i : pick.indices) e += f.eigenvalues[i];
    pick.energy = e / static_cast<double>(pick.indices.size());
    return pick;
}

}  // namespace detail

// Per-sample orthonormal bases of the selected degenerate block, smoothly
// aligned: each sample's basis is rotated by the unitary polar factor of its
// overlap with the previous aligned basis (non-Abelian parallel transport).
inline DegenerateFrameField build_degenerate_frames(const HamiltonianFamily& family,
                                                    const ParameterPath& path, int block_index) {
    DegenerateFrameField ff;
    ff.family = family;
    ff.path = path;
    ff.block_index = block_index;
    ff.bases.reserve(path.samples());
    ff.energies.reserve(path.samples());

    std::size_t cluster_count = 0;
    for (std::size_t k = 0; k < path.samples(); ++k) {
        SpectralFrame f = eig_hermitian(family(path.points[k]), path.points[k]);
        if (k == 0) cluster_count = f.degeneracy_blocks.size();
        detail::BlockPick pick = detail::pick_block(f, block_index, k);
        if (k == 0) ff.block_dim = static_cast<int>(pick.indices.size());
        if (f.degeneracy_blocks.size() != cluster_count ||
            static_cast<int>(pick.indices.size()) != ff.block_dim)
            throw degeneracy_splitting_error(
                "build_degenerate_frames: block dimension changed at sample " +
                    std::to_string(k),
                static_cast<long>(k));
        Mat basis(family.dim, ff.block_dim);
        for (int i = 0; i < ff.block_dim; ++i) basis.col(i) = f.eigenvectors.col(pick.indices[i]);
        if (k > 0) {
            Mat overlap = ff.bases.back().adjoint() * basis;
            if (smallest_singular_value(overlap) < 0.5)
                throw undersampled_loop_error(
                    "build_degenerate_frames: subspace overlap too small at sample " +
                    std::to_string(k));
            Eigen::JacobiSVD<Mat> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
            basis = basis * (svd.matrixV() * svd.matrixU().adjoint());
        }
        ff.bases.push_back(std::move(basis));
        ff.energies.push_back(pick.energy);
    }
    return ff;
}

// Discrete Wilczek-Zee holonomy: transport the sample-0 basis around the loop
// through the unitary polar factors of consecutive overlap matrices and read
// the result off against the sample-0 basis. Exactly covariant: rotating the
// sample-0 basis by Omega conjugates D by Omega; rotating any intermediate
// sample's raw basis leaves D unchanged.
inline HolonomyMatrix wz_holonomy_discrete(const DegenerateFrameField& ff) {
    if (!ff.path.closed) throw contract_error("wz_holonomy_discrete: path is not closed");
    const Mat& b0 = ff.bases.front();
    Mat bt = b0;
    for (std::size_t k = 1; k < ff.samples(); ++k) {
        Mat overlap = bt.adjoint() * ff.bases[k];
        if (smallest_singular_value(overlap) < 1e-3)
            throw undersampled_loop_error(
                "wz_holonomy_discrete: singular overlap at sample " + std::to_string(k));
        Eigen::JacobiSVD<Mat> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
        bt = ff.bases[k] * (svd.matrixV() * svd.matrixU().adjoint());
    }
    HolonomyMatrix h;
    h.block_index = ff.block_index;
    h.matrix = polar_unitary(b0.adjoint() * bt);
    return h;
}

// Oracle route (direct degenerate adiabatic evolution): evolve every basis
// vector of the block over sweep_time, strip the common dynamical factor
// accumulated from the block eigenvalue at the step midpoints, project onto
// the initial basis. Converges to wz_holonomy_discrete as sweep_time grows.
inline HolonomyMatrix wz_holonomy_adiabatic_oracle(const HamiltonianFamily& family,
                                                   const ParameterPath& path, int block_index,
                                                   double sweep_time, int steps,
                                                   double leakage_tol = 0.05) {
    if (!path.closed)
        throw contract_error("wz_holonomy_adiabatic_oracle: path is not closed");
    if (steps < 1) throw contract_error("wz_holonomy_adiabatic_oracle: steps must be >= 1");

    ParameterPath timed = path.retimed(sweep_time);
    SpectralFrame f0 = eig_hermitian(family(timed.points.front()));
    detail::BlockPick pick0 = detail::pick_block(f0, block_index, 0);
    const int d = static_cast<int>(pick0.indices.size());
    Mat b0(family.dim, d);
    for (int i = 0; i < d; ++i) b0.col(i) = f0.eigenvectors.col(pick0.indices[i]);

    Mat psi = b0;
    const double t0 = timed.start_time();
    const double dt = timed.duration() / steps;
    double dyn = 0.0;
    for (int k = 0; k < steps; ++k) {
        Param p = timed.at(t0 + (k + 0.5) * dt);
        Mat h = family(p);
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("wz_holonomy_adiabatic_oracle: eigensolver failed");
        SpectralFrame mid;
        mid.eigenvalues = es.eigenvalues();
        mid.degeneracy_blocks = degeneracy_clusters(mid.eigenvalues);
        dyn += detail::pick_block(mid, block_index, static_cast<std::size_t>(k)).energy * dt;
        Vec phases(mid.eigenvalues.size());
        for (Eigen::Index j = 0; j < mid.eigenvalues.size(); ++j)
            phases[j] = std::exp(cplx(0.0, -mid.eigenvalues[j] * dt));
        psi = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * psi;
    }

    Mat d_raw = (b0.adjoint() * psi) * std::exp(cplx(0.0, dyn));
    HolonomyMatrix h;
    h.block_index = block_index;
    h.leakage = operator_norm(Mat::Identity(d, d) - d_raw.adjoint() * d_raw);
    if (h.leakage > leakage_tol)
        throw nonadiabatic_leakage_error(
            "wz_holonomy_adiabatic_oracle: leakage out of the block (defect " +
                std::to_string(h.leakage) + ")",
            h.leakage);
    h.matrix = polar_unitary(d_raw);
    return h;
}

}  // namespace phaselab
