// berry.hpp — gauge-fixed instantaneous eigenframes along parameter loops,
// the discrete (Pancharatnam-product) and connection-quadrature Berry phases,
// the adiabatic-evolution route, and the per-level geometric-angle fit.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "phaselab/angles.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/evolution.hpp"
#include "phaselab/quantum.hpp"
#include "phaselab/transport.hpp"

namespace phaselab {

enum class GaugeRule {
    parallel_transport,  // consecutive same-level overlaps made real positive
    spectral             // per-point canonical gauge from eig_hermitian
};

inline const char* gauge_name(GaugeRule g) {
    return g == GaugeRule::parallel_transport ? "parallel-transport" : "spectral";
}

// Instantaneous eigenframes at every path sample, level-matched between
// consecutive samples by maximal overlap.
struct FrameField {
    HamiltonianFamily family;
    ParameterPath path;
    std::vector<RVec> eigenvalues;  // level order (matched), per sample
    std::vector<Mat> vectors;       // columns indexed by level, per sample
    GaugeRule gauge = GaugeRule::parallel_transport;

    std::size_t samples() const { return vectors.size(); }
    int dim() const { return static_cast<int>(vectors.front().cols()); }

    std::vector<Vec> level_chain(int level) const {
        std::vector<Vec> chain;
        chain.reserve(samples());
        for (const Mat& v : vectors) chain.push_back(v.col(level));
        return chain;
    }
};

enum class BerryMethod { discrete_product, connection_quadrature, dynamic_subtraction };

struct BerryPhaseResult {
    int level = 0;
    double phase = 0.0;  // accumulated; principal value is wrap_angle(phase)
    long winding = 0;
    BerryMethod method = BerryMethod::discrete_product;
    bool winding_resolved = true;  // false when only the principal value is certified
};

namespace detail {

// Greedy maximal-overlap level assignment between consecutive eigenframes.
inline std::vector<int> match_levels(const Mat& prev, const Mat& cur, std::size_t sample) {
    const int d = static_cast<int>(prev.cols());
    Mat o = prev.adjoint() * cur;
    struct Entry { double mag; int i, j; };
    std::vector<Entry> entries;
    entries.reserve(d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) entries.push_back({std::abs(o(i, j)), i, j});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.mag > b.mag; });
    std::vector<int> perm(d, -1);
    std::vector<bool> used(d, false);
    int assigned = 0;
    for (const Entry& e : entries) {
        if (perm[e.i] >= 0 || used[e.j]) continue;
        if (e.mag < 0.1)
            throw undersampled_loop_error(
                "build_frames: level matching lost track at sample " + std::to_string(sample) +
                " (best overlap below 0.1)");
        perm[e.i] = e.j;
        used[e.j] = true;
        if (++assigned == d) break;
    }
    return perm;
}

}  // namespace detail

// Eigenframes along the path with maximal-overlap level continuation and the
// requested gauge rule. Fails with a degeneracy error naming the sample if
// any level clusters (use the wilczek-zee module for degenerate blocks).
inline FrameField build_frames(const HamiltonianFamily& family, const ParameterPath& path,
                               GaugeRule gauge = GaugeRule::parallel_transport) {
    FrameField ff;
    ff.family = family;
    ff.path = path;
    ff.gauge = gauge;
    ff.eigenvalues.reserve(path.samples());
    ff.vectors.reserve(path.samples());

    for (std::size_t k = 0; k < path.samples(); ++k) {
        SpectralFrame f = eig_hermitian(family(path.points[k]), path.points[k]);
        for (const auto& block : f.degeneracy_blocks)
            if (block.size() > 1)
                throw degeneracy_error(
                    "build_frames: degenerate level encountered at sample " + std::to_string(k),
                    static_cast<long>(k));
        RVec evals = f.eigenvalues;
        Mat vecs = f.eigenvectors;
        if (k > 0) {
            std::vector<int> perm = detail::match_levels(ff.vectors.back(), vecs, k);
            RVec evals_m(evals.size());
            Mat vecs_m(vecs.rows(), vecs.cols());
            for (int i = 0; i < static_cast<int>(perm.size()); ++i) {
                evals_m[i] = evals[perm[i]];
                vecs_m.col(i) = vecs.col(perm[i]);
            }
            evals = std::move(evals_m);
            vecs = std::move(vecs_m);
            if (gauge == GaugeRule::parallel_transport) {
                for (int i = 0; i < vecs.cols(); ++i) {
                    cplx o = inner_product(ff.vectors.back().col(i), vecs.col(i));
                    vecs.col(i) *= std::conj(o) / std::abs(o);
                }
            }
        }
        ff.eigenvalues.push_back(std::move(evals));
        ff.vectors.push_back(std::move(vecs));
    }
    return ff;
}

namespace detail {

// Reference state for winding resolution: the same level's eigenvector at a
// parameter point well inside the loop (oriented edge-normal sum, then the
// sample mean). Returns nullopt when no candidate keeps a safe overlap with
// the whole chain.
inline std::optional<Vec> level_apex(const FrameField& ff, int level,
                                     const std::vector<Vec>& chain) {
    std::vector<Param> candidates;
    const auto& pts = ff.path.points;
    double mean_radius = 0.0;
    for (const Param& p : pts) mean_radius += p.norm();
    mean_radius /= static_cast<double>(pts.size());

    if (pts.front().size() == 3 && mean_radius > 1e-12) {
        Eigen::Vector3d cross_sum = Eigen::Vector3d::Zero();
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            Eigen::Vector3d a(pts[k][0], pts[k][1], pts[k][2]);
            Eigen::Vector3d b(pts[k + 1][0], pts[k + 1][1], pts[k + 1][2]);
            cross_sum += a.cross(b);
        }
        if (cross_sum.norm() > 1e-12) {
            Eigen::Vector3d dir = cross_sum.normalized() * mean_radius;
            Param p(3);
            p << dir.x(), dir.y(), dir.z();
            candidates.push_back(p);
        }
    }
    Param mean = pts.front();
    for (std::size_t k = 1; k < pts.size(); ++k) mean += pts[k];
    mean /= static_cast<double>(pts.size());
    if (mean.norm() > 1e-12) {
        candidates.push_back(mean / mean.norm() * mean_radius);
        candidates.push_back(mean);
    }

    for (const Param& p : candidates) {
        SpectralFrame f;
        try {
            f = eig_hermitian(ff.family(p), p);
        } catch (const std::exception&) {
            continue;
        }
        bool isolated = true;
        for (const auto& block : f.degeneracy_blocks)
            if (block.size() > 1 &&
                std::find(block.begin(), block.end(), level) != block.end())
                isolated = false;
        if (!isolated) continue;
        Vec apex = f.vector(level);
        double clearance = 2.0;
        for (const Vec& c : chain) clearance = std::min(clearance, std::abs(inner_product(apex, c)));
        if (clearance >= 0.1) return apex;
    }
    return std::nullopt;
}

}  // namespace detail

// Discrete gauge-invariant Berry phase: -arg prod_k <n(t_k)|n(t_{k+1})> with
// the closure overlap taken against the sample-0 eigenvector. The winding is
// resolved by fanning the chain against the level's eigenvector at an
// interior reference parameter; when no such reference exists only the
// principal value is reported.
inline BerryPhaseResult berry_phase_discrete(const FrameField& ff, int level) {
    if (!ff.path.closed)
        throw contract_error("berry_phase_discrete: path is not closed");
    if (level < 0 || level >= ff.dim())
        throw contract_error("berry_phase_discrete: level out of range");

    std::vector<Vec> chain = ff.level_chain(level);
    std::vector<cplx> overlaps = chain_overlaps(chain);
    if (min_abs(overlaps) < 0.1)
        throw undersampled_loop_error(
            "berry_phase_discrete: consecutive overlap below 0.1, refine the loop sampling");

    BerryPhaseResult r;
    r.level = level;
    r.method = BerryMethod::discrete_product;
    std::optional<Vec> apex = detail::level_apex(ff, level, chain);
    std::optional<double> acc;
    if (apex) acc = chain_phase_accumulated(chain, *apex);
    if (acc) {
        r.phase = *acc;
        r.winding_resolved = true;
    } else {
        r.phase = chain_phase_principal(overlaps);
        r.winding_resolved = false;
    }
    r.winding = winding_of(r.phase);
    return r;
}

// Loop quadrature of the Berry connection <n|i d/dk|n> by centered finite
// differences, in the single-valued gauge that holds the globally
// best-conditioned vector component real positive.
inline BerryPhaseResult berry_phase_connection(const FrameField& ff, int level) {
    if (!ff.path.closed)
        throw contract_error("berry_phase_connection: path is not closed");
    if (level < 0 || level >= ff.dim())
        throw contract_error("berry_phase_connection: level out of range");

    std::vector<Vec> chain = ff.level_chain(level);
    chain.pop_back();  // closure duplicate; indices are periodic below
    const std::size_t n = chain.size();

    // Component with the largest worst-case magnitude over the loop.
    const int d = static_cast<int>(chain.front().size());
    int best_j = -1;
    double best_min = 0.0;
    for (int j = 0; j < d; ++j) {
        double mn = 2.0;
        for (const Vec& c : chain) mn = std::min(mn, std::abs(c[j]));
        if (mn > best_min) { best_min = mn; best_j = j; }
    }
    if (best_j < 0 || best_min < 0.05)
        throw undersampled_loop_error(
            "berry_phase_connection: no vector component stays well-conditioned around the loop");
    for (Vec& c : chain) {
        cplx z = c[best_j];
        c *= std::conj(z) / std::abs(z);
    }

    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec& prev = chain[(k + n - 1) % n];
        const Vec& next = chain[(k + 1) % n];
        // Re<w_k| i (w_{k+1} - w_{k-1})/2> = -Im<w_k|w_{k+1} - w_{k-1}>/2
        acc -= 0.5 * (inner_product(chain[k], next) - inner_product(chain[k], prev)).imag();
    }

    BerryPhaseResult r;
    r.level = level;
    r.method = BerryMethod::connection_quadrature;
    r.phase = acc;
    r.winding = winding_of(acc);
    return r;
}

// Adiabatic route: evolve the level eigenstate around the loop over
// sweep_time, unwrap the total phase along the trajectory (rate-predicted
// from the recorded energies), subtract the dynamical quadrature.
inline PhaseDecomposition berry_phase_adiabatic_numeric(const HamiltonianFamily& family,
                                                        const ParameterPath& path, int level,
                                                        double sweep_time, int steps,
                                                        double leakage_tol = 0.05) {
    if (!path.closed)
        throw contract_error("berry_phase_adiabatic_numeric: path is not closed");
    if (!(sweep_time > 0.0))
        throw contract_error("berry_phase_adiabatic_numeric: sweep_time must be positive");

    ParameterPath timed = path.retimed(sweep_time);
    SpectralFrame f0 = eig_hermitian(family(timed.points.front()));
    for (const auto& block : f0.degeneracy_blocks)
        if (block.size() > 1 && std::find(block.begin(), block.end(), level) != block.end())
            throw degeneracy_error("berry_phase_adiabatic_numeric: level is degenerate at R(0)",
                                   0);
    Vec psi0 = f0.vector(level);
    Trajectory traj = evolve(family, timed, psi0, steps);

    // Unwrap arg<psi(0)|psi(t)> with the dynamical rate as branch predictor;
    // through near-orthogonal stretches the predictor alone carries the branch.
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < traj.samples(); ++k) {
        double dt = traj.times[k + 1] - traj.times[k];
        double predicted = acc - 0.5 * (traj.energies[k] + traj.energies[k + 1]) * dt;
        cplx o = inner_product(psi0, traj.states[k + 1]);
        if (std::abs(o) >= 0.01)
            acc = align_branch(principal_arg(o), predicted);
        else
            acc = predicted;
    }

    double fidelity = std::pow(std::abs(inner_product(f0.vector(level), traj.final())), 2);
    if (fidelity < 1.0 - leakage_tol)
        throw nonadiabatic_leakage_error(
            "berry_phase_adiabatic_numeric: evolution left the followed level (fidelity " +
                std::to_string(fidelity) + ")",
            fidelity);

    return make_decomposition(acc, dynamical_phase(traj));
}

// ----------------------------- geometric angles -------------------------------

struct AngleFit {
    double alpha = 0.0;
    std::vector<double> residuals;
    double max_residual = 0.0;
};

// Least-squares fit of phase_n = -n * alpha through the origin.
// Residuals above 0.1 reject the single-angle structure.
inline AngleFit fit_single_angle(const std::vector<double>& phases, const std::vector<double>& ns,
                                 const char* who) {
    if (phases.size() != ns.size() || phases.size() < 2)
        throw contract_error(std::string(who) + ": need phases for at least 2 levels");
    double distinct = 0.0, nn = 0.0, np = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        nn += ns[i] * ns[i];
        np += ns[i] * phases[i];
        for (std::size_t j = 0; j < i; ++j)
            distinct = std::max(distinct, std::abs(ns[i] - ns[j]));
    }
    if (distinct < 1e-12 || nn < 1e-12)
        throw contract_error(std::string(who) + ": levels must include 2 distinct nonzero n");
    AngleFit fit;
    fit.alpha = -np / nn;
    fit.residuals.reserve(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        fit.residuals.push_back(phases[i] + ns[i] * fit.alpha);
        fit.max_residual = std::max(fit.max_residual, std::abs(fit.residuals.back()));
    }
    if (fit.max_residual > 0.1)
        throw structure_violation_error(
            std::string(who) + ": per-level phases violate the single-angle structure",
            fit.max_residual);
    return fit;
}

inline AngleFit geometric_angles_from_levels(const std::vector<BerryPhaseResult>& results,
                                             const std::vector<double>& ns) {
    std::vector<double> phases;
    phases.reserve(results.size());
    for (const auto& r : results) phases.push_back(r.phase);
    return fit_single_angle(phases, ns, "geometric_angles_from_levels");
}

}  // namespace phaselab
