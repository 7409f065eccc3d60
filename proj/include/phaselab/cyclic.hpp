// cyclic.hpp — cyclic-evolution detection through eigenstates of U(0,T), the
// non-adiabatic geometric phase of a cyclic trajectory, its convergence to
// the adiabatic (Berry) value, and per-eigenstate geometric angles.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "phaselab/angles.hpp"
#include "phaselab/berry.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/evolution.hpp"
#include "phaselab/quantum.hpp"
#include "phaselab/transport.hpp"

namespace phaselab {

inline constexpr double cyclicity_tol_default = 1e-6;  // on 1 - |<psi(0)|psi(T)>|

struct CyclicState {
    Vec state;
    double total_phase = 0.0;  // arg of the U eigenvalue, in (-pi, pi]
    double fidelity = 1.0;     // |eigenvalue|, 1 up to roundoff for unitary U
};

// Full eigensystem of a unitary propagator via the Schur form; the columns of
// the Schur basis give an orthonormal eigenbasis even across degenerate
// eigenvalues (U is normal, so the Schur triangle is diagonal to roundoff).
inline std::vector<CyclicState> find_cyclic_states(const Mat& u) {
    require_unitary(u, "find_cyclic_states");
    Eigen::ComplexSchur<Mat> schur(u);
    if (schur.info() != Eigen::Success)
        throw std::runtime_error("find_cyclic_states: Schur decomposition failed");
    std::vector<CyclicState> out;
    out.reserve(u.rows());
    for (Eigen::Index k = 0; k < u.rows(); ++k) {
        CyclicState cs;
        cs.state = canonical_gauge(schur.matrixU().col(k));
        cplx lambda = schur.matrixT()(k, k);
        cs.total_phase = principal_arg(lambda);
        cs.fidelity = std::abs(lambda);
        out.push_back(std::move(cs));
    }
    return out;
}

// Geometric phase beta of a cyclic trajectory:
//   beta = arg<psi(0)|psi(T)> - sum_k arg<psi(t_k)|psi(t_{k+1})>,
// the discrete, gauge-invariant realization of the projective-connection
// integral. The decomposition stores the discrete projective integral as its
// dynamical part, so total = dynamical + geometric holds exactly. Winding is
// resolved by fanning the closed chain against a fixed reference state.
inline PhaseDecomposition aa_phase(const Trajectory& traj,
                                   double cyclicity_tol = cyclicity_tol_default) {
    if (traj.samples() < 2) throw contract_error("aa_phase: trajectory has fewer than 2 samples");
    cplx closure = inner_product(traj.initial(), traj.final());
    double fidelity = std::abs(closure);
    if (fidelity < 1.0 - cyclicity_tol)
        throw noncyclic_error("aa_phase: trajectory is not cyclic (|<psi(0)|psi(T)>| = " +
                                  std::to_string(fidelity) + ")",
                              fidelity);

    double projective_integral = 0.0;  // = dynamical phase for Schrödinger trajectories
    for (std::size_t k = 0; k + 1 < traj.samples(); ++k)
        projective_integral +=
            principal_arg(inner_product(traj.states[k], traj.states[k + 1]));

    // Apex candidates: eigenvectors of the trajectory's mean projector (all
    // rephasing-invariant), then the initial state.
    const std::size_t n = traj.samples();
    Mat mean = Mat::Zero(traj.initial().size(), traj.initial().size());
    for (const Vec& s : traj.states) mean += s * s.adjoint();
    mean /= static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(mean);
    std::optional<double> beta_acc;
    for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0 && !beta_acc; --k)
        beta_acc = chain_phase_accumulated(traj.states, es.eigenvectors().col(k));
    if (!beta_acc) beta_acc = chain_phase_accumulated(traj.states, traj.initial());

    double beta = beta_acc ? *beta_acc
                           : wrap_angle(principal_arg(closure) - projective_integral);
    PhaseDecomposition d;
    d.dynamical = projective_integral;
    d.geometric = beta;
    d.total = projective_integral + beta;
    d.winding = winding_of(beta);
    return d;
}

// ------------------------- adiabatic-limit comparison --------------------------

struct ConvergenceRow {
    double sweep_time = 0.0;
    double beta = 0.0;        // principal value
    double berry_ref = 0.0;   // principal value of the discrete Berry phase
    double deviation = 0.0;   // circular distance |beta - berry_ref|
    double fidelity = 1.0;
    bool cyclic = true;
};

// Evolve the level eigenstate around the closed path for each sweep time and
// report how far the cyclic geometric phase sits from the discrete Berry
// reference. Non-cyclic sweeps are flagged, not fatal.
inline std::vector<ConvergenceRow> aa_vs_berry_convergence(
    const HamiltonianFamily& family, const ParameterPath& path, int level,
    const std::vector<double>& sweep_times, double steps_per_time = 100.0,
    double cyclicity_tol = 0.05) {
    if (!path.closed) throw contract_error("aa_vs_berry_convergence: path is not closed");
    if (sweep_times.empty())
        throw contract_error("aa_vs_berry_convergence: need at least one sweep time");

    FrameField frames = build_frames(family, path, GaugeRule::parallel_transport);
    double berry = berry_phase_discrete(frames, level).phase;
    Vec psi0 = frames.vectors.front().col(level);

    std::vector<ConvergenceRow> rows;
    rows.reserve(sweep_times.size());
    for (double t : sweep_times) {
        ConvergenceRow row;
        row.sweep_time = t;
        row.berry_ref = wrap_angle(berry);
        int steps = std::max(1000, static_cast<int>(std::lround(steps_per_time * t)));
        Trajectory traj = evolve(family, path.retimed(t), psi0, steps);
        row.fidelity = std::abs(inner_product(traj.initial(), traj.final()));
        try {
            PhaseDecomposition d = aa_phase(traj, cyclicity_tol);
            row.beta = wrap_angle(d.geometric);
            row.deviation = circular_distance(d.geometric, berry);
        } catch (const noncyclic_error& e) {
            row.cyclic = false;
            row.beta = 0.0;
            row.deviation = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

// ------------------------------ geometric angles -------------------------------

struct GeometricAngles {
    std::vector<double> betas;      // per-eigenstate cyclic geometric phases
    double alpha = 0.0;             // single-angle fit beta_n = n * alpha
    std::vector<double> residuals;
    double max_residual = 0.0;
};

// Per-eigenstate geometric phases for a complete orthonormal eigenbasis of
// U(0,T), with the spin single-angle fit beta_n = n * alpha. `ns` assigns the
// generator quantum number to each trajectory.
inline GeometricAngles geometric_angles(const Mat& u, const std::vector<Trajectory>& trajectories,
                                        const std::vector<double>& ns,
                                        double cyclicity_tol = cyclicity_tol_default) {
    require_unitary(u, "geometric_angles");
    const int d = static_cast<int>(u.rows());
    if (static_cast<int>(trajectories.size()) != d || trajectories.size() != ns.size())
        throw contract_error("geometric_angles: need one trajectory per basis state");
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j)
            if (std::abs(inner_product(trajectories[i].initial(), trajectories[j].initial())) >
                1e-8)
                throw contract_error("geometric_angles: initial states are not orthonormal");
        if (!rays_equal(u * trajectories[i].initial(), trajectories[i].final(), 1e-6))
            throw contract_error(
                "geometric_angles: trajectory endpoints are inconsistent with U");
    }

    GeometricAngles out;
    out.betas.reserve(d);
    for (const Trajectory& t : trajectories)
        out.betas.push_back(aa_phase(t, cyclicity_tol).geometric);
    AngleFit fit = fit_single_angle(out.betas, ns, "geometric_angles");
    out.alpha = -fit.alpha;  // fit solves phase = -n*alpha; here beta_n = +n*alpha
    out.residuals = std::move(fit.residuals);
    out.max_residual = fit.max_residual;
    return out;
}

}  // namespace phaselab
