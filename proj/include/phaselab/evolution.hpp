// evolution.hpp — unitary integration of the time-dependent Schrödinger
// equation (hbar = 1 throughout): exponential-midpoint stepping with exact
// Hermitian exponentiation, propagator assembly, dynamical-phase quadrature.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "phaselab/angles.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/quantum.hpp"

namespace phaselab {

using Param = Eigen::VectorXd;

// ------------------------------ parameter paths -------------------------------

// Sampled path R(t), piecewise linear in parameter space between samples.
struct ParameterPath {
    std::vector<double> times;   // strictly ascending
    std::vector<Param> points;
    bool closed = false;

    ParameterPath() = default;
    ParameterPath(std::vector<double> t, std::vector<Param> p)
        : times(std::move(t)), points(std::move(p)) {
        validate();
        closed = (points.front() - points.back()).norm() <= 1e-12;
    }

    // Uniform time grid over [0, duration].
    static ParameterPath uniform(std::vector<Param> p, double duration = 1.0) {
        if (p.size() < 2) throw contract_error("ParameterPath: need at least 2 samples");
        std::vector<double> t(p.size());
        for (std::size_t k = 0; k < p.size(); ++k)
            t[k] = duration * static_cast<double>(k) / static_cast<double>(p.size() - 1);
        return ParameterPath(std::move(t), std::move(p));
    }

    void validate() const {
        if (times.size() != points.size() || times.size() < 2)
            throw contract_error("ParameterPath: times/points must match and hold >= 2 samples");
        for (std::size_t k = 1; k < times.size(); ++k)
            if (!(times[k] > times[k - 1]))
                throw contract_error("ParameterPath: times must be strictly ascending");
        for (const Param& p : points)
            if (p.size() != points.front().size())
                throw contract_error("ParameterPath: inconsistent parameter dimensions");
    }

    std::size_t samples() const { return times.size(); }
    double start_time() const { return times.front(); }
    double end_time() const { return times.back(); }
    double duration() const { return times.back() - times.front(); }

    Param at(double t) const {
        if (t <= times.front()) return points.front();
        if (t >= times.back()) return points.back();
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - times.begin());
        std::size_t lo = hi - 1;
        double w = (t - times[lo]) / (times[hi] - times[lo]);
        return (1.0 - w) * points[lo] + w * points[hi];
    }

    // Same geometric samples traversed over a different time span.
    ParameterPath retimed(double duration) const {
        std::vector<double> t(times.size());
        double t0 = times.front(), span = this->duration();
        for (std::size_t k = 0; k < times.size(); ++k)
            t[k] = duration * (times[k] - t0) / span;
        return ParameterPath(std::move(t), points);
    }

    ParameterPath reversed() const {
        std::vector<double> t(times.size());
        std::vector<Param> p(points.size());
        double t0 = times.front(), t1 = times.back();
        for (std::size_t k = 0; k < times.size(); ++k) {
            t[k] = t0 + (t1 - times[times.size() - 1 - k]);
            p[k] = points[points.size() - 1 - k];
        }
        return ParameterPath(std::move(t), std::move(p));
    }
};

// --------------------------- Hamiltonian families -----------------------------

// Deterministic map R -> H(R). Every evaluation is hermiticity-checked.
struct HamiltonianFamily {
    int dim = 0;
    std::function<Mat(const Param&)> evaluator;

    Mat operator()(const Param& p) const {
        Mat h = evaluator(p);
        if (h.rows() != dim || h.cols() != dim)
            throw contract_error("HamiltonianFamily: evaluator returned wrong dimension");
        require_hermitian(h, "HamiltonianFamily");
        return h;
    }
};

// ------------------------------- trajectories ---------------------------------

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> energies;  // <psi|H(R(t))|psi> at each sample

    std::size_t samples() const { return times.size(); }
    const Vec& initial() const { return states.front(); }
    const Vec& final() const { return states.back(); }
};

// total = dynamical + geometric holds exactly by construction; all three are
// accumulated (unwrapped) angles, winding is the geometric part's turn count.
struct PhaseDecomposition {
    double total = 0.0;
    double dynamical = 0.0;
    double geometric = 0.0;
    long winding = 0;
};

inline PhaseDecomposition make_decomposition(double total, double dynamical) {
    PhaseDecomposition d;
    d.total = total;
    d.dynamical = dynamical;
    d.geometric = total - dynamical;
    d.winding = winding_of(d.geometric);
    return d;
}

inline bool decomposition_identity_ok(const PhaseDecomposition& d, double tol = 1e-8) {
    return circular_distance(d.total, d.dynamical + d.geometric) <= tol;
}

// ------------------------------ unitary stepping ------------------------------

// exp(-i H dt) by spectral decomposition; unitary to machine precision.
inline Mat hermitian_exp_unitary(const Mat& h, double dt) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_exp_unitary: eigensolver failed");
    const auto& w = es.eigenvalues();
    Vec phases(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k)
        phases[k] = std::exp(cplx(0.0, -w[k] * dt));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Exponential-midpoint integrator applied to a column block (states or a
// basis being transported together).
inline Mat evolve_block(const HamiltonianFamily& family, const ParameterPath& path,
                        const Mat& initial, int steps) {
    if (steps < 1) throw contract_error("evolve: steps must be >= 1");
    if (initial.rows() != family.dim)
        throw contract_error("evolve: state dimension does not match the family");
    Mat block = initial;
    const double t0 = path.start_time();
    const double dt = path.duration() / steps;
    for (int k = 0; k < steps; ++k) {
        Mat h = family(path.at(t0 + (k + 0.5) * dt));
        block = hermitian_exp_unitary(h, dt) * block;
    }
    return block;
}

inline Trajectory evolve(const HamiltonianFamily& family, const ParameterPath& path,
                         const Vec& initial, int steps) {
    if (steps < 1) throw contract_error("evolve: steps must be >= 1");
    if (initial.size() != family.dim)
        throw contract_error("evolve: state dimension does not match the family");
    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.energies.reserve(steps + 1);

    const double t0 = path.start_time();
    const double dt = path.duration() / steps;
    Vec psi = normalized(initial);
    auto record = [&](double t, const Vec& v) {
        traj.times.push_back(t);
        traj.states.push_back(v);
        traj.energies.push_back(std::real(inner_product(v, family(path.at(t)) * v)));
    };
    record(t0, psi);
    for (int k = 0; k < steps; ++k) {
        Mat h = family(path.at(t0 + (k + 0.5) * dt));
        psi = hermitian_exp_unitary(h, dt) * psi;
        record(t0 + (k + 1) * dt, psi);
    }
    return traj;
}

// Ordered product of the step unitaries (later steps multiply on the left).
inline Mat propagator(const HamiltonianFamily& family, const ParameterPath& path, int steps) {
    Mat u = evolve_block(family, path, Mat::Identity(family.dim, family.dim), steps);
    return u;
}

// -(integral of <psi|H|psi> dt), trapezoidal rule over the stored energies.
// Accumulated, not reduced mod 2*pi.
inline double dynamical_phase(const Trajectory& traj) {
    if (traj.samples() < 2)
        throw contract_error("dynamical_phase: trajectory has fewer than 2 samples");
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < traj.samples(); ++k)
        acc -= 0.5 * (traj.energies[k] + traj.energies[k + 1]) *
               (traj.times[k + 1] - traj.times[k]);
    return acc;
}

}  // namespace phaselab
