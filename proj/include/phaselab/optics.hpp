// optics.hpp — Pancharatnam's polarizer experiment on the Poincaré sphere:
// polarization spinors, projection chains, interference intensity, the
// solid-angle phase law, and the coherent-amplitude phase shift.
//
// Chart convention (fixed): the (1,0) spinor maps to the +z pole; orthogonal
// polarizations are antipodal.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "phaselab/angles.hpp"
#include "phaselab/errors.hpp"
#include "phaselab/evolution.hpp"
#include "phaselab/quantum.hpp"
#include "phaselab/sphere.hpp"

namespace phaselab {

// Normalized two-component polarization spinor (z1, z2).
struct PolarizationSpinor {
    cplx z1{1.0, 0.0}, z2{0.0, 0.0};

    PolarizationSpinor() = default;
    PolarizationSpinor(cplx a, cplx b) {
        double n = std::sqrt(std::norm(a) + std::norm(b));
        if (!(n > 0.0) || !std::isfinite(n))
            throw contract_error("PolarizationSpinor: zero or non-finite amplitudes");
        z1 = a / n;
        z2 = b / n;
    }

    Vec vec() const {
        Vec v(2);
        v << z1, z2;
        return v;
    }
    static PolarizationSpinor from_vec(const Vec& v) {
        if (v.size() != 2) throw contract_error("PolarizationSpinor: need 2 components");
        return {v[0], v[1]};
    }

    static PolarizationSpinor horizontal() { return {1.0, 0.0}; }
    static PolarizationSpinor vertical() { return {0.0, 1.0}; }
    static PolarizationSpinor diagonal() { return {1.0, 1.0}; }        // +45 degrees
    static PolarizationSpinor antidiagonal() { return {1.0, -1.0}; }   // -45 degrees
    static PolarizationSpinor circular_right() { return {1.0, cplx(0.0, 1.0)}; }
    static PolarizationSpinor circular_left() { return {1.0, cplx(0.0, -1.0)}; }
};

// Stokes-vector map: (2 Re z1* z2, 2 Im z1* z2, |z1|^2 - |z2|^2).
// Global-phase invariant; orthogonal spinors land on antipodes.
inline Vec3 to_poincare(const PolarizationSpinor& s) {
    cplx c = std::conj(s.z1) * s.z2;
    return Vec3(2.0 * c.real(), 2.0 * c.imag(), std::norm(s.z1) - std::norm(s.z2));
}

// Intensity of the superposition of two unit beams: 2 + 2|<a|b>| cos ph<a|b>,
// in [0, 4]; orthogonal beams give 2 (the interference term has zero weight).
inline double interference_intensity(const PolarizationSpinor& a, const PolarizationSpinor& b) {
    return 2.0 + 2.0 * inner_product(a.vec(), b.vec()).real();
}

struct ProjectionResult {
    PolarizationSpinor state;
    double transmitted_fraction = 0.0;
};

// Polarizer action: project onto the transmission axis and renormalize. The
// output carries the axis rephased so <beam|out> is real positive — the beam
// stays in phase with its predecessor (geodesic transport on the sphere).
inline ProjectionResult project_polarizer(const PolarizationSpinor& beam,
                                          const PolarizationSpinor& polarizer) {
    cplx o = inner_product(polarizer.vec(), beam.vec());  // <polarizer|beam>
    double mag = std::abs(o);
    if (mag <= orthogonality_tol)
        throw full_extinction_error(
            "project_polarizer: beam is orthogonal to the polarizer axis");
    cplx phase = o / mag;
    return {PolarizationSpinor(polarizer.z1 * phase, polarizer.z2 * phase), mag * mag};
}

// Ordered polarizer chain; when closed the beam is finally projected back
// onto the first polarizer.
struct PolarizerChain {
    std::vector<PolarizationSpinor> polarizers;
    bool closed = true;

    void validate() const {
        if (polarizers.empty()) throw contract_error("PolarizerChain: empty chain");
        std::size_t n = polarizers.size();
        std::size_t pairs = closed ? n : n - 1;
        for (std::size_t k = 0; k < pairs; ++k) {
            cplx o = inner_product(polarizers[k].vec(), polarizers[(k + 1) % n].vec());
            if (std::abs(o) <= orthogonality_tol)
                throw full_extinction_error(
                    "PolarizerChain: consecutive polarizers are orthogonal at step " +
                    std::to_string(k));
        }
    }
};

struct ChainPhaseResult {
    PhaseDecomposition decomposition;   // dynamical part 0 by construction
    PolarizationSpinor final_state;
    double transmitted_fraction = 1.0;  // product over all projections
    double solid_angle = 0.0;           // oriented, from the Poincaré polygon
    double predicted_phase = 0.0;       // -solid_angle / 2
    bool polygon_degenerate = false;
};

// Send the input through the closed chain and compare the Pancharatnam phase
// of (input, final) against the solid-angle prediction -alpha/2.
inline ChainPhaseResult chain_phase(const PolarizerChain& chain, const PolarizationSpinor& input) {
    chain.validate();
    if (!chain.closed) throw contract_error("chain_phase: chain must be closed");
    if (!rays_equal(input.vec(), chain.polarizers.front().vec()))
        throw contract_error("chain_phase: input must equal the first polarizer state");

    ChainPhaseResult res;
    PolarizationSpinor state = input;
    const std::size_t n = chain.polarizers.size();
    for (std::size_t k = 1; k <= n; ++k) {
        ProjectionResult p = project_polarizer(state, chain.polarizers[k % n]);
        state = p.state;
        res.transmitted_fraction *= p.transmitted_fraction;
    }
    res.final_state = state;
    double measured = pancharatnam_phase(input.vec(), state.vec());

    std::vector<Vec3> points;
    points.reserve(n);
    for (const PolarizationSpinor& p : chain.polarizers) points.push_back(to_poincare(p));
    std::vector<Vec3> distinct;
    for (const Vec3& p : points) {
        bool seen = false;
        for (const Vec3& q : distinct)
            if ((p - q).norm() <= 1e-12) { seen = true; break; }
        if (!seen) distinct.push_back(p);
    }
    if (distinct.size() < 3) {
        res.solid_angle = 0.0;
        res.polygon_degenerate = true;
    } else {
        SolidAngleResult sa = polygon_solid_angle(points);
        res.solid_angle = sa.value;
        res.polygon_degenerate = sa.degenerate;
    }
    res.predicted_phase = -0.5 * res.solid_angle;

    res.decomposition.total = measured;
    res.decomposition.dynamical = 0.0;  // fixed-frequency phase ignored throughout
    res.decomposition.geometric = measured;
    res.decomposition.winding = 0;
    return res;
}

// Coherent two-mode state; amplitudes are unnormalized field amplitudes.
struct CoherentPolarizationState {
    cplx z1{0.0, 0.0}, z2{0.0, 0.0};
    std::string momentum_label;

    double intensity() const { return std::norm(z1) + std::norm(z2); }
};

// Closed polarization cycle subtending solid angle alpha advances both mode
// phases by alpha/2: (z1, z2) -> (z1, z2) e^{i alpha/2}. Intensity preserved.
inline CoherentPolarizationState coherent_phase_shift(const CoherentPolarizationState& state,
                                                      double alpha) {
    cplx f = std::exp(cplx(0.0, 0.5 * alpha));
    return {state.z1 * f, state.z2 * f, state.momentum_label};
}

}  // namespace phaselab
