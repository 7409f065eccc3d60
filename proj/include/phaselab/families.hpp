// families.hpp — the standard spin families and parameter loops used across
// the test scenarios: linear Zeeman coupling, the quadrupole family, cone and
// geodesic-polygon loops on the field-direction sphere.

#pragma once

#include <cmath>
#include <vector>

#include "phaselab/evolution.hpp"
#include "phaselab/quantum.hpp"
#include "phaselab/sphere.hpp"

namespace phaselab {

inline Param vec3_to_param(const Vec3& v) {
    Param p(3);
    p << v.x(), v.y(), v.z();
    return p;
}

inline Vec3 param_to_vec3(const Param& p) {
    if (p.size() != 3) throw contract_error("param_to_vec3: parameter is not 3-dimensional");
    return Vec3(p[0], p[1], p[2]);
}

// H(B) = coupling * (B . S) for a spin-s system; the parameter is the field
// vector (typically a unit direction with the magnitude folded into coupling).
inline HamiltonianFamily zeeman_family(double s, double coupling) {
    SpinOperators ops = spin_operators(s);
    return HamiltonianFamily{
        ops.dim(), [ops, coupling](const Param& p) -> Mat {
            Vec3 b = param_to_vec3(p);
            return coupling * (b.x() * ops.sx + b.y() * ops.sy + b.z() * ops.sz);
        }};
}

// H(B) = coupling * (Bhat . S)^2: two doubly degenerate +-m pairs at s = 3/2.
inline HamiltonianFamily quadrupole_family(double s, double coupling) {
    SpinOperators ops = spin_operators(s);
    return HamiltonianFamily{
        ops.dim(), [ops, coupling](const Param& p) -> Mat {
            Vec3 b = param_to_vec3(p);
            Mat bs = b.x() * ops.sx + b.y() * ops.sy + b.z() * ops.sz;
            return coupling * (bs * bs);
        }};
}

// Closed cone loop at colatitude theta: Bhat(phi_k), phi_k = 2 pi k / samples,
// k = 0..samples, with the final sample an exact copy of the first.
inline ParameterPath cone_loop(double theta, int samples, double duration = 1.0) {
    if (samples < 3) throw contract_error("cone_loop: need at least 3 samples");
    std::vector<Param> pts;
    pts.reserve(samples + 1);
    for (int k = 0; k < samples; ++k) {
        double phi = two_pi * k / samples;
        pts.push_back(vec3_to_param(Vec3(std::sin(theta) * std::cos(phi),
                                         std::sin(theta) * std::sin(phi), std::cos(theta))));
    }
    pts.push_back(pts.front());
    return ParameterPath::uniform(std::move(pts), duration);
}

// Closed geodesic polygon through the given unit vertices, resampled to
// roughly `samples` points distributed by arc length.
inline ParameterPath polygon_loop(const std::vector<Vec3>& vertices, int samples,
                                  double duration = 1.0) {
    if (vertices.size() < 3) throw contract_error("polygon_loop: need at least 3 vertices");
    if (samples < static_cast<int>(3 * vertices.size()))
        throw contract_error("polygon_loop: too few samples for the vertex count");
    const std::size_t n = vertices.size();
    std::vector<double> arc(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = vertices[i];
        const Vec3& b = vertices[(i + 1) % n];
        arc[i] = std::atan2(a.cross(b).norm(), a.dot(b));
        total += arc[i];
    }
    std::vector<Param> pts;
    pts.reserve(samples + n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        int m = std::max(1, static_cast<int>(std::lround(samples * arc[i] / total)));
        for (int j = 0; j < m; ++j)
            pts.push_back(vec3_to_param(
                geodesic_interpolate(vertices[i], vertices[(i + 1) % n],
                                     static_cast<double>(j) / m)));
    }
    pts.push_back(pts.front());
    return ParameterPath::uniform(std::move(pts), duration);
}

// Constant-parameter path (fixed Hamiltonian) over the given duration.
inline ParameterPath constant_path(const Param& p, double duration) {
    return ParameterPath::uniform({p, p}, duration);
}

// Basis vector with Sz eigenvalue n (Sz is stored with entries descending
// from +s, so n = +s sits at index 0).
inline Vec sz_eigenstate(const SpinOperators& ops, double n) {
    int idx = static_cast<int>(std::lround(ops.s - n));
    if (idx < 0 || idx >= ops.dim() || std::abs((ops.s - n) - idx) > 1e-9)
        throw contract_error("sz_eigenstate: n is not an eigenvalue of Sz");
    Vec v = Vec::Zero(ops.dim());
    v[idx] = 1.0;
    return v;
}

// Level index (ascending energy for positive coupling) of quantum number n.
inline int level_index_of_n(double s, double n) {
    int idx = static_cast<int>(std::lround(n + s));
    if (idx < 0 || idx > static_cast<int>(std::lround(2 * s)))
        throw contract_error("level_index_of_n: |n| exceeds s");
    return idx;
}

inline double n_of_level_index(double s, int level) { return level - s; }

}  // namespace phaselab
