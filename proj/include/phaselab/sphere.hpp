// sphere.hpp — geodesics and oriented solid angles on the unit 2-sphere.
//
// Orientation convention (fixed globally): right-hand rule with outward
// normal, so a loop traversed counterclockwise as seen from outside the
// sphere encloses positive solid angle. The octant x->y->z measures +pi/2.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "phaselab/angles.hpp"
#include "phaselab/errors.hpp"

namespace phaselab {

using Vec3 = Eigen::Vector3d;

inline constexpr double antipodal_tol = 1e-12;  // on |a.b + 1|

inline void require_unit3(const Vec3& v, const char* who) {
    if (std::abs(v.norm() - 1.0) > 1e-9)
        throw contract_error(std::string(who) + ": point is not on the unit sphere");
}

// Point on the minor great-circle arc from a to b; fraction 0 -> a, 1 -> b.
inline Vec3 geodesic_interpolate(const Vec3& a, const Vec3& b, double fraction) {
    require_unit3(a, "geodesic_interpolate");
    require_unit3(b, "geodesic_interpolate");
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw contract_error("geodesic_interpolate: fraction must lie in [0,1]");
    double c = a.dot(b);
    if (c <= -1.0 + antipodal_tol)
        throw no_unique_geodesic_error(
            "geodesic_interpolate: antipodal endpoints have no unique geodesic");
    double angle = std::atan2(a.cross(b).norm(), c);
    if (angle < 1e-9) return ((1.0 - fraction) * a + fraction * b).normalized();
    return (std::sin((1.0 - fraction) * angle) * a + std::sin(fraction * angle) * b) /
           std::sin(angle);
}

// Oriented solid angle of the geodesic triangle (a,b,c) via the
// two-argument-arctangent form tan(O/2) = a.(b x c) / (1 + a.b + b.c + c.a).
// The denominator is summed in sorted order so that swapping b and c
// negates the result exactly.
inline double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    double t = a.dot(b.cross(c));
    double d[3] = {a.dot(b), b.dot(c), c.dot(a)};
    std::sort(d, d + 3);
    return 2.0 * std::atan2(t, 1.0 + (d[0] + d[1]) + d[2]);
}

namespace detail {

inline bool lex_less(const Vec3& p, const Vec3& q) {
    if (p.x() != q.x()) return p.x() < q.x();
    if (p.y() != q.y()) return p.y() < q.y();
    return p.z() < q.z();
}

// Canonical cyclic form of a closed point sequence: start at the
// lexicographically smallest vertex and pick the lexicographically smaller
// of the two traversal directions. An input loop and its reversal map to
// the same sequence, so their solid angles are exact negatives.
struct CanonicalLoop {
    std::vector<Vec3> points;
    double sign = 1.0;  // +1 if the canonical direction matches the input
};

inline CanonicalLoop canonicalize_loop(const std::vector<Vec3>& pts) {
    const std::size_t n = pts.size();
    std::size_t r = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (lex_less(pts[i], pts[r])) r = i;

    std::vector<Vec3> fwd(n), bwd(n);
    for (std::size_t i = 0; i < n; ++i) {
        fwd[i] = pts[(r + i) % n];
        bwd[i] = pts[(r + n - i) % n];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (lex_less(fwd[i], bwd[i])) return {std::move(fwd), 1.0};
        if (lex_less(bwd[i], fwd[i])) return {std::move(bwd), -1.0};
    }
    return {std::move(fwd), 1.0};  // palindromic loop; orientation immaterial
}

// Fan apex for triangulation: must not be antipodal to any loop point. The
// oriented edge-normal sum points into the cap the traversal encloses
// counterclockwise, which keeps every fan triangle well separated from its
// apex's antipode for simple loops.
inline Vec3 pick_fan_apex(const std::vector<Vec3>& pts) {
    std::vector<Vec3> candidates;
    Vec3 edges = Vec3::Zero(), mean = Vec3::Zero();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        edges += pts[i].cross(pts[(i + 1) % n]);
        mean += pts[i];
    }
    if (edges.norm() > 1e-12) candidates.push_back(edges.normalized());
    if (mean.norm() > 1e-12) candidates.push_back(mean.normalized());
    for (int axis = 0; axis < 3; ++axis)
        for (double s : {1.0, -1.0}) candidates.push_back(s * Vec3::Unit(axis));

    Vec3 best = candidates.front();
    double best_clear = -1.0;
    for (const Vec3& c : candidates) {
        double clear = 2.0;
        for (const Vec3& p : pts) clear = std::min(clear, 1.0 + c.dot(p));
        if (clear > 1e-3) return c;
        if (clear > best_clear) { best_clear = clear; best = c; }
    }
    if (best_clear <= 1e-9)
        throw contract_error("solid_angle: no fan apex clears the loop's antipodes");
    return best;
}

inline double fan_solid_angle(const std::vector<Vec3>& pts) {
    CanonicalLoop canon = canonicalize_loop(pts);
    Vec3 apex = pick_fan_apex(canon.points);
    double sum = 0.0;
    const std::size_t n = canon.points.size();
    for (std::size_t i = 0; i < n; ++i)
        sum += triangle_solid_angle(apex, canon.points[i], canon.points[(i + 1) % n]);
    // The fan measured from the opposite side of the loop differs by exactly
    // 4 pi. Fold into (-2 pi, 2 pi]: the enclosed region is then a fixed,
    // traversal-independent choice, so reversal negates the result exactly
    // and rotations cannot hop the 4 pi branch.
    while (sum > two_pi) sum -= 2.0 * two_pi;
    while (sum <= -two_pi) sum += 2.0 * two_pi;
    return canon.sign * sum;
}

// Drop exact consecutive duplicates and an explicit closing copy of the
// first point.
inline std::vector<Vec3> dedup_closed(const std::vector<Vec3>& pts) {
    std::vector<Vec3> out;
    out.reserve(pts.size());
    for (const Vec3& p : pts)
        if (out.empty() || (p - out.back()).norm() > 1e-15) out.push_back(p);
    while (out.size() > 1 && (out.front() - out.back()).norm() <= 1e-15) out.pop_back();
    return out;
}

inline void require_no_consecutive_antipodes(const std::vector<Vec3>& pts, const char* who) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i)
        if (pts[i].dot(pts[(i + 1) % n]) <= -1.0 + antipodal_tol)
            throw no_unique_geodesic_error(
                std::string(who) + ": consecutive loop points are antipodal");
}

}  // namespace detail

struct SolidAngleResult {
    double value = 0.0;
    bool degenerate = false;
};

// Oriented solid angle of a closed geodesic polygon. Degenerate inputs
// (fewer than 3 distinct vertices, or all vertices on a single great-circle
// arc spanning less than pi) report 0 with the degenerate flag set.
inline SolidAngleResult polygon_solid_angle(const std::vector<Vec3>& vertices) {
    if (vertices.size() < 3)
        throw contract_error("polygon_solid_angle: a closed loop needs at least 3 points");
    for (const Vec3& v : vertices) require_unit3(v, "polygon_solid_angle");

    std::vector<Vec3> pts = detail::dedup_closed(vertices);
    std::vector<Vec3> distinct;
    for (const Vec3& p : pts) {
        bool seen = false;
        for (const Vec3& q : distinct)
            if ((p - q).norm() <= 1e-12) { seen = true; break; }
        if (!seen) distinct.push_back(p);
    }
    if (distinct.size() < 3) return {0.0, true};

    detail::require_no_consecutive_antipodes(pts, "polygon_solid_angle");

    // Arc degeneracy: vertices on one great circle covering less than a
    // half-turn bound no area.
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (const Vec3& p : pts) m += p * p.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    if (es.eigenvalues()(0) < 1e-16) {
        Vec3 normal = es.eigenvectors().col(0);
        Vec3 e1 = normal.unitOrthogonal();
        Vec3 e2 = normal.cross(e1);
        std::vector<double> angles;
        angles.reserve(pts.size());
        for (const Vec3& p : pts) angles.push_back(std::atan2(p.dot(e2), p.dot(e1)));
        std::sort(angles.begin(), angles.end());
        double max_gap = two_pi - (angles.back() - angles.front());
        for (std::size_t i = 1; i < angles.size(); ++i)
            max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
        if (two_pi - max_gap < pi - 1e-9) return {0.0, true};
    }

    return {detail::fan_solid_angle(pts), false};
}

// Oriented solid angle of a densely sampled closed loop (fan of geodesic
// triangles). Accepts a trailing duplicate of the first sample.
inline double sampled_loop_solid_angle(const std::vector<Vec3>& samples) {
    if (samples.size() < 3)
        throw contract_error("sampled_loop_solid_angle: need at least 3 samples");
    for (const Vec3& v : samples) require_unit3(v, "sampled_loop_solid_angle");
    std::vector<Vec3> pts = detail::dedup_closed(samples);
    if (pts.size() < 3) return 0.0;
    detail::require_no_consecutive_antipodes(pts, "sampled_loop_solid_angle");
    return detail::fan_solid_angle(pts);
}

}  // namespace phaselab
