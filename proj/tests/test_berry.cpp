#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "phaselab/berry.hpp"
#include "phaselab/families.hpp"

using namespace phaselab;

namespace {

std::mt19937 rng_for(const char* tag) {
    std::seed_seq seq(tag, tag + std::char_traits<char>::length(tag));
    return std::mt19937(seq);
}

double cap_area(double theta) { return two_pi * (1.0 - std::cos(theta)); }

// Closed-form spin-1/2 eigenvector of (bhat.S) with eigenvalue +1/2.
Vec spin_up_along(double theta, double phi) {
    Vec v(2);
    v << std::cos(theta / 2.0), std::exp(cplx(0, phi)) * std::sin(theta / 2.0);
    return v;
}

// Smooth wobbling closed loop on the sphere, for cross-method agreement.
ParameterPath wobbly_loop(std::mt19937& rng, int samples) {
    std::uniform_real_distribution<double> amp(-0.25, 0.25), base(0.6, 2.2), ph(0, two_pi);
    double theta0 = base(rng);
    double a1 = amp(rng), a2 = amp(rng), p1 = ph(rng), p2 = ph(rng);
    std::vector<Param> pts;
    for (int k = 0; k < samples; ++k) {
        double phi = two_pi * k / samples;
        double theta = theta0 + a1 * std::cos(phi + p1) + a2 * std::cos(2 * phi + p2);
        pts.push_back(vec3_to_param(Vec3(std::sin(theta) * std::cos(phi),
                                         std::sin(theta) * std::sin(phi), std::cos(theta))));
    }
    pts.push_back(pts.front());
    return ParameterPath::uniform(std::move(pts), 1.0);
}

FrameField rephased(const FrameField& ff, const std::vector<std::vector<cplx>>& factors) {
    FrameField out = ff;
    for (std::size_t k = 0; k < out.vectors.size(); ++k)
        for (int level = 0; level < out.dim(); ++level)
            out.vectors[k].col(level) *= factors[k][level];
    return out;
}

}  // namespace

TEST_CASE("build_frames: constant family gives constant frames") {
    HamiltonianFamily family = zeeman_family(1.0, 2.0);
    ParameterPath path = constant_path(vec3_to_param(Vec3(0.3, 0.1, 0.9).normalized()), 1.0);
    FrameField ff = build_frames(family, path);
    REQUIRE(ff.samples() == 2);
    for (int level = 0; level < 3; ++level) {
        cplx o = inner_product(ff.vectors[0].col(level), ff.vectors[1].col(level));
        CHECK(std::abs(o - cplx(1, 0)) < 1e-12);
    }
}

TEST_CASE("build_frames matches closed-form spin-1/2 eigenvectors up to gauge") {
    double theta = pi / 2;  // equator sweep
    HamiltonianFamily family = zeeman_family(0.5, 1.0);
    ParameterPath path = cone_loop(theta, 360);
    FrameField ff = build_frames(family, path);
    for (std::size_t k = 0; k < ff.samples(); ++k) {
        double phi = two_pi * static_cast<double>(k % 360) / 360.0;
        REQUIRE(rays_equal(ff.vectors[k].col(1), spin_up_along(theta, phi)));
        REQUIRE(ff.eigenvalues[k][1] == Catch::Approx(0.5).margin(1e-12));
    }
    // parallel-transport gauge: consecutive overlaps real positive
    for (std::size_t k = 0; k + 1 < ff.samples(); ++k)
        for (int level = 0; level < 2; ++level) {
            cplx o = inner_product(ff.vectors[k].col(level), ff.vectors[k + 1].col(level));
            REQUIRE(std::abs(o.imag()) < 1e-10);
            REQUIRE(o.real() > 0.9);
        }
}

TEST_CASE("build_frames rejects degenerate families") {
    HamiltonianFamily family = quadrupole_family(1.5, 1.0);
    ParameterPath path = cone_loop(pi / 3, 24);
    CHECK_THROWS_AS(build_frames(family, path), degeneracy_error);
}

TEST_CASE("discrete Berry phase: constant family and solid-angle law") {
    HamiltonianFamily constant = zeeman_family(0.5, 1.0);
    FrameField cf = build_frames(constant, constant_path(vec3_to_param(Vec3::UnitZ()), 1.0));
    CHECK(std::abs(berry_phase_discrete(cf, 1).phase) < 1e-12);

    HamiltonianFamily family = zeeman_family(0.5, 1.0);
    FrameField ff = build_frames(family, cone_loop(pi / 3, 720));
    BerryPhaseResult up = berry_phase_discrete(ff, 1);  // level n = +1/2
    CHECK(up.phase == Catch::Approx(-0.5 * cap_area(pi / 3)).margin(1e-4));
    CHECK(up.winding_resolved);

    FrameField eq = build_frames(family, cone_loop(pi / 2, 720));
    BerryPhaseResult eq_up = berry_phase_discrete(eq, 1);
    CHECK(circular_distance(eq_up.phase, -pi) < 1e-4);
}

TEST_CASE("discrete Berry phase per level carries true winding") {
    // spin-1 cone: accumulated phases {-pi, 0, +pi} for n = {1, 0, -1}
    FrameField ff = build_frames(zeeman_family(1.0, 1.0), cone_loop(pi / 3, 720));
    std::vector<BerryPhaseResult> results;
    std::vector<double> ns;
    for (int level = 0; level < 3; ++level) {
        results.push_back(berry_phase_discrete(ff, level));
        ns.push_back(n_of_level_index(1.0, level));
    }
    CHECK(results[0].phase == Catch::Approx(pi).margin(1e-4));   // n = -1
    CHECK(std::abs(results[1].phase) < 1e-9);                    // n = 0
    CHECK(results[2].phase == Catch::Approx(-pi).margin(1e-4));  // n = +1

    AngleFit fit = geometric_angles_from_levels(results, ns);
    CHECK(fit.alpha == Catch::Approx(pi).margin(1e-4));
    CHECK(fit.max_residual < 1e-3);
}

TEST_CASE("spin-3/2 equator: single-angle fit recovers alpha = 2pi from 4 levels") {
    FrameField ff = build_frames(zeeman_family(1.5, 1.0), cone_loop(pi / 2, 720));
    std::vector<BerryPhaseResult> results;
    std::vector<double> ns;
    for (int level = 0; level < 4; ++level) {
        results.push_back(berry_phase_discrete(ff, level));
        ns.push_back(n_of_level_index(1.5, level));
    }
    // accumulated phases -n * 2pi, resolved beyond the principal branch
    CHECK(results[0].phase == Catch::Approx(3 * pi).margin(1e-3));   // n = -3/2
    CHECK(results[3].phase == Catch::Approx(-3 * pi).margin(1e-3));  // n = +3/2
    AngleFit fit = geometric_angles_from_levels(results, ns);
    CHECK(fit.alpha == Catch::Approx(two_pi).margin(1e-3));
    CHECK(fit.max_residual < 1e-3);
}

TEST_CASE("discrete Berry phase contract violations") {
    HamiltonianFamily family = zeeman_family(0.5, 1.0);
    ParameterPath open_path = ParameterPath::uniform(
        {vec3_to_param(Vec3::UnitZ()), vec3_to_param(Vec3::UnitX())}, 1.0);
    FrameField ff = build_frames(family, open_path);
    CHECK_THROWS_AS(berry_phase_discrete(ff, 0), contract_error);
    CHECK_THROWS_AS(berry_phase_discrete(build_frames(family, cone_loop(pi / 3, 720)), 7),
                    contract_error);

    // coarse high-spin loop: consecutive coherent overlaps collapse
    FrameField coarse = build_frames(zeeman_family(4.0, 1.0), cone_loop(pi / 2, 3));
    CHECK_THROWS_AS(berry_phase_discrete(coarse, 8), undersampled_loop_error);
}

TEST_CASE("discrete Berry phase is exactly gauge invariant") {
    FrameField ff = build_frames(zeeman_family(1.0, 1.0), cone_loop(pi / 3, 240));
    double base = berry_phase_discrete(ff, 2).phase;

    auto rng = rng_for("gauge-invariance");
    // quarter-turn rephasings are exact in floating point: bit-identical result
    std::vector<std::vector<cplx>> quarter(ff.samples());
    const cplx q[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (auto& row : quarter)
        for (int level = 0; level < 3; ++level) row.push_back(q[rng() % 4]);
    CHECK(berry_phase_discrete(rephased(ff, quarter), 2).phase == base);

    // arbitrary rephasings agree to rounding
    std::uniform_real_distribution<double> angle(-pi, pi);
    std::vector<std::vector<cplx>> smooth(ff.samples());
    for (auto& row : smooth)
        for (int level = 0; level < 3; ++level) row.push_back(std::exp(cplx(0, angle(rng))));
    CHECK(std::abs(berry_phase_discrete(rephased(ff, smooth), 2).phase - base) < 1e-12);
}

TEST_CASE("discrete Berry phase ignores the time parameterization") {
    ParameterPath path = cone_loop(pi / 3, 240);
    auto rng = rng_for("reparam");
    std::uniform_real_distribution<double> jitter(0.2, 1.8);
    std::vector<double> times(path.samples());
    times[0] = 0.0;
    for (std::size_t k = 1; k < path.samples(); ++k) times[k] = times[k - 1] + jitter(rng);
    ParameterPath retimed(std::move(times), path.points);

    HamiltonianFamily family = zeeman_family(0.5, 1.0);
    double a = berry_phase_discrete(build_frames(family, path), 1).phase;
    double b = berry_phase_discrete(build_frames(family, retimed), 1).phase;
    CHECK(std::abs(a - b) < 1e-6);  // same geometric samples: identical transport
}

TEST_CASE("reversing the loop negates the Berry phase mod 2pi") {
    HamiltonianFamily family = zeeman_family(1.0, 1.0);
    ParameterPath path = cone_loop(pi / 4, 360);
    double fwd = berry_phase_discrete(build_frames(family, path), 2).phase;
    double bwd = berry_phase_discrete(build_frames(family, path.reversed()), 2).phase;
    CHECK(circular_distance(bwd, -fwd) < 1e-9);
}

TEST_CASE("connection quadrature agrees with the discrete product") {
    HamiltonianFamily constant = zeeman_family(0.5, 1.0);
    FrameField cf = build_frames(constant, constant_path(vec3_to_param(Vec3::UnitZ()), 1.0));
    CHECK(std::abs(berry_phase_connection(cf, 0).phase) < 1e-12);

    FrameField cone = build_frames(zeeman_family(0.5, 1.0), cone_loop(pi / 3, 720));
    CHECK(berry_phase_connection(cone, 1).phase ==
          Catch::Approx(-0.5 * cap_area(pi / 3)).margin(1e-3));

    auto rng = rng_for("random-loops");
    HamiltonianFamily family = zeeman_family(1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        FrameField ff = build_frames(family, wobbly_loop(rng, 720));
        for (int level = 0; level < 3; ++level) {
            double disc = berry_phase_discrete(ff, level).phase;
            double conn = berry_phase_connection(ff, level).phase;
            REQUIRE(circular_distance(disc, conn) < 1e-3);
        }
    }
}

TEST_CASE("adiabatic route: stationary family has zero geometric phase") {
    HamiltonianFamily family = zeeman_family(0.5, 1.0);
    ParameterPath path = constant_path(vec3_to_param(Vec3::UnitZ()), 1.0);
    PhaseDecomposition d = berry_phase_adiabatic_numeric(family, path, 1, 10.0, 2000);
    CHECK(std::abs(d.geometric) < 1e-9);
    CHECK(decomposition_identity_ok(d));
}

TEST_CASE("adiabatic route approaches the discrete Berry phase") {
    HamiltonianFamily family = zeeman_family(0.5, 1.0);
    ParameterPath path = cone_loop(pi / 3, 720);
    double berry = berry_phase_discrete(build_frames(family, path), 1).phase;

    // Deviation scales as 1/sweep_time (the cyclic phase picks up the actual
    // swept Bloch cap, displaced by the precession-frame tilt).
    std::vector<double> sweeps = {50.0, 150.0, 500.0};
    std::vector<double> devs;
    for (double t : sweeps) {
        PhaseDecomposition d = berry_phase_adiabatic_numeric(
            family, path, 1, t, static_cast<int>(100 * t));
        CHECK(decomposition_identity_ok(d));
        devs.push_back(circular_distance(d.geometric, berry));
    }
    CHECK(devs[1] < devs[0]);
    CHECK(devs[2] < devs[1]);
    CHECK(devs[2] < 5e-2);

    PhaseDecomposition fine = berry_phase_adiabatic_numeric(family, path, 1, 2500.0, 250000);
    CHECK(circular_distance(fine.geometric, berry) < 1e-2);
}

TEST_CASE("adiabatic route reports leakage on non-adiabatic sweeps") {
    HamiltonianFamily family = zeeman_family(0.5, 1.0);
    ParameterPath path = cone_loop(pi / 2.2, 360);
    try {
        berry_phase_adiabatic_numeric(family, path, 1, 1.0, 500, 1e-4);
        FAIL("expected nonadiabatic_leakage_error");
    } catch (const nonadiabatic_leakage_error& e) {
        CHECK(e.fidelity < 1.0 - 1e-4);  // carries |<n;R(T)|psi(T)>|^2
    }
}

TEST_CASE("single-angle fit diagnostics") {
    std::vector<BerryPhaseResult> zero(3);
    zero[0].phase = 0.0;
    zero[1].phase = 0.0;
    zero[2].phase = 0.0;
    AngleFit fit = geometric_angles_from_levels(zero, {1.0, 0.0, -1.0});
    CHECK(fit.alpha == 0.0);
    CHECK(fit.max_residual == 0.0);

    std::vector<BerryPhaseResult> broken(2);
    broken[0].phase = 0.5;
    broken[1].phase = 0.5;
    CHECK_THROWS_AS(geometric_angles_from_levels(broken, {0.5, -0.5}),
                    structure_violation_error);

    CHECK_THROWS_AS(geometric_angles_from_levels(zero, {1.0, 1.0, 1.0}), contract_error);
}

TEST_CASE("matched-level overlaps stay above the tracking band") {
    FrameField ff = build_frames(zeeman_family(1.5, 1.0), cone_loop(pi / 3, 720));
    for (std::size_t k = 0; k + 1 < ff.samples(); ++k)
        for (int level = 0; level < 4; ++level)
            REQUIRE(std::abs(inner_product(ff.vectors[k].col(level),
                                           ff.vectors[k + 1].col(level))) > 0.9);
}
