#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "solitonlab/errors.hpp"
#include "solitonlab/hypersurface.hpp"
#include "solitonlab/rng.hpp"

using namespace solitonlab;

TEST_CASE("plane: vanishing second form and mean curvature") {
    const MetricChart g = euclidean_metric(3);
    std::vector<Vec> span = {vec3(1, 0, 0), vec3(0, 1, 0)};
    const ImmersedPatch plane = plane_patch(3, vec3(0, 0, 0), span);
    const ShapeData sd = shape_data(g, plane, vec2(0.2, -0.4));
    CHECK(sd.second_form.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(sd.H) < 1e-9);
    CHECK((sd.first_form - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unit sphere: |H| = 1, second form proportional to the first") {
    const MetricChart g = euclidean_metric(3);
    const ImmersedPatch sphere = sphere_patch(3, 1.0);
    const Vec t = vec2(1.1, 0.7);
    const ShapeData sd = shape_data(g, sphere, t);
    CHECK(std::abs(std::abs(sd.H) - 1.0) < 1e-6);
    // outward normal (reference rule) makes h = -I up to finite differences
    CHECK((sd.second_form + sd.first_form).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(sd.normal.dot(sphere.f(t)) > 0.0); // outward
    // h symmetric
    CHECK(std::abs(sd.second_form(0, 1) - sd.second_form(1, 0)) < 1e-8);
}

TEST_CASE("cylinder of radius 2: |H| = 1/4") {
    const MetricChart g = euclidean_metric(3);
    const ImmersedPatch cyl = cylinder_patch(2.0);
    const ShapeData sd = shape_data(g, cyl, vec2(0.4, 0.1));
    CHECK(std::abs(std::abs(sd.H) - 0.25) < 1e-6);
}

TEST_CASE("soliton residual: plane, spheres, orientation independence") {
    const MetricChart g = euclidean_metric(3);
    std::vector<Vec> span = {vec3(1, 0, 0), vec3(0, 1, 0)};
    const ImmersedPatch plane = plane_patch(3, vec3(0, 0, 0), span);
    CHECK(soliton_residual(g, radial_field(3), plane, param_grid(plane, 4)) < 1e-9);

    const ImmersedPatch s1 = sphere_patch(3, 1.0);
    CHECK(soliton_residual(g, radial_field(3), s1, param_grid(s1, 5)) < 1e-6);

    const ImmersedPatch s2 = sphere_patch(3, 2.0);
    const double r = soliton_residual(g, radial_field(3), s2, param_grid(s2, 5));
    CHECK(r == doctest::Approx(1.5).epsilon(1e-6));

    // flipping the orientation flips H but not the residual
    ImmersedPatch s2_in = s2;
    s2_in.orientation = Orientation::toward([](const Vec& x) { return (-x).eval(); });
    const Vec t = vec2(1.3, -0.2);
    const double Hout = shape_data(g, s2, t).H;
    const double Hin = shape_data(g, s2_in, t).H;
    CHECK(Hout == doctest::Approx(-Hin).epsilon(1e-8));
    const double r_in = soliton_residual(g, radial_field(3), s2_in, param_grid(s2_in, 5));
    CHECK(r == doctest::Approx(r_in).epsilon(1e-9));
}

TEST_CASE("immersion error on a rank-deficient parametrization") {
    const MetricChart g = euclidean_metric(3);
    ImmersedPatch degen;
    degen.n = 2;
    degen.ambient_dim = 3;
    degen.param_box = Box::cube(2, 1.0);
    degen.f = [](const Vec& t) { return vec3(t[0], t[0], 0.0); };
    degen.name = "degenerate";
    CHECK_THROWS_AS(shape_data(g, degen, vec2(0.0, 0.0)), ImmersionError);
}

TEST_CASE("conformal mean curvature: identity factor, soliton sphere, reaper cylinder") {
    const MetricChart g = euclidean_metric(3);
    const ImmersedPatch sphere = sphere_patch(3, 1.0);
    const Vec t = vec2(1.2, 0.4);

    CHECK(conformal_mean_curvature(g, ConformalFactor::zero(), sphere, t) ==
          doctest::Approx(shape_data(g, sphere, t).H).epsilon(1e-9));

    ConformalFactor u;
    u.name = "|p|^2/2";
    u.u = [](const Vec& p) { return 0.5 * p.squaredNorm(); };
    u.grad = [](const Vec& p) { return p; };
    double sup = 0.0;
    for (const Vec& tt : param_grid(sphere, 5))
        sup = std::max(sup, std::abs(conformal_mean_curvature(g, u, sphere, tt)));
    CHECK(sup < 1e-6);

    // translating-curve cylinder: surface swept by y = -ln cos x along the
    // z axis, with the potential scaled for the averaged mean curvature
    // convention
    const MetricChart g2 = euclidean_metric(3, Box::of({-1.5, 1.5, -0.5, 2.5, -1.5, 1.5}));
    ImmersedPatch cylr;
    cylr.n = 2;
    cylr.ambient_dim = 3;
    cylr.param_box = Box::of({-1.2, 1.2, -1.0, 1.0});
    cylr.f = [](const Vec& tt) {
        return vec3(tt[0], -std::log(std::cos(tt[0])), tt[1]);
    };
    cylr.orientation = Orientation::positive_frame();
    cylr.name = "reaper-cylinder";
    ConformalFactor uy;
    uy.name = "-y/2";
    uy.u = [](const Vec& p) { return -0.5 * p[1]; };
    uy.grad = [](const Vec&) { return vec3(0.0, -0.5, 0.0); };
    double sup2 = 0.0;
    for (const Vec& tt : param_grid(cylr, 5))
        sup2 = std::max(sup2, std::abs(conformal_mean_curvature(g2, uy, cylr, tt)));
    CHECK(sup2 < 1e-5);
}

TEST_CASE("near-soliton patches: |Hbar| and the soliton residual bound each other") {
    const MetricChart g = euclidean_metric(3);
    ConformalFactor u;
    u.name = "|p|^2/2";
    u.u = [](const Vec& p) { return 0.5 * p.squaredNorm(); };
    u.grad = [](const Vec& p) { return p; };
    for (const double R : {0.9, 0.95, 1.05, 1.15}) {
        const ImmersedPatch s = sphere_patch(3, R);
        const auto grid = param_grid(s, 4);
        const double resid = soliton_residual(g, radial_field(3), s, grid);
        double hbar = 0.0;
        for (const Vec& t : grid)
            hbar = std::max(hbar, std::abs(conformal_mean_curvature(g, u, s, t)));
        CHECK(hbar <= 10.0 * resid);
        CHECK(resid <= 10.0 * hbar);
    }
}

TEST_CASE("shape data is invariant under reparametrization of the patch") {
    const MetricChart g = euclidean_metric(3);
    const ImmersedPatch sphere = sphere_patch(3, 1.0);
    // warp each parameter axis by a smooth monotone map
    ImmersedPatch warped = sphere;
    const Box b = sphere.param_box;
    warped.f = [b, base = sphere.f](const Vec& t) {
        Vec tt(2);
        for (int a = 0; a < 2; ++a) {
            const double tau = (t[a] - b.lo[a]) / (b.hi[a] - b.lo[a]);
            const double warped_tau = tau + 0.1 * std::sin(M_PI * tau) * tau * (1 - tau);
            tt[a] = b.lo[a] + (b.hi[a] - b.lo[a]) * warped_tau;
        }
        return base(tt);
    };
    SplitMix64 rng(17);
    for (int i = 0; i < 5; ++i) {
        Vec t(2);
        for (int a = 0; a < 2; ++a) {
            const double tau = 0.2 + 0.6 * rng.next_double();
            t[a] = b.lo[a] + (b.hi[a] - b.lo[a]) * tau;
        }
        // corresponding point on the warped patch
        Vec s(2);
        for (int a = 0; a < 2; ++a) {
            const double tau = (t[a] - b.lo[a]) / (b.hi[a] - b.lo[a]);
            // invert the warp by bisection
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double w = mid + 0.1 * std::sin(M_PI * mid) * mid * (1 - mid);
                (w < tau ? lo : hi) = mid;
            }
            s[a] = b.lo[a] + (b.hi[a] - b.lo[a]) * 0.5 * (lo + hi);
        }
        const double H1 = shape_data(g, sphere, t).H;
        const double H2 = shape_data(g, warped, s).H;
        CHECK(std::abs(std::abs(H1) - std::abs(H2)) < 1e-7);
    }
}

TEST_CASE("rotational profile: sphere stays on the circle") {
    const MetricChart g = euclidean_metric(3);
    // start on the equator-plane circle, tangent along the profile circle
    const ProfileResult pr = rotational_profile(g, radial_field(3), 2, 1.0, 0.0,
                                                vec2(0.0, 1.0), 1.2);
    for (const auto& s : pr.samples)
        CHECK(std::abs(std::hypot(s.r, s.z) - 1.0) < 1e-9);
    const double resid = soliton_residual(g, radial_field(3), pr.patch,
                                          param_grid(pr.patch, 4));
    CHECK(resid < 1e-6);
}

TEST_CASE("rotational profile: catenoid closed form for the minimal case") {
    const MetricChart g = euclidean_metric(3);
    const ProfileResult pr =
        rotational_profile(g, zero_field(3), 2, 1.0, 0.0, vec2(0.0, 1.0), 1.1);
    for (const auto& s : pr.samples)
        CHECK(std::abs(s.r - std::cosh(s.z)) < 1e-6);
    CHECK(soliton_residual(g, zero_field(3), pr.patch, param_grid(pr.patch, 4)) < 1e-6);
}

TEST_CASE("rotational profile: bowl-type translating profile self-check") {
    const MetricChart g = euclidean_metric(3);
    const VectorFieldSpec X = translation_field(vec3(0.0, 0.0, -0.5));
    // near-apex seed: z ~ a r^2 / 2 with a = 0.5
    const double r0 = 1e-2, a = 0.5;
    const ProfileResult pr =
        rotational_profile(g, X, 2, r0, 0.5 * a * r0 * r0, vec2(1.0, a * r0), 1.5);
    CHECK(pr.complete);
    CHECK(soliton_residual(g, X, pr.patch, param_grid(pr.patch, 4)) < 1e-5);
}

TEST_CASE("rotational profile preconditions and axis handling") {
    const MetricChart g = euclidean_metric(3);
    // heading into the axis with nonzero slope (wide margin forces the stop
    // while the slope is still steep)
    ProfileOptions steep;
    steep.axis_margin = 0.2;
    CHECK_THROWS_AS(rotational_profile(g, zero_field(3), 2, 0.5, 0.0,
                                       vec2(-1.0, 0.4), 2.0, steep),
                    CoordinateSingularityError);
    // smooth cap: the sphere profile reaches the axis tangentially and stops
    // with a clean partial result
    const ProfileResult cap = rotational_profile(g, radial_field(3), 2, 0.2,
                                                 -std::sqrt(1.0 - 0.04),
                                                 vec2(-0.98, -0.2), 0.3);
    CHECK(cap.samples.size() > 2);
    CHECK_FALSE(cap.complete);

    // non-axisymmetric field is refused
    VectorFieldSpec bad;
    bad.dim = 3;
    bad.name = "skew";
    bad.eval = [](const Vec& p) { return vec3(p[1] * p[1], 0.0, 0.0); };
    CHECK_THROWS_AS(rotational_profile(g, bad, 2, 1.0, 0.0, vec2(0, 1), 1.0),
                    PreconditionError);
    // non-euclidean metric is refused
    const MetricChart sph = sphere_stereographic_metric(3);
    CHECK_THROWS_AS(rotational_profile(sph, zero_field(3), 2, 1.0, 0.0, vec2(0, 1), 1.0),
                    PreconditionError);
}

TEST_CASE("dimension 4: unit S^3 soliton residual") {
    const MetricChart g4 = euclidean_metric(4);
    const ImmersedPatch s3 = sphere_patch(4, 1.0);
    CHECK(soliton_residual(g4, radial_field(4), s3, param_grid(s3, 3)) < 1e-6);
    CHECK_THROWS_AS(shape_data(euclidean_metric(2), ImmersedPatch{}, Vec::Zero(1)),
                    DimensionError);
}
