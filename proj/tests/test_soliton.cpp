#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "solitonlab/errors.hpp"
#include "solitonlab/rng.hpp"
#include "solitonlab/soliton.hpp"

using namespace solitonlab;

TEST_CASE("unit normal is the +90 degree rotation (positively oriented)") {
    const MetricChart g = euclidean_metric(2);
    const Vec nu = unit_normal(g, vec2(0, 0), vec2(1.0, 0.0));
    CHECK(nu[0] == doctest::Approx(0.0));
    CHECK(nu[1] == doctest::Approx(1.0));
    // det[T nu] > 0 in a curved metric as well
    const MetricChart hp = half_plane_metric();
    const Vec T = vec2(0.3, 0.7);
    const Vec nu2 = unit_normal(hp, vec2(0.2, 1.5), T);
    CHECK(T[0] * nu2[1] - T[1] * nu2[0] > 0.0);
    CHECK(hp.inner(vec2(0.2, 1.5), T, nu2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hp.norm(vec2(0.2, 1.5), nu2) == doctest::Approx(1.0));
}

TEST_CASE("rhs: minimal case, unit-circle pin, grim reaper curvature") {
    const MetricChart g = euclidean_metric(2);

    // X = 0: straight geodesics
    CurveState straight{vec2(0.3, -0.2), vec2(1.0, 0.0), 0.0};
    const auto r0 = soliton_rhs(g, zero_field(2), straight);
    CHECK(r0.kappa_g == 0.0);
    CHECK(r0.dT.cwiseAbs().maxCoeff() < 1e-14);

    // X(p) = p: the counterclockwise unit circle solves the equation; the
    // derivative keeps the curve on the circle
    CurveState circ{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const auto rc = soliton_rhs(g, radial_field(2), circ);
    CHECK(rc.kappa_g == doctest::Approx(1.0)); // curvature balances g(X, nu)
    CHECK(rc.dT[0] == doctest::Approx(-1.0));  // dT/ds = -p on the circle
    CHECK(rc.dT[1] == doctest::Approx(0.0));

    // translating case at the apex: kappa matches cos(x)
    CurveState apex{vec2(0.0, 0.0), vec2(1.0, 0.0), 0.0};
    const auto ra = soliton_rhs(g, translation_field(vec2(0.0, -1.0)), apex);
    CHECK(ra.kappa_g == doctest::Approx(std::cos(0.0)));
    CurveState off{vec2(0.5, -std::log(std::cos(0.5))),
                   vec2(std::cos(0.5), std::sin(0.5)), 0.0};
    const auto roff = soliton_rhs(g, translation_field(vec2(0.0, -1.0)), off);
    CHECK(roff.kappa_g == doctest::Approx(std::cos(0.5)));
}

TEST_CASE("integration: straight line, circle closure, residuals") {
    const MetricChart g = euclidean_metric(2);
    CurveState st{vec2(0.0, 0.0), vec2(1.0, 0.0), 0.0};
    const SolitonCurve line = integrate_soliton(g, zero_field(2), st, 2.0);
    CHECK((line.samples.back().x - vec2(2.0, 0.0)).norm() < 1e-8);
    CHECK(line.complete);

    CurveState c0{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve circle = integrate_soliton(g, radial_field(2), c0, 2.0 * M_PI);
    CHECK((circle.samples.back().x - vec2(1.0, 0.0)).norm() < 1e-7);
    double max_r_dev = 0.0, max_residual = 0.0;
    for (const auto& s : circle.samples) {
        max_r_dev = std::max(max_r_dev, std::abs(s.x.norm() - 1.0));
        max_residual = std::max(max_residual, s.residual);
    }
    CHECK(max_r_dev < 1e-9);
    CHECK(max_residual < 1e-8); // measured curvature matches the drive
}

TEST_CASE("unit tangent norm drift stays tiny without renormalization") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 6.0));
    SolitonIntegrationOptions opts;
    opts.renormalize = false;
    CurveState st{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve c = integrate_soliton(g, rotation_field(1.0), st, 1.0, opts);
    for (const auto& s : c.samples) CHECK(std::abs(g.inner(s.x, s.T, s.T) - 1.0) <= 1e-9);
}

TEST_CASE("grim reaper matches y = -ln cos x") {
    const MetricChart g = euclidean_metric(2, Box::of({-1.55, 1.55, -0.5, 2.5}));
    const VectorFieldSpec X = translation_field(vec2(0.0, -1.0));
    CurveState st{vec2(0.0, 0.0), vec2(1.0, 0.0), 0.0};
    const SolitonCurve c = integrate_soliton(g, X, st, 2.46);
    double dev = 0.0;
    for (const auto& s : c.samples)
        if (std::abs(s.x[0]) <= 1.4)
            dev = std::max(dev, std::abs(s.x[1] + std::log(std::cos(s.x[0]))));
    CHECK(dev < 1e-6);
    CHECK(std::abs(c.samples.back().x[0]) > 1.39); // reached the target range
}

TEST_CASE("yin-yang curve: non-self-intersecting, reversal retraces") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 8.0));
    const VectorFieldSpec X = rotation_field(1.0);
    SolitonIntegrationOptions opts;
    opts.max_step = 5e-3;
    CurveState st{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve yy = integrate_soliton(g, X, st, 10.0, opts);
    CHECK(yy.complete);
    CHECK(count_self_intersections(yy, 1e-6).count == 0);

    // reversal symmetry: integrate back from the endpoint
    SolitonIntegrationOptions ropts;
    ropts.rtol = 1e-11;
    ropts.max_step = 5e-3;
    const SolitonCurve fwd = integrate_soliton(g, X, st, 6.0, ropts);
    CurveState rev{fwd.samples.back().x, (-fwd.samples.back().T).eval(), 0.0};
    const SolitonCurve back = integrate_soliton(g, X, rev, 6.0, ropts);
    double sup = 0.0;
    const double L = fwd.samples.back().s;
    for (std::size_t i = 0; i < back.samples.size(); i += 7) {
        const auto& s = back.samples[i];
        if (s.s > L) break;
        sup = std::max(sup, (fwd.position_at(L - s.s) - s.x).norm());
    }
    CHECK(sup < 1e-6);
}

TEST_CASE("soliton curves terminate at the domain boundary with a partial result") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 1.0));
    CurveState st{vec2(0.0, 0.0), vec2(1.0, 0.0), 0.0};
    const SolitonCurve c = integrate_soliton(g, zero_field(2), st, 5.0);
    CHECK_FALSE(c.complete);
    CHECK(c.samples.back().x[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(
        integrate_soliton(g, zero_field(2), CurveState{vec2(2.0, 0.0), vec2(1, 0), 0.0}, 1.0),
        DomainError);
}

TEST_CASE("intersection counting: crossing, parallel, merging, degenerate") {
    auto polyline = [](std::initializer_list<Vec> pts) {
        SolitonCurve c;
        double s = 0.0;
        Vec prev;
        for (const Vec& p : pts) {
            CurveSample smp;
            if (!c.samples.empty()) s += (p - prev).norm();
            smp.s = s;
            smp.x = p;
            smp.T = vec2(1, 0);
            smp.nu = vec2(0, 1);
            c.samples.push_back(smp);
            prev = p;
        }
        return c;
    };
    const SolitonCurve a = polyline({vec2(-1, 0), vec2(1, 0)});
    const SolitonCurve b = polyline({vec2(0, -1), vec2(0, 1)});
    CHECK(count_intersections(a, b, 1e-6).count == 1);

    const SolitonCurve par = polyline({vec2(-1, 0.5), vec2(1, 0.5)});
    CHECK(count_intersections(a, par, 1e-6).count == 0);

    CHECK_THROWS_AS(count_intersections(a, a, 1e-6), DegenerateInputError);

    // two crossings closer than tol merge into one
    const SolitonCurve zig = polyline(
        {vec2(-4e-7, -1e-9), vec2(0, 1e-9), vec2(4e-7, -1e-9)});
    CHECK(count_intersections(a, zig, 1e-6).count == 1);
    // and stay separate when wider than tol
    const SolitonCurve zig2 = polyline(
        {vec2(-4e-4, -1e-9), vec2(0, 1e-9), vec2(4e-4, -1e-9)});
    CHECK(count_intersections(a, zig2, 1e-6).count == 2);

    // endpoint touch is not a transversal crossing
    const SolitonCurve touch = polyline({vec2(1, 0), vec2(2, 1)});
    CHECK(count_intersections(a, touch, 1e-6).count == 0);
}

TEST_CASE("coarse sampling raises the density warning") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 8.0));
    SolitonIntegrationOptions coarse;
    coarse.max_step = 0.5;
    CurveState st{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve a = integrate_soliton(g, rotation_field(1.0), st, 3.0, coarse);
    CurveState st2{vec2(-1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve b = integrate_soliton(g, rotation_field(1.0), st2, 3.0, coarse);
    CHECK(count_intersections(a, b, 1e-6).density_warning);
}

TEST_CASE("uniform resampling preserves the curve") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 8.0));
    CurveState st{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve c = integrate_soliton(g, rotation_field(1.0), st, 3.0);
    const SolitonCurve r = resample_uniform(c, 500);
    REQUIRE(r.samples.size() == 500);
    for (const auto& s : r.samples)
        CHECK((c.position_at(s.s) - s.x).norm() < 1e-12);
    const double ds = r.samples[1].s - r.samples[0].s;
    for (std::size_t i = 1; i < r.samples.size(); ++i)
        CHECK(r.samples[i].s - r.samples[i - 1].s == doctest::Approx(ds).epsilon(1e-12));
}

TEST_CASE("two yin-yang curves intersect at most once") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 8.0));
    const VectorFieldSpec X = rotation_field(1.0);
    SolitonIntegrationOptions opts;
    opts.max_step = 1e-2;
    auto yy = [&](const Vec& p) {
        CurveState st{p, vec2(0.0, 1.0), 0.0};
        return integrate_soliton(g, X, st, 12.0, opts);
    };
    const auto res = count_intersections(yy(vec2(1.0, 0.0)), yy(vec2(1.5, 0.5)), 1e-6);
    CHECK(res.count == 1);
}

TEST_CASE("stationarity under the generating flow") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 6.0));
    CurveState st{vec2(0.0, 0.0), vec2(1.0, 0.0), 0.0};
    const SolitonCurve line = integrate_soliton(g, zero_field(2), st, 2.0);
    CHECK(stationarity_check(g, zero_field(2), line, 1e-4) < 1e-12);

    CurveState c0{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve yy = integrate_soliton(g, rotation_field(1.0), c0, 5.0);
    CHECK(stationarity_check(g, rotation_field(1.0), yy, 1e-4) < 1e-5);

    const MetricChart gr = euclidean_metric(2, Box::of({-1.55, 1.55, -0.5, 2.5}));
    const VectorFieldSpec tr = translation_field(vec2(0.0, -1.0));
    CurveState a0{vec2(0.0, 0.0), vec2(1.0, 0.0), 0.0};
    const SolitonCurve reaper = integrate_soliton(gr, tr, a0, 2.0);
    CHECK(stationarity_check(gr, tr, reaper, 1e-4) < 1e-5);
}

TEST_CASE("curve CSV round trip") {
    const MetricChart g = euclidean_metric(2);
    CurveState st{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    SolitonIntegrationOptions opts;
    opts.max_step = 0.05;
    const SolitonCurve c = integrate_soliton(g, radial_field(2), st, 1.0, opts);
    std::stringstream ss;
    write_curve_csv(ss, c, {"unit-test"});
    const SolitonCurve back = read_curve_csv(ss);
    REQUIRE(back.samples.size() == c.samples.size());
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
        CHECK(back.samples[i].s == c.samples[i].s);
        CHECK((back.samples[i].x - c.samples[i].x).norm() == 0.0);
        CHECK(back.samples[i].kappa_g == c.samples[i].kappa_g);
    }
    CHECK(back.metric_name == c.metric_name);
}
