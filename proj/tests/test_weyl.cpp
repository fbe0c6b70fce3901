#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "solitonlab/errors.hpp"
#include "solitonlab/rng.hpp"
#include "solitonlab/soliton.hpp"
#include "solitonlab/weyl.hpp"

using namespace solitonlab;

TEST_CASE("weyl coefficients: zero field, symmetry, hand evaluation") {
    const MetricChart g = euclidean_metric(2);
    const AffineConnection lc = AffineConnection::levi_civita(g);
    CHECK(lc.coefficients(vec2(0.3, 0.4), vec2(1, 2), vec2(-1, 0.5)).cwiseAbs().maxCoeff() <
          1e-14);

    // rotation field at (1,0) with v = w = (1,0): only the g(v,w) X term
    // survives, with the sign that makes solitons geodesics
    const AffineConnection conn = AffineConnection::weyl(g, rotation_field(1.0));
    const Vec c = conn.coefficients(vec2(1.0, 0.0), vec2(1.0, 0.0), vec2(1.0, 0.0));
    CHECK(c[0] == doctest::Approx(0.0));
    CHECK(c[1] == doctest::Approx(1.0));

    SplitMix64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const Vec x = vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const Vec v = vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Vec w = vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Vec a = conn.coefficients(x, v, w);
        const Vec b = conn.coefficients(x, w, v);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10); // torsion free
    }
}

TEST_CASE("zero field reduces to the Christoffel contraction") {
    const MetricChart g = polar_metric();
    const AffineConnection lc = AffineConnection::levi_civita(g);
    SplitMix64 rng(12);
    for (int i = 0; i < 20; ++i) {
        const Vec x = vec2(rng.uniform(0.5, 2.5), rng.uniform(-2, 2));
        const Vec v = vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Vec w = vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Vec a = lc.coefficients(x, v, w);
        const Vec b = christoffel(g, x).apply(v, w);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("weyl connection of a gradient field is Levi-Civita of the rescaled metric") {
    // the load-bearing identity: nabla_{g, grad u} == Levi-Civita(e^{-2u} g),
    // exactly, coefficient by coefficient
    struct Case {
        MetricChart g;
        ConformalFactor u;
    };
    ConformalFactor minus_y;
    minus_y.name = "-y";
    minus_y.u = [](const Vec& p) { return -p[1]; };
    minus_y.grad = [](const Vec&) { return vec2(0.0, -1.0); };
    ConformalFactor xy;
    xy.name = "0.3xy";
    xy.u = [](const Vec& p) { return 0.3 * p[0] * p[1]; };
    xy.grad = [](const Vec& p) { return vec2(0.3 * p[1], 0.3 * p[0]); };
    std::vector<Case> cases;
    cases.push_back({euclidean_metric(2), minus_y});
    cases.push_back({half_plane_metric(), xy});

    for (const auto& [g, u] : cases) {
        const MetricChart gbar = conformal_rescale(g, u);
        const AffineConnection lc_bar = AffineConnection::levi_civita(gbar);
        // X = sharp of du
        Covector du;
        du.dim = 2;
        const ConformalFactor uu = u;
        du.eval = [uu](const Vec& x) { return uu.grad(x); };
        const AffineConnection weyl_conn = AffineConnection::weyl(g, sharp(g, du));

        SplitMix64 rng(13);
        for (int i = 0; i < 20; ++i) {
            Vec x(2);
            for (int a = 0; a < 2; ++a) {
                const double lo = g.domain().lo[a], hi = g.domain().hi[a];
                x[a] = lo + (hi - lo) * (0.25 + 0.5 * rng.next_double());
            }
            const Vec v = vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
            const Vec w = vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
            const Vec a = weyl_conn.coefficients(x, v, w);
            const Vec b = lc_bar.coefficients(x, v, w);
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("levi-civita geodesics: straight lines, great circles, half-plane circles") {
    const MetricChart g = euclidean_metric(2);
    const AffineConnection lc = AffineConnection::levi_civita(g);
    const ParamCurve line = integrate_weyl_geodesic(lc, vec2(0, 0), vec2(0.7, 0.2), 2.0);
    for (std::size_t i = 0; i < line.x.size(); ++i)
        CHECK(std::abs(line.x[i][1] * 0.7 - line.x[i][0] * 0.2) < 1e-10);

    // sphere chart: from the origin with unit g-speed the affine parameter is
    // arclength and the chart radius obeys 2 atan(r) = t
    const MetricChart sph = sphere_stereographic_metric(2, Box::cube(2, 2.2));
    const AffineConnection lcs = AffineConnection::levi_civita(sph);
    const ParamCurve gc =
        integrate_weyl_geodesic(lcs, vec2(0, 0), vec2(0.5, 0.0), 2.0);
    CHECK(gc.complete);
    double worst = 0.0, ray_dev = 0.0;
    for (std::size_t i = 0; i < gc.t.size(); ++i) {
        worst = std::max(worst, std::abs(2.0 * std::atan(gc.x[i].norm()) - gc.t[i]));
        ray_dev = std::max(ray_dev, std::abs(gc.x[i][1]));
    }
    CHECK(worst < 1e-6);
    CHECK(ray_dev < 1e-9);

    // half-plane geodesic through (0,1) horizontal = unit circle
    const MetricChart hp = half_plane_metric();
    const AffineConnection lch = AffineConnection::levi_civita(hp);
    const ParamCurve semi = integrate_weyl_geodesic(lch, vec2(0, 1), vec2(1.0, 0.0), 1.5);
    double circ_dev = 0.0, speed_dev = 0.0;
    for (std::size_t i = 0; i < semi.t.size(); ++i) {
        circ_dev = std::max(circ_dev, std::abs(semi.x[i].norm() - 1.0));
        const double sp = hp.inner(semi.x[i], semi.v[i], semi.v[i]);
        speed_dev = std::max(speed_dev, std::abs(sp - 1.0));
    }
    CHECK(circ_dev < 1e-7);
    CHECK(speed_dev < 1.5e-6 * 1.5); // metric compatibility along the geodesic
}

TEST_CASE("radial field keeps radial weyl geodesics on the ray") {
    const MetricChart g = euclidean_metric(2);
    const AffineConnection conn = AffineConnection::weyl(g, radial_field(2));
    const ParamCurve ray = integrate_weyl_geodesic(conn, vec2(1.0, 0.0), vec2(0.4, 0.0), 1.0);
    for (const auto& x : ray.x) CHECK(std::abs(x[1]) < 1e-9);
}

TEST_CASE("unparametrized residual: self-consistency and soliton curves") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 6.0));
    const VectorFieldSpec rot = rotation_field(1.0);
    const AffineConnection conn = AffineConnection::weyl(g, rot);

    // a Weyl geodesic fed back in (gentle data so the stencil floor stays
    // below the self-consistency bound)
    const AffineConnection gentle = AffineConnection::weyl(g, rotation_field(0.3));
    GeodesicOptions gopts;
    gopts.max_step = 1e-3;
    const ParamCurve geo = integrate_weyl_geodesic(gentle, vec2(1.0, 0.0), vec2(0, 0.5), 1.5,
                                                   gopts);
    CHECK(unparam_residual(gentle, geo).sup < 1e-6);

    // straight line vs Levi-Civita
    const AffineConnection lc = AffineConnection::levi_civita(g);
    const ParamCurve line = integrate_weyl_geodesic(lc, vec2(0, 0), vec2(1, 0), 2.0);
    CHECK(unparam_residual(lc, line).sup < 1e-10);

    // yin-yang soliton curve against the rotation-field Weyl connection
    CurveState st{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve yy = integrate_soliton(g, rot, st, 5.0);
    const ResidualReport rep = unparam_residual(conn, yy);
    CHECK(rep.sup < 1e-5);
    CHECK(rep.samples == static_cast<int>(yy.samples.size()) - 2);

    CHECK_THROWS_AS(unparam_residual(conn, ParamCurve{}), InsufficientDataError);
}

TEST_CASE("gradient solitons are geodesics of the conformally rescaled metric") {
    // translating solitons of X = (0,-1) against Levi-Civita of e^{2y} g
    const MetricChart g = euclidean_metric(2, Box::of({-1.55, 1.55, -0.5, 2.5}));
    ConformalFactor u;
    u.name = "-y";
    u.u = [](const Vec& p) { return -p[1]; };
    u.grad = [](const Vec&) { return vec2(0.0, -1.0); };
    const MetricChart gbar = conformal_rescale(g, u);
    const AffineConnection lc_bar = AffineConnection::levi_civita(gbar);

    CurveState st{vec2(0.0, 0.0), vec2(1.0, 0.0), 0.0};
    const SolitonCurve reaper =
        integrate_soliton(g, translation_field(vec2(0.0, -1.0)), st, 2.0);
    CHECK(unparam_residual(lc_bar, reaper).sup < 1e-5);
}

TEST_CASE("residual is invariant under smooth monotone reparametrization") {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 6.0));
    const VectorFieldSpec rot = rotation_field(1.0);
    const AffineConnection conn = AffineConnection::weyl(g, rot);
    CurveState st{vec2(1.0, 0.0), vec2(0.0, 1.0), 0.0};
    const SolitonCurve yy = integrate_soliton(g, rot, st, 4.0);
    const double base = unparam_residual(conn, yy).sup;

    // resample positions along a warped parameter
    const double L = yy.samples.back().s;
    ParamCurve warped;
    const int N = 2500;
    for (int i = 0; i <= N; ++i) {
        const double tau = static_cast<double>(i) / N;
        const double s = L * (tau + 0.08 * std::sin(M_PI * tau));
        warped.t.push_back(tau);
        warped.x.push_back(yy.position_at(std::min(s, L)));
    }
    const double w = unparam_residual(conn, warped).sup;
    CHECK(w <= 2.0 * std::max(base, 5e-6));
}
