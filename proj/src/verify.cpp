#include "solitonlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "solitonlab/equivalence.hpp"
#include "solitonlab/errors.hpp"
#include "solitonlab/fields.hpp"
#include "solitonlab/geometry.hpp"
#include "solitonlab/hypersurface.hpp"
#include "solitonlab/rng.hpp"
#include "solitonlab/soliton.hpp"
#include "solitonlab/weyl.hpp"

namespace solitonlab {

namespace {

struct Ctx {
    VerifyOptions opts;
    std::vector<CriterionRow> rows;

    void row(const std::string& id, const std::string& name, double value, double threshold,
             const std::string& detail = "") {
        CriterionRow r;
        r.id = id;
        r.name = name;
        r.value = value;
        r.threshold = threshold * opts.tighten;
        r.pass = value <= r.threshold;
        r.detail = detail;
        rows.push_back(std::move(r));
    }
};

double max_sample_residual(const SolitonCurve& c) {
    double m = 0.0;
    for (const auto& s : c.samples) m = std::max(m, s.residual);
    return m;
}

// 1. gradient criterion on [-1,1]^2, grid 65^2
void c1_gradient_criterion(Ctx& ctx) {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 1.0));
    const auto vrot = decide(g, rotation_field(1.0), 65, 1e-6);
    const bool rot_kind_ok = vrot.kind == VerdictKind::NotGradient;
    ctx.row("c1a", "rotation field classified NOT_GRADIENT",
            rot_kind_ok ? 0.0 : 1.0, 0.5);
    ctx.row("c1b", "rotation field witness residual = 2",
            std::abs(vrot.witness.max_curl_residual - 2.0), 1e-5);

    const auto vrad = decide(g, radial_field(2), 65, 1e-6);
    const bool rad_kind_ok = vrad.kind == VerdictKind::Gradient;
    ctx.row("c1c", "radial field classified GRADIENT", rad_kind_ok ? 0.0 : 1.0, 0.5);
    double dev = rad_kind_ok ? 0.0 : 1.0;
    if (rad_kind_ok) {
        const auto& u = *vrad.potential;
        const double u0 = u(vrad.base_point) -
                          0.5 * vrad.base_point.squaredNorm();
        dev = 0.0;
        for (int i = 0; i < 33; ++i)
            for (int j = 0; j < 33; ++j) {
                Vec p = vec2(-0.9 + 1.8 * i / 32.0, -0.9 + 1.8 * j / 32.0);
                dev = std::max(dev, std::abs(u(p) - 0.5 * p.squaredNorm() - u0));
            }
    }
    ctx.row("c1d", "recovered potential matches (x^2+y^2)/2", dev, 1e-6);
}

// 2. sign pin: unit circle / unit sphere solve the equation for X(p) = p
void c2_sign_pin(Ctx& ctx) {
    const MetricChart g2 = euclidean_metric(2);
    CurveState st;
    st.x = vec2(1.0, 0.0);
    st.T = vec2(0.0, 1.0);
    const SolitonCurve circle = integrate_soliton(g2, radial_field(2), st, 6.28);
    ctx.row("c2a", "unit circle soliton residual (X = p)", max_sample_residual(circle), 1e-6);
    double circle_dev = 0.0;
    for (const auto& s : circle.samples)
        circle_dev = std::max(circle_dev, std::abs(s.x.norm() - 1.0));
    ctx.row("c2b", "unit circle stays on the circle", circle_dev, 1e-7);

    const MetricChart g3 = euclidean_metric(3);
    const auto grid3 = param_grid(sphere_patch(3, 1.0), 7);
    ctx.row("c2c", "unit sphere soliton residual (X = p)",
            soliton_residual(g3, radial_field(3), sphere_patch(3, 1.0), grid3), 1e-6);
    const double r2 = soliton_residual(g3, radial_field(3), sphere_patch(3, 2.0),
                                       param_grid(sphere_patch(3, 2.0), 7));
    ctx.row("c2d", "radius-2 sphere residual = 1.5", std::abs(r2 - 1.5), 1e-3);
}

SolitonCurve reaper_half(const MetricChart& g, double dir) {
    CurveState st;
    st.x = vec2(0.0, 0.0);
    st.T = vec2(dir, 0.0);
    return integrate_soliton(g, translation_field(vec2(0.0, -1.0)), st, 2.46);
}

// 3. grim reaper closed form y = -ln cos x on |x| <= 1.4
void c3_grim_reaper(Ctx& ctx) {
    const MetricChart g = euclidean_metric(2, Box::of({-1.55, 1.55, -0.5, 2.5}));
    double dev = 0.0;
    for (double dir : {1.0, -1.0}) {
        const SolitonCurve half = reaper_half(g, dir);
        for (const auto& s : half.samples)
            if (std::abs(s.x[0]) <= 1.4)
                dev = std::max(dev, std::abs(s.x[1] + std::log(std::cos(s.x[0]))));
    }
    ctx.row("c3a", "grim reaper matches y = -ln cos x", dev, 1e-6);
}

// 4. conformal bridge: gbar-minimality of gradient-field solitons
void c4_conformal_bridge(Ctx& ctx) {
    // (a) u = -y on the plane; 5 seeded translating curves vs Levi-Civita of
    // e^{2y} * euclidean
    const MetricChart g = euclidean_metric(2, Box::of({-4.0, 4.0, -8.0, 8.0}));
    ConformalFactor u;
    u.name = "-y";
    u.u = [](const Vec& p) { return -p[1]; };
    u.grad = [](const Vec&) { return vec2(0.0, -1.0); };
    CertifyOptions copts;
    copts.seed = ctx.opts.seed;
    copts.jobs = ctx.opts.jobs;
    const CertificationReport rep = certify_gradient_case(g, u, copts);
    ctx.row("c4a", "5 seeded curves: gbar-geodesic residual (u = -y)", rep.max_paired, 1e-5,
            "dropped " + std::to_string(rep.drop_count) + "/" + std::to_string(rep.total));
    ctx.row("c4b", "no dropped samples", static_cast<double>(rep.drop_count), 0.5);

    // (b) u = |p|^2/2 in R^3; unit sphere becomes minimal in gbar
    const MetricChart g3 = euclidean_metric(3);
    ConformalFactor u3;
    u3.name = "|p|^2/2";
    u3.u = [](const Vec& p) { return 0.5 * p.squaredNorm(); };
    u3.grad = [](const Vec& p) { return p; };
    const ImmersedPatch sphere = sphere_patch(3, 1.0);
    double sup = 0.0;
    for (const Vec& t : param_grid(sphere, 7))
        sup = std::max(sup, std::abs(conformal_mean_curvature(g3, u3, sphere, t)));
    ctx.row("c4c", "unit sphere |Hbar| in e^{-|p|^2} metric", sup, 1e-6);
}

// 5. soliton curves are unparametrized geodesics of the Weyl connection
void c5_weyl_geodesics(Ctx& ctx) {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 6.0));
    const VectorFieldSpec rot = rotation_field(1.0);
    CertifyOptions copts;
    copts.seed = ctx.opts.seed;
    copts.jobs = ctx.opts.jobs;
    const CertificationReport rep = demonstrate_surface_gap(g, rot, copts);
    ctx.row("c5a", "5 seeded yin-yang curves: Weyl residual", rep.max_paired, 1e-5,
            "dropped " + std::to_string(rep.drop_count) + "/" + std::to_string(rep.total));
    ctx.row("c5b", "witness residual = 2 (non-gradient rotation field)",
            rep.verdict ? std::abs(rep.verdict->witness.max_curl_residual - 2.0) : 1.0, 1e-5);

    // same procedure on the round-sphere chart
    const MetricChart gs = sphere_stereographic_metric(2, Box::cube(2, 10.0));
    const AffineConnection conn = AffineConnection::weyl(gs, rot);
    SplitMix64 root(ctx.opts.seed ^ 0x5bd1e995u);
    double sup = 0.0;
    int dropped = 0;
    for (int i = 0; i < 5; ++i) {
        SplitMix64 rng = root.split(static_cast<std::uint64_t>(i));
        CurveState st;
        st.x = vec2(rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7));
        const double ang = rng.uniform(0.0, 2.0 * M_PI);
        st.T = vec2(std::cos(ang), std::sin(ang));
        const SolitonCurve c = integrate_soliton(gs, rot, st, 1.2);
        if (!c.complete || c.samples.size() < 5) {
            ++dropped;
            continue;
        }
        sup = std::max(sup, unparam_residual(conn, c).sup);
    }
    ctx.row("c5c", "sphere-chart yin-yang curves: Weyl residual", sup, 1e-4,
            "dropped " + std::to_string(dropped) + "/5");
}

// 6. figure-style intersection bound for yin-yang pairs
void c6_intersections(Ctx& ctx) {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 8.0));
    const VectorFieldSpec rot = rotation_field(1.0);
    SolitonIntegrationOptions iopts;
    iopts.max_step = 1e-2;
    auto trace = [&](const Vec& x0, const Vec& T0) {
        CurveState st;
        st.x = x0;
        st.T = T0;
        return integrate_soliton(g, rot, st, 12.0, iopts);
    };
    const SolitonCurve a = trace(vec2(1.0, 0.0), vec2(0.0, 1.0));
    const SolitonCurve b = trace(vec2(1.5, 0.5), vec2(0.0, 1.0));
    const auto preset = count_intersections(a, b, 1e-6);
    ctx.row("c6a", "shipped preset pair intersects exactly once",
            std::abs(preset.count - 1.0), 0.5);

    SplitMix64 root(ctx.opts.seed ^ 0x9e3779b9u);
    int worst = 0;
    for (int i = 0; i < 20; ++i) {
        SplitMix64 rng = root.split(static_cast<std::uint64_t>(i));
        const Vec p = vec2(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
        const Vec q = vec2(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
        if ((p - q).norm() < 0.1) continue;
        const double a1 = rng.uniform(0.0, 2.0 * M_PI), a2 = rng.uniform(0.0, 2.0 * M_PI);
        const auto ca = trace(p, vec2(std::cos(a1), std::sin(a1)));
        const auto cb = trace(q, vec2(std::cos(a2), std::sin(a2)));
        worst = std::max(worst, count_intersections(ca, cb, 1e-6).count);
    }
    ctx.row("c6b", "20 seeded yin-yang pairs: max intersection count",
            static_cast<double>(worst), 1.0);
}

// 7. stationarity of the named Killing-field solitons
void c7_stationarity(Ctx& ctx) {
    const MetricChart g = euclidean_metric(2, Box::cube(2, 6.0));
    CurveState st;
    st.x = vec2(1.0, 0.0);
    st.T = vec2(0.0, 1.0);
    const SolitonCurve yy = integrate_soliton(g, rotation_field(1.0), st, 6.0);
    ctx.row("c7a", "yin-yang stationarity residual (dt = 1e-4)",
            stationarity_check(g, rotation_field(1.0), yy, 1e-4), 1e-5);

    const MetricChart gr = euclidean_metric(2, Box::of({-1.55, 1.55, -0.5, 2.5}));
    const SolitonCurve reaper = reaper_half(gr, 1.0);
    ctx.row("c7b", "grim reaper stationarity residual (dt = 1e-4)",
            stationarity_check(gr, translation_field(vec2(0.0, -1.0)), reaper, 1e-4), 1e-5);
}

// 8. dimension robustness: ambient dimension 4
void c8_dimension4(Ctx& ctx) {
    const MetricChart g4 = euclidean_metric(4, Box::cube(4, 3.0));
    const ImmersedPatch s3 = sphere_patch(4, 1.0);
    ctx.row("c8a", "unit S^3 soliton residual (X = p)",
            soliton_residual(g4, radial_field(4), s3, param_grid(s3, 4)), 1e-6);
    const ImmersedPatch s3r2 = sphere_patch(4, 2.0);
    const double r2 = soliton_residual(g4, radial_field(4), s3r2, param_grid(s3r2, 4));
    ctx.row("c8b", "radius-2 S^3 residual = 1.5", std::abs(r2 - 1.5), 1e-3);

    const MetricChart g4s = euclidean_metric(4, Box::cube(4, 1.0));
    const auto v = decide(g4s, radial_field(4), 9, 1e-6);
    ctx.row("c8c", "radial field in R^4 classified GRADIENT",
            v.kind == VerdictKind::Gradient ? 0.0 : 1.0, 0.5);
    double dev = 1.0;
    if (v.kind == VerdictKind::Gradient) {
        dev = 0.0;
        const auto& u = *v.potential;
        const double u0 = u(v.base_point) - 0.5 * v.base_point.squaredNorm();
        SplitMix64 rng(ctx.opts.seed ^ 0x1234u);
        for (int i = 0; i < 20; ++i) {
            Vec p(4);
            for (int a = 0; a < 4; ++a) p[a] = rng.uniform(-0.8, 0.8);
            dev = std::max(dev, std::abs(u(p) - 0.5 * p.squaredNorm() - u0));
        }
    }
    ctx.row("c8d", "R^4 potential matches |p|^2/2", dev, 1e-6);

    ConformalFactor u4;
    u4.name = "|p|^2/2";
    u4.u = [](const Vec& p) { return 0.5 * p.squaredNorm(); };
    u4.grad = [](const Vec& p) { return p; };
    double sup = 0.0;
    for (const Vec& t : param_grid(s3, 4))
        sup = std::max(sup, std::abs(conformal_mean_curvature(g4, u4, s3, t)));
    ctx.row("c8e", "unit S^3 |Hbar| in e^{-|p|^2} metric", sup, 1e-6);
}

// 9. reproducibility of seeded certification reports across runs and jobs
void c9_reproducibility(Ctx& ctx) {
    const MetricChart g = euclidean_metric(2, Box::of({-4.0, 4.0, -8.0, 8.0}));
    ConformalFactor u;
    u.name = "-y";
    u.u = [](const Vec& p) { return -p[1]; };
    u.grad = [](const Vec&) { return vec2(0.0, -1.0); };

    auto run = [&](int jobs) {
        CertifyOptions copts;
        copts.seed = ctx.opts.seed;
        copts.jobs = jobs;
        return report_to_json(certify_gradient_case(g, u, copts)).dump();
    };
    const std::string j1 = run(1);
    const std::string j8 = run(8);
    const std::string j1b = run(1);
    ctx.row("c9a", "certification JSON identical across --jobs 1 vs 8",
            j1 == j8 ? 0.0 : 1.0, 0.5);
    ctx.row("c9b", "certification JSON identical across repeated runs",
            j1 == j1b ? 0.0 : 1.0, 0.5);

    const MetricChart gy = euclidean_metric(2, Box::cube(2, 6.0));
    CertifyOptions gopts;
    gopts.seed = ctx.opts.seed;
    gopts.jobs = 1;
    const std::string s1 = report_to_json(demonstrate_surface_gap(gy, rotation_field(1.0),
                                                                  gopts)).dump();
    gopts.jobs = 8;
    const std::string s8 = report_to_json(demonstrate_surface_gap(gy, rotation_field(1.0),
                                                                  gopts)).dump();
    ctx.row("c9c", "surface-gap JSON identical across --jobs 1 vs 8",
            s1 == s8 ? 0.0 : 1.0, 0.5);
}

using CriterionFn = void (*)(Ctx&);

const std::vector<std::pair<std::string, CriterionFn>>& criteria() {
    static const std::vector<std::pair<std::string, CriterionFn>> table = {
        {"c1", &c1_gradient_criterion}, {"c2", &c2_sign_pin},
        {"c3", &c3_grim_reaper},        {"c4", &c4_conformal_bridge},
        {"c5", &c5_weyl_geodesics},     {"c6", &c6_intersections},
        {"c7", &c7_stationarity},       {"c8", &c8_dimension4},
        {"c9", &c9_reproducibility},
    };
    return table;
}

} // namespace

std::vector<std::string> acceptance_suite_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, fn] : criteria()) ids.push_back(id);
    return ids;
}

std::vector<CriterionRow> run_acceptance(const VerifyOptions& opts) {
    std::vector<std::string> wanted = opts.suites;
    if (!wanted.empty()) {
        for (const auto& w : wanted) {
            bool known = false;
            for (const auto& [id, fn] : criteria()) known = known || id == w;
            if (!known) throw ConfigError("unknown acceptance suite '" + w + "'");
        }
    }
    Ctx ctx;
    ctx.opts = opts;
    for (const auto& [id, fn] : criteria()) {
        if (!wanted.empty() &&
            std::find(wanted.begin(), wanted.end(), id) == wanted.end())
            continue;
        fn(ctx);
    }
    return ctx.rows;
}

nlohmann::ordered_json verify_to_json(const std::vector<CriterionRow>& rows,
                                      const VerifyOptions& opts) {
    nlohmann::ordered_json j;
    j["schema"] = "solitonlab.verify.v1";
    j["seed"] = opts.seed;
    j["tighten"] = opts.tighten;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& r : rows) {
        nlohmann::ordered_json rr;
        rr["id"] = r.id;
        rr["name"] = r.name;
        rr["value"] = r.value;
        rr["threshold"] = r.threshold;
        rr["pass"] = r.pass;
        if (!r.detail.empty()) rr["detail"] = r.detail;
        arr.push_back(rr);
        all = all && r.pass;
    }
    j["criteria"] = arr;
    j["pass"] = all;
    return j;
}

} // namespace solitonlab
