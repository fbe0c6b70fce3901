#include "solitonlab/weyl.hpp"

#include <cmath>

#include "solitonlab/errors.hpp"
#include "solitonlab/ode.hpp"

namespace solitonlab {

AffineConnection::AffineConnection(MetricChart m, VectorFieldSpec X)
    : metric_(std::move(m)), X_(std::move(X)) {
    if (X_.dim != metric_.dim())
        throw DimensionError("AffineConnection: field dimension does not match the metric");
}

AffineConnection AffineConnection::levi_civita(MetricChart metric) {
    const int d = metric.dim();
    return AffineConnection(std::move(metric), zero_field(d));
}

AffineConnection AffineConnection::weyl(MetricChart metric, VectorFieldSpec X) {
    return AffineConnection(std::move(metric), std::move(X));
}

Vec AffineConnection::coefficients(const Vec& x, const Vec& v, const Vec& w) const {
    const Christoffels gamma = christoffel(metric_, x);
    Vec out = gamma.apply(v, w);
    const Mat g = metric_.value(x);
    const Vec Xx = X_.eval(x);
    const double gvw = v.dot(g * w);
    const double gXv = Xx.dot(g * v);
    const double gXw = Xx.dot(g * w);
    out += gvw * Xx - gXv * w - gXw * v;
    return out;
}

ParamCurve ParamCurve::from_soliton(const SolitonCurve& c) {
    ParamCurve out;
    out.complete = c.complete;
    out.t.reserve(c.samples.size());
    out.x.reserve(c.samples.size());
    out.v.reserve(c.samples.size());
    for (const auto& s : c.samples) {
        out.t.push_back(s.s);
        out.x.push_back(s.x);
        out.v.push_back(s.T);
    }
    return out;
}

ParamCurve integrate_weyl_geodesic(const AffineConnection& conn, const Vec& x0, const Vec& v0,
                                   double param_length, const GeodesicOptions& opts) {
    const int d = conn.base_metric().dim();
    if (x0.size() != d || v0.size() != d)
        throw DimensionError("integrate_weyl_geodesic: initial data dimension mismatch");
    if (!conn.base_metric().domain().contains(x0))
        throw DomainError("integrate_weyl_geodesic: initial point outside the domain");

    OdeRhs rhs = [&conn, d](double, const Vec& y, Vec& dy) {
        const Vec x = y.head(d);
        const Vec v = y.tail(d);
        dy.resize(2 * d);
        dy.head(d) = v;
        dy.tail(d) = -conn.coefficients(x, v, v);
    };
    OdeGuard guard = [&conn, d](const Vec& y) {
        return conn.base_metric().domain().contains(y.head(d));
    };
    ParamCurve curve;
    OdeObserver observer = [&curve, d](double t, const Vec& y) {
        curve.t.push_back(t);
        curve.x.push_back(y.head(d));
        curve.v.push_back(y.tail(d));
    };

    Vec y0(2 * d);
    y0.head(d) = x0;
    y0.tail(d) = v0;
    OdeOptions oopts;
    oopts.rtol = opts.rtol;
    oopts.atol = opts.atol;
    oopts.max_step = opts.max_step;
    if (std::isfinite(opts.max_step) && param_length > 0.0)
        oopts.max_step = param_length / std::ceil(param_length / opts.max_step);

    OdeResult res = integrate_adaptive(rhs, 0.0, param_length, y0, oopts, observer,
                                       nullptr, guard);
    if (res.status == OdeStatus::StepUnderflow)
        throw NumericalError("integrate_weyl_geodesic: step size underflow", res.t,
                             std::vector<double>(res.y.data(), res.y.data() + res.y.size()));
    curve.complete = (res.status == OdeStatus::Done);
    return curve;
}

ResidualReport unparam_residual(const AffineConnection& conn, const ParamCurve& curve) {
    const std::size_t N = curve.t.size();
    if (N < 5)
        throw InsufficientDataError("unparam_residual: need at least 5 samples");
    const MetricChart& g = conn.base_metric();

    ResidualReport rep;
    rep.argmax_x = curve.x.front();
    double sum = 0.0;
    int cnt = 0;
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double hm = curve.t[i] - curve.t[i - 1];
        const double hp = curve.t[i + 1] - curve.t[i];
        const double denom = hm * hp * (hm + hp);
        // standard non-uniform 3-point stencils
        const Vec d1 = (hm * hm * curve.x[i + 1] - hp * hp * curve.x[i - 1] +
                        (hp * hp - hm * hm) * curve.x[i]) /
                       denom;
        const Vec d2 = 2.0 *
                       (hp * curve.x[i - 1] - (hm + hp) * curve.x[i] + hm * curve.x[i + 1]) /
                       denom;
        const Vec a = d2 + conn.coefficients(curve.x[i], d1, d1);
        const Mat gx = g.value(curve.x[i]);
        const double v2 = d1.dot(gx * d1);
        const Vec transverse = a - (a.dot(gx * d1) / v2) * d1;
        const double r = std::sqrt(std::max(0.0, transverse.dot(gx * transverse))) / v2;
        sum += r;
        ++cnt;
        if (r > rep.sup) {
            rep.sup = r;
            rep.argmax_t = curve.t[i];
            rep.argmax_x = curve.x[i];
        }
    }
    rep.mean = cnt ? sum / cnt : 0.0;
    rep.samples = cnt;
    return rep;
}

ResidualReport unparam_residual(const AffineConnection& conn, const SolitonCurve& curve) {
    return unparam_residual(conn, ParamCurve::from_soliton(curve));
}

} // namespace solitonlab
