#include "solitonlab/fields.hpp"

#include <cmath>

#include "solitonlab/errors.hpp"
#include "solitonlab/ode.hpp"

namespace solitonlab {

namespace {

double point_scale(const Vec& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

Covector flat(const MetricChart& metric, const VectorFieldSpec& X) {
    if (X.dim != metric.dim())
        throw DimensionError("flat: field dimension does not match metric dimension");
    const MetricChart g = metric;
    const VectorFieldSpec f = X;
    Covector w;
    w.dim = X.dim;
    w.eval = [g, f](const Vec& x) -> Vec { return g.value(x) * f.eval(x); };
    return w;
}

VectorFieldSpec sharp(const MetricChart& metric, const Covector& w) {
    if (w.dim != metric.dim())
        throw DimensionError("sharp: covector dimension does not match metric dimension");
    const MetricChart g = metric;
    const Covector cw = w;
    VectorFieldSpec X;
    X.dim = w.dim;
    X.name = "sharp";
    X.eval = [g, cw](const Vec& x) -> Vec { return g.inverse(x) * cw.eval(x); };
    return X;
}

double circulation(const MetricChart& metric, const VectorFieldSpec& X, const Vec& base,
                   int axis_i, int axis_j, double ai, double bi, double aj, double bj) {
    const Covector w = flat(metric, X);
    const double tol = 1e-12;
    auto along = [&](int moving_axis, int comp, double fixed_i, double fixed_j) {
        return [&, moving_axis, comp, fixed_i, fixed_j](double t) {
            Vec x = base;
            x[axis_i] = fixed_i;
            x[axis_j] = fixed_j;
            x[moving_axis] = t;
            return w.eval(x)[comp];
        };
    };
    double c = 0.0;
    c += integrate_1d(along(axis_i, axis_i, 0.0, aj), ai, bi, tol);
    c += integrate_1d(along(axis_j, axis_j, bi, 0.0), aj, bj, tol);
    c -= integrate_1d(along(axis_i, axis_i, 0.0, bj), ai, bi, tol);
    c -= integrate_1d(along(axis_j, axis_j, ai, 0.0), aj, bj, tol);
    return c;
}

ClosednessReport closedness_test(const MetricChart& metric, const VectorFieldSpec& X,
                                 int grid_resolution, double tol) {
    if (grid_resolution < 3)
        throw ConfigError("closedness_test: grid resolution must be at least 3 per axis");
    const int n = metric.dim();
    const Covector w = flat(metric, X);
    const double h = metric.fd().h1;
    const Box& box = metric.domain();
    const double margin = 2.0 * h * std::max(point_scale(box.lo), point_scale(box.hi));

    ClosednessReport rep;
    rep.tolerance = tol;
    rep.grid_resolution = grid_resolution;
    rep.worst_point = box.center();

    // iterate the full tensor grid via an odometer over the axes
    std::vector<int> idx(n, 0);
    Vec x(n);
    const long total = static_cast<long>(std::pow(grid_resolution, n));
    for (long cnt = 0; cnt < total; ++cnt) {
        for (int a = 0; a < n; ++a) {
            const double lo = box.lo[a] + margin, hi = box.hi[a] - margin;
            x[a] = lo + (hi - lo) * idx[a] / (grid_resolution - 1);
        }
        const double hs = h * point_scale(x);
        // d(w)_ij = d_i w_j - d_j w_i by central differences
        std::vector<Vec> dwd(n);
        Vec xp = x, xm = x;
        for (int a = 0; a < n; ++a) {
            xp[a] = x[a] + hs;
            xm[a] = x[a] - hs;
            dwd[a] = (w.eval(xp) - w.eval(xm)) / (2.0 * hs);
            xp[a] = x[a];
            xm[a] = x[a];
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double r = std::abs(dwd[i][j] - dwd[j][i]);
                if (r > rep.max_curl_residual) {
                    rep.max_curl_residual = r;
                    rep.worst_point = x;
                }
            }
        // odometer increment
        for (int a = 0; a < n; ++a) {
            if (++idx[a] < grid_resolution) break;
            idx[a] = 0;
        }
    }

    // circulation witnesses around centered rectangles in each coordinate plane
    const Vec c = box.center();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (double s : {0.25, 0.5, 0.75}) {
                const double ei = 0.5 * s * (box.hi[i] - box.lo[i] - 2.0 * margin);
                const double ej = 0.5 * s * (box.hi[j] - box.lo[j] - 2.0 * margin);
                LoopIntegral li;
                li.descriptor = "rect(axes " + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ", scale " + std::to_string(s) + ")";
                li.value = circulation(metric, X, c, i, j, c[i] - ei, c[i] + ei,
                                       c[j] - ej, c[j] + ej);
                rep.loop_integrals.push_back(li);
            }

    rep.is_closed = rep.max_curl_residual <= tol;
    return rep;
}

ConformalFactor recover_potential(const MetricChart& metric, const VectorFieldSpec& X,
                                  const Vec& base_point, const ClosednessReport& witness,
                                  double quad_tol) {
    if (!witness.is_closed)
        throw PreconditionError(
            "recover_potential: field '" + X.name +
            "' is not closed at the requested tolerance (max curl residual " +
            std::to_string(witness.max_curl_residual) + "); refusing to integrate a potential");
    const Box box = metric.domain();
    if (!box.contains(base_point))
        throw DomainError("recover_potential: base point outside the chart domain");

    const Covector w = flat(metric, X);
    const int n = metric.dim();
    const Vec base = base_point;
    const double tol_leg = quad_tol / n;

    auto u_eval = [w, base, box, n, tol_leg](const Vec& x) -> double {
        if (!box.contains(x))
            throw DomainError("recover_potential: staircase path endpoint outside the domain");
        // axis-ordered staircase: leg k moves coordinate k from base_k to x_k
        double u = 0.0;
        Vec cur = base;
        for (int k = 0; k < n; ++k) {
            const double a = base[k], b = x[k];
            if (a != b) {
                Vec probe = cur;
                auto fk = [&w, &probe, k](double t) mutable {
                    probe[k] = t;
                    return w.eval(probe)[k];
                };
                u += integrate_1d(fk, a, b, tol_leg);
            }
            cur[k] = b;
        }
        return u;
    };

    ConformalFactor out;
    out.u = u_eval;
    out.grad = [w](const Vec& x) { return w.eval(x); }; // du = X_flat by construction
    out.name = "potential(" + X.name + ")";

    // verify: central differences of u against X_flat on a coarse interior
    // sample; the threshold allows for quadrature noise amplified by the
    // differencing step
    const double hv = 1e-4;
    double wmax = 0.0, dev = 0.0;
    std::vector<int> idx(n, 0);
    Vec x(n);
    const long total = static_cast<long>(std::pow(3, n));
    for (long cnt = 0; cnt < total; ++cnt) {
        for (int a = 0; a < n; ++a) {
            const double lo = box.lo[a], hi = box.hi[a];
            const double pad = 0.1 * (hi - lo);
            x[a] = lo + pad + (hi - lo - 2.0 * pad) * idx[a] / 2.0;
        }
        const Vec wx = w.eval(x);
        wmax = std::max(wmax, wx.cwiseAbs().maxCoeff());
        Vec xp = x, xm = x;
        for (int a = 0; a < n; ++a) {
            xp[a] = x[a] + hv;
            xm[a] = x[a] - hv;
            dev = std::max(dev, std::abs((u_eval(xp) - u_eval(xm)) / (2.0 * hv) - wx[a]));
            xp[a] = x[a];
            xm[a] = x[a];
        }
        for (int a = 0; a < n; ++a) {
            if (++idx[a] < 3) break;
            idx[a] = 0;
        }
    }
    const double verify_tol = std::max(1e3 * quad_tol, 2e-6) * (1.0 + wmax);
    if (dev > verify_tol)
        throw NumericalError("recover_potential: recovered potential gradient deviates from "
                             "the flat of the field by " + std::to_string(dev));
    return out;
}

Vec flow(const VectorFieldSpec& X, const Box& domain, const Vec& p, double t, double tol) {
    if (!domain.contains(p)) throw DomainError("flow: initial point outside the domain");
    const VectorFieldSpec f = X;
    OdeRhs rhs = [f](double, const Vec& y, Vec& dy) { dy = f.eval(y); };
    OdeOptions opts;
    opts.rtol = tol;
    opts.atol = tol * 1e-3;
    OdeGuard guard = [&domain](const Vec& y) { return domain.contains(y); };
    OdeResult res = integrate_adaptive(rhs, 0.0, t, p, opts, nullptr, nullptr, guard);
    if (res.status == OdeStatus::DomainExit)
        throw DomainExitError("flow: trajectory left the domain at time " +
                                  std::to_string(res.t),
                              res.t, std::vector<double>(res.y.data(), res.y.data() + res.y.size()));
    if (res.status == OdeStatus::StepUnderflow)
        throw NumericalError("flow: step size underflow", res.t,
                             std::vector<double>(res.y.data(), res.y.data() + res.y.size()));
    return res.y;
}

VectorFieldSpec zero_field(int dim) {
    VectorFieldSpec X;
    X.dim = dim;
    X.name = "zero";
    X.eval = [dim](const Vec&) { return Vec::Zero(dim).eval(); };
    return X;
}

VectorFieldSpec radial_field(int dim) {
    VectorFieldSpec X;
    X.dim = dim;
    X.name = "radial";
    X.eval = [](const Vec& x) { return x; };
    return X;
}

VectorFieldSpec rotation_field(double omega, int dim) {
    if (dim < 2) throw DimensionError("rotation_field requires dim >= 2");
    VectorFieldSpec X;
    X.dim = dim;
    X.name = "rotation(omega=" + std::to_string(omega) + ")";
    X.eval = [omega, dim](const Vec& x) {
        Vec v = Vec::Zero(dim);
        v[0] = -omega * x[1];
        v[1] = omega * x[0];
        return v;
    };
    return X;
}

VectorFieldSpec translation_field(const Vec& direction) {
    VectorFieldSpec X;
    X.dim = static_cast<int>(direction.size());
    X.name = "translation";
    const Vec d = direction;
    X.eval = [d](const Vec&) { return d; };
    return X;
}

} // namespace solitonlab
