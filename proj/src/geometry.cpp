#include "solitonlab/geometry.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "solitonlab/errors.hpp"

namespace solitonlab {

bool Box::contains(const Vec& x, double margin) const {
    if (x.size() != lo.size()) return false;
    for (int i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] + margin || x[i] > hi[i] - margin) return false;
    return true;
}

double Box::boundary_margin(const Vec& x) const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < x.size(); ++i) {
        m = std::min(m, x[i] - lo[i]);
        m = std::min(m, hi[i] - x[i]);
    }
    return m;
}

Box Box::cube(int dim, double half_width) {
    Box b;
    b.lo = Vec::Constant(dim, -half_width);
    b.hi = Vec::Constant(dim, half_width);
    return b;
}

Box Box::of(std::initializer_list<double> lo_hi_pairs) {
    const int n = static_cast<int>(lo_hi_pairs.size()) / 2;
    Box b;
    b.lo = Vec(n);
    b.hi = Vec(n);
    auto it = lo_hi_pairs.begin();
    for (int i = 0; i < n; ++i) {
        b.lo[i] = *it++;
        b.hi[i] = *it++;
    }
    return b;
}

namespace {

double point_scale(const Vec& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }

void check_spd(const Mat& g, const Vec& x, const std::string& name) {
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DegenerateMetricError("metric '" + name + "' is not symmetric at the evaluation point");
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
        throw DegenerateMetricError("metric '" + name + "' is not positive definite at point [" +
                                    std::to_string(x[0]) + ", ...]");
}

} // namespace

MetricChart::MetricChart(int dim, Box domain, MatrixField g, std::string name,
                         MatrixFieldDeriv dg, FdOptions fd)
    : dim_(dim), domain_(std::move(domain)), g_(std::move(g)), name_(std::move(name)),
      dg_(std::move(dg)), fd_(fd) {
    if (domain_.dim() != dim_)
        throw DimensionError("metric '" + name_ + "': domain dimension does not match dim");
}

Mat MetricChart::value(const Vec& x) const {
    if (x.size() != dim_)
        throw DimensionError("metric '" + name_ + "': point dimension mismatch");
    Mat g = g_(x);
    check_spd(g, x, name_);
    return g;
}

Mat MetricChart::inverse(const Vec& x) const {
    Mat g = value(x);
    Eigen::LLT<Mat> llt(g);
    return llt.solve(Mat::Identity(dim_, dim_));
}

std::vector<Mat> MetricChart::partials(const Vec& x) const {
    if (dg_) return dg_(x);
    const double h = fd_.h1 * point_scale(x);
    if (!domain_.contains(x, h))
        throw DomainError("metric '" + name_ + "': point too close to the domain boundary for finite differences");
    std::vector<Mat> out(dim_);
    Vec xp = x, xm = x;
    for (int k = 0; k < dim_; ++k) {
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        out[k] = (value(xp) - value(xm)) / (2.0 * h);
        xp[k] = x[k];
        xm[k] = x[k];
    }
    return out;
}

double MetricChart::inner(const Vec& x, const Vec& v, const Vec& w) const {
    if (v.size() != dim_ || w.size() != dim_)
        throw DimensionError("metric '" + name_ + "': vector dimension mismatch");
    return v.dot(value(x) * w);
}

double MetricChart::norm(const Vec& x, const Vec& v) const {
    return std::sqrt(std::max(0.0, inner(x, v, v)));
}

Vec ConformalFactor::gradient(const Vec& x, const FdOptions& fd) const {
    if (grad) return grad(x);
    const double h = fd.h1 * point_scale(x);
    Vec g(x.size());
    Vec xp = x, xm = x;
    for (int k = 0; k < x.size(); ++k) {
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        g[k] = (u(xp) - u(xm)) / (2.0 * h);
        xp[k] = x[k];
        xm[k] = x[k];
    }
    return g;
}

ConformalFactor ConformalFactor::zero() {
    ConformalFactor f;
    f.u = [](const Vec&) { return 0.0; };
    f.grad = [](const Vec& x) { return Vec::Zero(x.size()).eval(); };
    f.name = "0";
    return f;
}

Vec Christoffels::apply(const Vec& v, const Vec& w) const {
    const int n = static_cast<int>(symbols.size());
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = v.dot(symbols[i] * w);
    return out;
}

Christoffels christoffel(const MetricChart& metric, const Vec& x) {
    const int n = metric.dim();
    const double h = metric.fd().h1 * point_scale(x);
    if (!metric.has_analytic_derivatives() && !metric.domain().contains(x, h))
        throw DomainError("christoffel: point too close to the domain boundary");
    const Mat ginv = metric.inverse(x);
    const std::vector<Mat> dg = metric.partials(x);

    // Koszul: Gamma^i_jk = 1/2 g^{il} (d_j g_lk + d_k g_lj - d_l g_jk)
    Christoffels out;
    out.symbols.assign(n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
                out.symbols[i](j, k) = 0.5 * s;
                out.symbols[i](k, j) = 0.5 * s;
            }
    return out;
}

namespace {

// Second partials of the metric: ddg[k][l](i,j) = d_k d_l g_ij. Uses central
// differences of the analytic partials when present, else of the metric
// values themselves.
std::vector<std::vector<Mat>> metric_second_partials(const MetricChart& m, const Vec& x) {
    const int n = m.dim();
    std::vector<std::vector<Mat>> dd(n, std::vector<Mat>(n));
    if (m.has_analytic_derivatives()) {
        const double h = m.fd().h1 * point_scale(x);
        Vec xp = x, xm = x;
        for (int k = 0; k < n; ++k) {
            xp[k] = x[k] + h;
            xm[k] = x[k] - h;
            auto dp = m.partials(xp);
            auto dm = m.partials(xm);
            for (int l = 0; l < n; ++l) dd[k][l] = (dp[l] - dm[l]) / (2.0 * h);
            xp[k] = x[k];
            xm[k] = x[k];
        }
        return dd;
    }
    const double h = m.fd().h2 * point_scale(x);
    if (!m.domain().contains(x, 2.0 * h))
        throw DomainError("gauss_curvature: point too close to the domain boundary");
    const Mat g0 = m.value(x);
    for (int k = 0; k < n; ++k) {
        for (int l = k; l < n; ++l) {
            Mat d;
            if (k == l) {
                Vec xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                d = (m.value(xp) - 2.0 * g0 + m.value(xm)) / (h * h);
            } else {
                Vec xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[k] += h; xpp[l] += h;
                xpm[k] += h; xpm[l] -= h;
                xmp[k] -= h; xmp[l] += h;
                xmm[k] -= h; xmm[l] -= h;
                d = (m.value(xpp) - m.value(xpm) - m.value(xmp) + m.value(xmm)) / (4.0 * h * h);
            }
            dd[k][l] = d;
            dd[l][k] = d;
        }
    }
    return dd;
}

} // namespace

double gauss_curvature(const MetricChart& metric, const Vec& x) {
    if (metric.dim() != 2)
        throw DimensionError("gauss_curvature is defined for surface charts (dim 2) only");

    const Mat g = metric.value(x);
    const auto dg = metric.partials(x);
    const auto ddg = metric_second_partials(metric, x);

    const double E = g(0, 0), F = g(0, 1), G = g(1, 1);
    const double Ex = dg[0](0, 0), Ey = dg[1](0, 0);
    const double Fx = dg[0](0, 1), Fy = dg[1](0, 1);
    const double Gx = dg[0](1, 1), Gy = dg[1](1, 1);
    const double Eyy = ddg[1][1](0, 0);
    const double Fxy = ddg[0][1](0, 1);
    const double Gxx = ddg[0][0](1, 1);

    Mat A(3, 3), B(3, 3);
    A << -0.5 * Eyy + Fxy - 0.5 * Gxx, 0.5 * Ex, Fx - 0.5 * Ey,
         Fy - 0.5 * Gx,                E,        F,
         0.5 * Gy,                     F,        G;
    B << 0.0,      0.5 * Ey, 0.5 * Gx,
         0.5 * Ey, E,        F,
         0.5 * Gx, F,        G;

    const double det_g = E * G - F * F;
    return (A.determinant() - B.determinant()) / (det_g * det_g);
}

MetricChart conformal_rescale(const MetricChart& metric, const ConformalFactor& u) {
    const auto g = metric;
    const auto uu = u;
    MatrixField val = [g, uu](const Vec& x) -> Mat {
        return std::exp(-2.0 * uu.u(x)) * g.value(x);
    };
    MatrixFieldDeriv deriv = nullptr;
    if (metric.has_analytic_derivatives() && u.grad) {
        deriv = [g, uu](const Vec& x) {
            const double f = std::exp(-2.0 * uu.u(x));
            const Vec du = uu.grad(x);
            const Mat gx = g.value(x);
            auto dg = g.partials(x);
            for (int k = 0; k < gx.rows(); ++k) dg[k] = f * (dg[k] - 2.0 * du[k] * gx);
            return dg;
        };
    }
    return MetricChart(metric.dim(), metric.domain(), std::move(val),
                       "exp(-2*" + u.name + ")*" + metric.name(), std::move(deriv), metric.fd());
}

MetricChart euclidean_metric(int dim, std::optional<Box> domain) {
    Box box = domain.value_or(Box::cube(dim, 3.0));
    MatrixField g = [dim](const Vec&) { return Mat::Identity(dim, dim).eval(); };
    MatrixFieldDeriv dg = [dim](const Vec&) {
        return std::vector<Mat>(dim, Mat::Zero(dim, dim));
    };
    return MetricChart(dim, std::move(box), std::move(g), "euclidean", std::move(dg));
}

MetricChart polar_metric(std::optional<Box> domain) {
    Box box = domain.value_or(Box::of({0.2, 3.0, -3.14159, 3.14159}));
    MatrixField g = [](const Vec& x) {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = 1.0;
        m(1, 1) = x[0] * x[0];
        return m;
    };
    MatrixFieldDeriv dg = [](const Vec& x) {
        std::vector<Mat> d(2, Mat::Zero(2, 2));
        d[0](1, 1) = 2.0 * x[0];
        return d;
    };
    return MetricChart(2, std::move(box), std::move(g), "polar", std::move(dg));
}

MetricChart half_plane_metric(std::optional<Box> domain) {
    Box box = domain.value_or(Box::of({-3.0, 3.0, 0.15, 4.0}));
    MatrixField g = [](const Vec& x) {
        return (Mat::Identity(2, 2) / (x[1] * x[1])).eval();
    };
    MatrixFieldDeriv dg = [](const Vec& x) {
        std::vector<Mat> d(2, Mat::Zero(2, 2));
        d[1] = Mat::Identity(2, 2) * (-2.0 / (x[1] * x[1] * x[1]));
        return d;
    };
    return MetricChart(2, std::move(box), std::move(g), "half-plane", std::move(dg));
}

MetricChart sphere_stereographic_metric(int dim, std::optional<Box> domain) {
    Box box = domain.value_or(Box::cube(dim, 1.8));
    MatrixField g = [dim](const Vec& x) {
        const double f = 2.0 / (1.0 + x.squaredNorm());
        return (f * f * Mat::Identity(dim, dim)).eval();
    };
    MatrixFieldDeriv dg = [dim](const Vec& x) {
        const double denom = 1.0 + x.squaredNorm();
        const double df = -16.0 / (denom * denom * denom); // d/dx_k of 4/denom^2 = -16 x_k / denom^3
        std::vector<Mat> d(dim);
        for (int k = 0; k < dim; ++k) d[k] = df * x[k] * Mat::Identity(dim, dim);
        return d;
    };
    return MetricChart(dim, std::move(box), std::move(g), "sphere-stereographic", std::move(dg));
}

} // namespace solitonlab
