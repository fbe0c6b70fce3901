#include "solitonlab/hypersurface.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "solitonlab/errors.hpp"
#include "solitonlab/ode.hpp"
#include "solitonlab/soliton.hpp"

namespace solitonlab {

Orientation Orientation::toward(std::function<Vec(const Vec&)> ref) {
    Orientation o;
    o.rule = Rule::Reference;
    o.reference = std::move(ref);
    return o;
}

Orientation Orientation::constant(const Vec& dir) {
    const Vec d = dir;
    return toward([d](const Vec&) { return d; });
}

namespace {

Vec fd_step_sizes(const ImmersedPatch& patch) {
    Vec h(patch.n);
    for (int a = 0; a < patch.n; ++a)
        h[a] = patch.fd_scale * std::max(1.0, patch.param_box.hi[a] - patch.param_box.lo[a]);
    return h;
}

Mat jacobian_fd(const ImmersedPatch& patch, const Vec& t, const Vec& h) {
    Mat J(patch.ambient_dim, patch.n);
    Vec tp = t, tm = t;
    for (int a = 0; a < patch.n; ++a) {
        const double ha = 0.1 * h[a]; // first derivatives tolerate a finer step
        tp[a] = t[a] + ha;
        tm[a] = t[a] - ha;
        J.col(a) = (patch.f(tp) - patch.f(tm)) / (2.0 * ha);
        tp[a] = t[a];
        tm[a] = t[a];
    }
    return J;
}

} // namespace

ShapeData shape_data(const MetricChart& metric, const ImmersedPatch& patch, const Vec& t) {
    const int n = patch.n;
    const int m = patch.ambient_dim;
    if (m != metric.dim())
        throw DimensionError("shape_data: patch ambient dimension does not match the metric");
    if (m != n + 1) throw DimensionError("shape_data: patch is not a hypersurface");
    if (m < 3 || m > 4)
        throw DimensionError("shape_data: ambient dimension must be 3 or 4 "
                             "(curves on surfaces live in the soliton module)");
    const Vec h = fd_step_sizes(patch);
    if (!patch.param_box.contains(t, 0.0))
        throw DomainError("shape_data: parameter outside the patch box");

    const Vec p = patch.f(t);
    const Mat G = metric.value(p);
    const Mat J = jacobian_fd(patch, t, h);

    ShapeData out;
    out.jacobian = J;
    out.first_form = J.transpose() * G * J;

    // immersion check on the pullback metric
    Eigen::SelfAdjointEigenSolver<Mat> es(out.first_form);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
        throw ImmersionError("shape_data: parameter Jacobian is rank deficient at the "
                             "evaluation point");

    // tangent frame by modified Gram-Schmidt in the g-inner product
    std::vector<Vec> frame;
    for (int a = 0; a < n; ++a) {
        Vec v = J.col(a);
        for (const Vec& e : frame) v -= e.dot(G * v) * e;
        const double nv = std::sqrt(v.dot(G * v));
        v /= nv;
        frame.push_back(v);
    }
    // normal: best-conditioned ambient basis vector, projected out
    Vec nu;
    double best = -1.0;
    for (int k = 0; k < m; ++k) {
        Vec r = Vec::Zero(m);
        r[k] = 1.0;
        for (const Vec& e : frame) r -= e.dot(G * r) * e;
        const double q = r.dot(G * r);
        if (q > best) {
            best = q;
            nu = r;
        }
    }
    nu /= std::sqrt(nu.dot(G * nu));

    // orientation
    if (patch.orientation.rule == Orientation::Rule::Reference && patch.orientation.reference) {
        if (nu.dot(G * patch.orientation.reference(p)) < 0.0) nu = -nu;
    } else {
        Mat Fm(m, m);
        Fm.col(0) = nu;
        for (int a = 0; a < n; ++a) Fm.col(a + 1) = J.col(a);
        if (Fm.determinant() < 0.0) nu = -nu;
    }
    out.normal = nu;

    // second fundamental form: h_ab = g(d_a d_b f + Gamma(d_a f, d_b f), nu)
    const Christoffels gamma = christoffel(metric, p);
    Mat hform(n, n);
    Vec tp = t, tm = t;
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            Vec d2;
            if (a == b) {
                tp[a] = t[a] + h[a];
                tm[a] = t[a] - h[a];
                d2 = (patch.f(tp) - 2.0 * p + patch.f(tm)) / (h[a] * h[a]);
                tp[a] = t[a];
                tm[a] = t[a];
            } else {
                Vec tpp = t, tpm = t, tmp = t, tmm = t;
                tpp[a] += h[a]; tpp[b] += h[b];
                tpm[a] += h[a]; tpm[b] -= h[b];
                tmp[a] -= h[a]; tmp[b] += h[b];
                tmm[a] -= h[a]; tmm[b] -= h[b];
                d2 = (patch.f(tpp) - patch.f(tpm) - patch.f(tmp) + patch.f(tmm)) /
                     (4.0 * h[a] * h[b]);
            }
            const Vec cov = d2 + gamma.apply(J.col(a), J.col(b));
            const double hab = cov.dot(G * nu);
            hform(a, b) = hab;
            hform(b, a) = hab;
        }
    }
    out.second_form = hform;
    out.H = (out.first_form.llt().solve(hform)).trace() / n;
    return out;
}

std::vector<Vec> param_grid(const ImmersedPatch& patch, int per_axis) {
    const Vec h = fd_step_sizes(patch);
    std::vector<Vec> pts;
    std::vector<int> idx(patch.n, 0);
    Vec t(patch.n);
    const long total = static_cast<long>(std::pow(per_axis, patch.n));
    for (long c = 0; c < total; ++c) {
        for (int a = 0; a < patch.n; ++a) {
            const double pad =
                std::max(3.0 * h[a], 0.02 * (patch.param_box.hi[a] - patch.param_box.lo[a]));
            const double lo = patch.param_box.lo[a] + pad;
            const double hi = patch.param_box.hi[a] - pad;
            t[a] = per_axis == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx[a] / (per_axis - 1);
        }
        pts.push_back(t);
        for (int a = 0; a < patch.n; ++a) {
            if (++idx[a] < per_axis) break;
            idx[a] = 0;
        }
    }
    return pts;
}

double soliton_residual(const MetricChart& metric, const VectorFieldSpec& X,
                        const ImmersedPatch& patch, const std::vector<Vec>& grid) {
    double sup = 0.0;
    for (const Vec& t : grid) {
        const ShapeData sd = shape_data(metric, patch, t);
        const Vec p = patch.f(t);
        const double gXnu = X.eval(p).dot(metric.value(p) * sd.normal);
        sup = std::max(sup, std::abs(sd.H - kSolitonSign * gXnu));
    }
    return sup;
}

double conformal_mean_curvature(const MetricChart& metric, const ConformalFactor& u,
                                const ImmersedPatch& patch, const Vec& t) {
    const MetricChart gbar = conformal_rescale(metric, u);
    return shape_data(gbar, patch, t).H;
}

ImmersedPatch plane_patch(int ambient_dim, const Vec& origin, const std::vector<Vec>& span,
                          double half_width) {
    const int n = ambient_dim - 1;
    if (static_cast<int>(span.size()) != n)
        throw DimensionError("plane_patch: need ambient_dim - 1 spanning vectors");
    ImmersedPatch p;
    p.n = n;
    p.ambient_dim = ambient_dim;
    p.param_box = Box::cube(n, half_width);
    const Vec o = origin;
    const std::vector<Vec> sp = span;
    p.f = [o, sp](const Vec& t) {
        Vec x = o;
        for (std::size_t a = 0; a < sp.size(); ++a) x += t[a] * sp[a];
        return x;
    };
    p.orientation = Orientation::positive_frame();
    p.name = "plane";
    return p;
}

ImmersedPatch sphere_patch(int ambient_dim, double radius, std::optional<Vec> center) {
    ImmersedPatch p;
    p.n = ambient_dim - 1;
    p.ambient_dim = ambient_dim;
    const Vec c = center.value_or(Vec::Zero(ambient_dim));
    if (ambient_dim == 3) {
        p.param_box = Box::of({0.5, 2.6, -3.0, 3.0});
        p.f = [c, radius](const Vec& t) {
            Vec x(3);
            x << std::sin(t[0]) * std::cos(t[1]), std::sin(t[0]) * std::sin(t[1]),
                std::cos(t[0]);
            return (c + radius * x).eval();
        };
    } else if (ambient_dim == 4) {
        p.param_box = Box::of({0.5, 2.6, 0.5, 2.6, -3.0, 3.0});
        p.f = [c, radius](const Vec& t) {
            Vec x(4);
            const double s1 = std::sin(t[0]), s2 = std::sin(t[1]);
            x << std::cos(t[0]), s1 * std::cos(t[1]), s1 * s2 * std::cos(t[2]),
                s1 * s2 * std::sin(t[2]);
            return (c + radius * x).eval();
        };
    } else {
        throw DimensionError("sphere_patch: ambient dimension must be 3 or 4");
    }
    p.orientation = Orientation::toward([c](const Vec& x) { return (x - c).eval(); });
    p.name = "sphere(r=" + std::to_string(radius) + ")";
    return p;
}

ImmersedPatch cylinder_patch(double radius, double half_height) {
    ImmersedPatch p;
    p.n = 2;
    p.ambient_dim = 3;
    p.param_box = Box::of({-3.0, 3.0, -half_height, half_height});
    p.f = [radius](const Vec& t) {
        Vec x(3);
        x << radius * std::cos(t[0]), radius * std::sin(t[0]), t[1];
        return x;
    };
    p.orientation = Orientation::toward([](const Vec& x) {
        Vec r(3);
        r << x[0], x[1], 0.0;
        return r;
    });
    p.name = "cylinder(r=" + std::to_string(radius) + ")";
    return p;
}

ImmersedPatch graph_patch(int ambient_dim, std::function<double(const Vec&)> height, Box base) {
    ImmersedPatch p;
    p.n = ambient_dim - 1;
    p.ambient_dim = ambient_dim;
    p.param_box = std::move(base);
    const auto hf = std::move(height);
    const int m = ambient_dim;
    p.f = [hf, m](const Vec& t) {
        Vec x(m);
        x.head(m - 1) = t;
        x[m - 1] = hf(t);
        return x;
    };
    Vec up = Vec::Zero(m);
    up[m - 1] = 1.0;
    p.orientation = Orientation::constant(up);
    p.name = "graph";
    return p;
}

// -- rotational profiles -----------------------------------------------------

namespace {

Vec revolve_point(double r, double z, const Vec& angles, int n) {
    if (n == 2) {
        Vec x(3);
        x << r * std::cos(angles[0]), r * std::sin(angles[0]), z;
        return x;
    }
    Vec x(4);
    x << r * std::cos(angles[0]), r * std::sin(angles[0]) * std::cos(angles[1]),
        r * std::sin(angles[0]) * std::sin(angles[1]), z;
    return x;
}

} // namespace

ImmersedPatch revolve_profile_samples(const std::vector<ProfileSample>& samples, int n) {
    if (samples.size() < 2)
        throw InsufficientDataError("revolve_profile_samples: need at least 2 samples");
    if (n < 2 || n > 3)
        throw DimensionError("revolve_profile_samples: intrinsic dimension must be 2 or 3");
    auto data = std::make_shared<std::vector<ProfileSample>>(samples);
    auto rz_at = [data](double s) -> Vec {
        const auto& sm = *data;
        int lo = 0, hi = static_cast<int>(sm.size()) - 1;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (sm[mid].s <= s ? lo : hi) = mid;
        }
        const double h = sm[hi].s - sm[lo].s;
        const double t = (s - sm[lo].s) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return vec2(h00 * sm[lo].r + h * h10 * sm[lo].T[0] + h01 * sm[hi].r +
                        h * h11 * sm[hi].T[0],
                    h00 * sm[lo].z + h * h10 * sm[lo].T[1] + h01 * sm[hi].z +
                        h * h11 * sm[hi].T[1]);
    };

    ImmersedPatch patch;
    patch.n = n;
    patch.ambient_dim = n + 1;
    patch.name = "revolved-profile-csv";
    const double s_lo = samples.front().s, s_hi = samples.back().s;
    const double pad = 0.01 * (s_hi - s_lo);
    if (n == 2)
        patch.param_box = Box::of({s_lo + pad, s_hi - pad, -3.0, 3.0});
    else
        patch.param_box = Box::of({s_lo + pad, s_hi - pad, 0.5, 2.6, -3.0, 3.0});
    patch.f = [rz_at, n](const Vec& t) {
        const Vec rz = rz_at(t[0]);
        return revolve_point(rz[0], rz[1], t.tail(t.size() - 1), n);
    };
    patch.orientation = Orientation::positive_frame();
    return patch;
}

namespace {

void check_euclidean(const MetricChart& m) {
    const Vec c = m.domain().center();
    if ((m.value(c) - Mat::Identity(m.dim(), m.dim())).cwiseAbs().maxCoeff() > 1e-12)
        throw PreconditionError("rotational_profile: the ambient metric must be euclidean");
}

void check_axisymmetric(const VectorFieldSpec& X, int m) {
    // rotate a few probe points in the (0,1) coordinate plane and compare
    const double ang = 0.7;
    const double ca = std::cos(ang), sa = std::sin(ang);
    for (double rad : {0.5, 1.3}) {
        Vec p = Vec::Zero(m);
        p[0] = rad;
        p[m - 1] = 0.4 * rad;
        Vec q = p;
        q[0] = ca * p[0] - sa * p[1];
        q[1] = sa * p[0] + ca * p[1];
        const Vec Xp = X.eval(p), Xq = X.eval(q);
        Vec rXp = Xp;
        rXp[0] = ca * Xp[0] - sa * Xp[1];
        rXp[1] = sa * Xp[0] + ca * Xp[1];
        if ((rXp - Xq).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + Xp.norm()))
            throw PreconditionError("rotational_profile: field '" + X.name +
                                    "' is not invariant under rotations about the axis");
    }
}

// profile-plane point embedded in the ambient: (r, 0, ..., 0, z)
Vec embed_rz(int m, double r, double z) {
    Vec p = Vec::Zero(m);
    p[0] = r;
    p[m - 1] = z;
    return p;
}

struct ProfileOde {
    VectorFieldSpec X;
    int n = 0;

    double kappa(double r, double z, double Tr, double Tz) const {
        const int m = n + 1;
        const Vec p = embed_rz(m, r, z);
        const Vec nu = embed_rz(m, -Tz, Tr); // +90 rotation of (Tr, Tz)
        const double gXnu = X.eval(p).dot(nu);
        return n * kSolitonSign * gXnu - (n - 1) * Tz / r;
    }

    void operator()(double, const Vec& y, Vec& dy) const {
        const double r = y[0], z = y[1], Tr = y[2], Tz = y[3];
        const double k = kappa(r, z, Tr, Tz);
        dy.resize(4);
        dy[0] = Tr;
        dy[1] = Tz;
        dy[2] = k * (-Tz);
        dy[3] = k * Tr;
    }
};

} // namespace

ProfileResult rotational_profile(const MetricChart& metric, const VectorFieldSpec& X, int n,
                                 double r0, double z0, const Vec& dir_rz, double length,
                                 const ProfileOptions& opts) {
    const int m = n + 1;
    if (n < 2 || n > 3)
        throw DimensionError("rotational_profile: intrinsic dimension must be 2 or 3");
    if (metric.dim() != m)
        throw DimensionError("rotational_profile: metric dimension must be n + 1");
    check_euclidean(metric);
    check_axisymmetric(X, m);
    if (r0 <= opts.axis_margin)
        throw DomainError("rotational_profile: initial radius inside the axis margin");
    if (!metric.domain().contains(embed_rz(m, r0, z0)))
        throw DomainError("rotational_profile: initial point outside the chart domain");

    ProfileOde ode{X, n};
    Vec y0(4);
    const double dn = std::hypot(dir_rz[0], dir_rz[1]);
    y0 << r0, z0, dir_rz[0] / dn, dir_rz[1] / dn;

    ProfileResult out;
    out.n = n;
    auto samples = std::make_shared<std::vector<ProfileSample>>();
    const Box& dom = metric.domain();
    OdeGuard guard = [&](const Vec& y) {
        return y[0] > opts.axis_margin && dom.contains(embed_rz(m, y[0], y[1]));
    };
    OdeObserver observer = [&](double s, const Vec& y) {
        ProfileSample ps;
        ps.s = s;
        ps.r = y[0];
        ps.z = y[1];
        ps.T = vec2(y[2], y[3]);
        ps.kappa = ode.kappa(y[0], y[1], y[2], y[3]);
        samples->push_back(std::move(ps));
    };
    OdeTransform renorm = [](double, Vec& y) {
        const double nT = std::hypot(y[2], y[3]);
        y[2] /= nT;
        y[3] /= nT;
    };
    OdeOptions oopts;
    oopts.rtol = opts.rtol;
    oopts.atol = opts.atol;
    oopts.max_step = length > 0.0 ? length / std::ceil(length / opts.max_step) : opts.max_step;

    OdeRhs rhs = [&ode](double s, const Vec& y, Vec& dy) { ode(s, y, dy); };
    OdeResult res = integrate_adaptive(rhs, 0.0, length, y0, oopts, observer, renorm, guard);
    if (res.status == OdeStatus::StepUnderflow)
        throw NumericalError("rotational_profile: step size underflow", res.t,
                             std::vector<double>(res.y.data(), res.y.data() + 4));
    out.complete = (res.status == OdeStatus::Done);
    if (!out.complete && res.y[0] <= 2.0 * opts.axis_margin && std::abs(res.y[3]) > 0.1)
        throw CoordinateSingularityError(
            "rotational_profile: profile reached the symmetry axis with nonzero slope "
            "(r = " + std::to_string(res.y[0]) + ", dz/ds = " + std::to_string(res.y[3]) + ")");
    out.samples = *samples;
    if (samples->size() < 2)
        throw NumericalError("rotational_profile: integration produced no usable samples");

    // Reconstructed patch: evaluate the profile at arbitrary s by a short
    // re-integration from the nearest stored sample (smooth to integrator
    // accuracy), then revolve about the axis.
    const double s_lo = samples->front().s, s_hi = samples->back().s;
    ProfileOde ode_copy{X, n};
    auto eval_profile = [samples, ode_copy](double s) -> Vec {
        // binary search for the last sample with s_k <= s
        const auto& sm = *samples;
        int lo = 0, hi = static_cast<int>(sm.size()) - 1;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (sm[mid].s <= s ? lo : hi) = mid;
        }
        Vec y(4);
        y << sm[lo].r, sm[lo].z, sm[lo].T[0], sm[lo].T[1];
        if (s == sm[lo].s) return y;
        OdeOptions o;
        o.rtol = 1e-12;
        o.atol = 1e-14;
        OdeRhs rhs2 = [&ode_copy](double t, const Vec& yy, Vec& dy) { ode_copy(t, yy, dy); };
        return integrate_adaptive(rhs2, sm[lo].s, s, y, o).y;
    };

    ImmersedPatch patch;
    patch.n = n;
    patch.ambient_dim = m;
    patch.name = "revolved-profile";
    const double pad = 0.01 * (s_hi - s_lo);
    if (n == 2)
        patch.param_box = Box::of({s_lo + pad, s_hi - pad, -3.0, 3.0});
    else
        patch.param_box = Box::of({s_lo + pad, s_hi - pad, 0.5, 2.6, -3.0, 3.0});
    patch.f = [eval_profile, n](const Vec& t) {
        const Vec y = eval_profile(t[0]);
        return revolve_point(y[0], y[1], t.tail(t.size() - 1), n);
    };
    patch.orientation = Orientation::positive_frame();
    out.patch = std::move(patch);
    return out;
}

} // namespace solitonlab
