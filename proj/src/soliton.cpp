#include "solitonlab/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "solitonlab/errors.hpp"
#include "solitonlab/ode.hpp"

namespace solitonlab {

namespace {

int find_interval(const std::vector<CurveSample>& samples, double s) {
    int lo = 0, hi = static_cast<int>(samples.size()) - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (samples[mid].s <= s)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

Vec hermite(const CurveSample& a, const CurveSample& b, double s, bool derivative) {
    const double h = b.s - a.s;
    const double t = (s - a.s) / h;
    const double t2 = t * t, t3 = t2 * t;
    if (!derivative) {
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * a.x + h * h10 * a.T + h01 * b.x + h * h11 * b.T;
    }
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    return (d00 * a.x + h * d10 * a.T + d01 * b.x + h * d11 * b.T) / h;
}

} // namespace

Vec SolitonCurve::position_at(double s) const {
    if (samples.size() < 2) throw InsufficientDataError("curve has fewer than 2 samples");
    const int i = find_interval(samples, s);
    return hermite(samples[i], samples[i + 1], s, false);
}

Vec SolitonCurve::tangent_at(double s) const {
    if (samples.size() < 2) throw InsufficientDataError("curve has fewer than 2 samples");
    const int i = find_interval(samples, s);
    return hermite(samples[i], samples[i + 1], s, true);
}

Vec unit_normal(const MetricChart& metric, const Vec& x, const Vec& T) {
    if (metric.dim() != 2)
        throw DimensionError("unit_normal: curve normals are defined on surface charts");
    const Mat g = metric.value(x);
    const Vec w = g * T;          // flat of T
    Vec nu(2);
    nu << -w[1], w[0];            // g-orthogonal to T; det[T nu] = |T|_g^2 > 0
    const double n = std::sqrt(nu.dot(g * nu));
    if (n == 0.0) throw DegenerateInputError("unit_normal: zero tangent");
    return nu / n;
}

SolitonRhs soliton_rhs(const MetricChart& metric, const VectorFieldSpec& X,
                       const CurveState& state) {
    SolitonRhs out;
    const Mat g = metric.value(state.x);
    out.nu = unit_normal(metric, state.x, state.T);
    out.kappa_g = kSolitonSign * (X.eval(state.x)).dot(g * out.nu);
    const Christoffels gamma = christoffel(metric, state.x);
    out.dx = state.T;
    out.dT = -gamma.apply(state.T, state.T) + out.kappa_g * out.nu;
    return out;
}

SolitonCurve integrate_soliton(const MetricChart& metric, const VectorFieldSpec& X,
                               CurveState initial, double length,
                               const SolitonIntegrationOptions& opts) {
    if (metric.dim() != 2)
        throw DimensionError("integrate_soliton: n = 1 integration runs on surface charts");
    if (!metric.domain().contains(initial.x))
        throw DomainError("integrate_soliton: initial point outside the chart domain");

    // normalize the starting tangent
    const double n0 = metric.norm(initial.x, initial.T);
    if (n0 == 0.0) throw DegenerateInputError("integrate_soliton: zero initial direction");
    initial.T /= n0;

    SolitonCurve curve;
    curve.field_name = X.name;
    curve.metric_name = metric.name();
    curve.rtol = opts.rtol;
    curve.atol = opts.atol;
    curve.max_step = opts.max_step;

    const MetricChart& g = metric;
    OdeRhs rhs = [&g, &X](double, const Vec& y, Vec& dy) {
        CurveState st;
        st.x = y.head(2);
        st.T = y.tail(2);
        SolitonRhs r = soliton_rhs(g, X, st);
        dy.resize(4);
        dy.head(2) = r.dx;
        dy.tail(2) = r.dT;
    };
    OdeTransform transform = nullptr;
    if (opts.renormalize)
        transform = [&g](double, Vec& y) {
            const Vec x = y.head(2);
            Vec T = y.tail(2);
            y.tail(2) = T / g.norm(x, T);
        };
    OdeGuard guard = [&g](const Vec& y) { return g.domain().contains(y.head(2)); };
    OdeObserver observer = [&](double s, const Vec& y) {
        CurveSample smp;
        smp.s = s;
        smp.x = y.head(2);
        smp.T = y.tail(2);
        smp.nu = unit_normal(g, smp.x, smp.T);
        smp.kappa_g = kSolitonSign * X.eval(smp.x).dot(g.value(smp.x) * smp.nu);
        curve.samples.push_back(std::move(smp));
    };

    Vec y0(4);
    y0.head(2) = initial.x;
    y0.tail(2) = initial.T;
    OdeOptions oopts;
    oopts.rtol = opts.rtol;
    oopts.atol = opts.atol;
    oopts.max_step = opts.max_step;
    // exact division keeps accepted steps uniform, which downstream stencil
    // measures assume
    if (std::isfinite(opts.max_step) && length > 0.0)
        oopts.max_step = length / std::ceil(length / opts.max_step);

    OdeResult res = integrate_adaptive(rhs, initial.s, initial.s + length, y0, oopts,
                                       observer, transform, guard);
    if (res.status == OdeStatus::StepUnderflow)
        throw NumericalError("integrate_soliton: step size underflow at s = " +
                                 std::to_string(res.t),
                             res.t, std::vector<double>(res.y.data(), res.y.data() + 4));
    curve.complete = (res.status == OdeStatus::Done);

    // measured residual: differentiate the stored tangents (5-point stencil
    // on the uniform interior, 3-point non-uniform elsewhere) and compare
    // the normal curvature against the equation value
    const int N = static_cast<int>(curve.samples.size());
    auto uniform_around = [&](int lo, int hi, double h) {
        for (int k = lo; k < hi; ++k)
            if (std::abs(curve.samples[k + 1].s - curve.samples[k].s - h) > 1e-12)
                return false;
        return true;
    };
    for (int i = 1; i + 1 < N; ++i) {
        const auto& sm = curve.samples[i];
        Vec dT;
        const double hm = curve.samples[i].s - curve.samples[i - 1].s;
        const double hp = curve.samples[i + 1].s - curve.samples[i].s;
        if (i >= 2 && i + 2 < N && uniform_around(i - 2, i + 2, hp)) {
            dT = (curve.samples[i - 2].T - 8.0 * curve.samples[i - 1].T +
                  8.0 * curve.samples[i + 1].T - curve.samples[i + 2].T) /
                 (12.0 * hp);
        } else if (i == 1 && N >= 5 && uniform_around(0, 4, hp)) {
            // one-sided 4th order at the second sample
            dT = (-3.0 * curve.samples[0].T - 10.0 * curve.samples[1].T +
                  18.0 * curve.samples[2].T - 6.0 * curve.samples[3].T +
                  curve.samples[4].T) /
                 (12.0 * hp);
        } else if (i == N - 2 && N >= 5 && uniform_around(N - 5, N - 1, hm)) {
            dT = (3.0 * curve.samples[N - 1].T + 10.0 * curve.samples[N - 2].T -
                  18.0 * curve.samples[N - 3].T + 6.0 * curve.samples[N - 4].T -
                  curve.samples[N - 5].T) /
                 (12.0 * hm);
        } else {
            const double denom = hm * hp * (hm + hp);
            dT = (hm * hm * curve.samples[i + 1].T - hp * hp * curve.samples[i - 1].T +
                  (hp * hp - hm * hm) * curve.samples[i].T) /
                 denom;
        }
        const Vec gamma_tt = christoffel(g, sm.x).apply(sm.T, sm.T);
        const double kappa_measured = (dT + gamma_tt).dot(g.value(sm.x) * sm.nu);
        curve.samples[i].residual = std::abs(kappa_measured - sm.kappa_g);
    }
    if (N >= 3) {
        curve.samples.front().residual = curve.samples[1].residual;
        curve.samples.back().residual = curve.samples[N - 2].residual;
    }
    return curve;
}

namespace {

struct Seg {
    Vec a, b;
    int idx;
};

double cross2(const Vec& u, const Vec& v) { return u[0] * v[1] - u[1] * v[0]; }

// Proper (transversal) segment crossing; touches at endpoints do not count,
// which also deduplicates shared curve endpoints.
bool proper_intersect(const Vec& p1, const Vec& p2, const Vec& q1, const Vec& q2, Vec& out) {
    const Vec r = p2 - p1, s = q2 - q1;
    const double denom = cross2(r, s);
    if (denom == 0.0) return false;
    const double t = cross2(q1 - p1, s) / denom;
    const double u = cross2(q1 - p1, r) / denom;
    if (t <= 0.0 || t >= 1.0 || u <= 0.0 || u >= 1.0) return false;
    out = p1 + t * r;
    return true;
}

std::vector<Vec> cluster_points(std::vector<Vec> pts, double tol) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    std::vector<Vec> out;
    for (const auto& p : pts) {
        bool merged = false;
        for (const auto& q : out)
            if ((p - q).norm() <= tol) {
                merged = true;
                break;
            }
        if (!merged) out.push_back(p);
    }
    return out;
}

double max_segment_length(const SolitonCurve& c) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i)
        m = std::max(m, (c.samples[i + 1].x - c.samples[i].x).norm());
    return m;
}

IntersectionResult count_impl(const SolitonCurve& a, const SolitonCurve& b, double tol,
                              bool self) {
    const auto& sa = a.samples;
    const auto& sb = b.samples;
    if (sa.size() < 2 || sb.size() < 2)
        throw InsufficientDataError("count_intersections: curves need at least 2 samples");

    IntersectionResult res;
    res.density_warning =
        std::max(max_segment_length(a), max_segment_length(b)) > 10.0 * tol;

    // uniform grid over segments of a for near-linear pair lookup
    double cell = std::max(max_segment_length(a), max_segment_length(b)) * 2.0;
    if (cell <= 0.0) cell = tol;
    auto key = [cell](double x, double y) {
        return std::pair<long, long>(static_cast<long>(std::floor(x / cell)),
                                     static_cast<long>(std::floor(y / cell)));
    };
    std::map<std::pair<long, long>, std::vector<int>> grid;
    for (int i = 0; i + 1 < static_cast<int>(sa.size()); ++i) {
        const Vec& p = sa[i].x;
        const Vec& q = sa[i + 1].x;
        const auto k1 = key(std::min(p[0], q[0]), std::min(p[1], q[1]));
        const auto k2 = key(std::max(p[0], q[0]), std::max(p[1], q[1]));
        for (long gx = k1.first; gx <= k2.first; ++gx)
            for (long gy = k1.second; gy <= k2.second; ++gy) grid[{gx, gy}].push_back(i);
    }

    std::vector<Vec> hits;
    for (int j = 0; j + 1 < static_cast<int>(sb.size()); ++j) {
        const Vec& p = sb[j].x;
        const Vec& q = sb[j + 1].x;
        const auto k1 = key(std::min(p[0], q[0]), std::min(p[1], q[1]));
        const auto k2 = key(std::max(p[0], q[0]), std::max(p[1], q[1]));
        std::vector<int> cand;
        for (long gx = k1.first; gx <= k2.first; ++gx)
            for (long gy = k1.second; gy <= k2.second; ++gy) {
                auto it = grid.find({gx, gy});
                if (it != grid.end()) cand.insert(cand.end(), it->second.begin(), it->second.end());
            }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (int i : cand) {
            if (self && std::abs(i - j) <= 1) continue;
            if (self && i > j) continue; // count unordered pairs once
            Vec pt;
            if (proper_intersect(sa[i].x, sa[i + 1].x, p, q, pt)) hits.push_back(pt);
        }
    }
    auto clusters = cluster_points(std::move(hits), tol);
    res.count = static_cast<int>(clusters.size());
    res.locations = std::move(clusters);
    return res;
}

} // namespace

IntersectionResult count_intersections(const SolitonCurve& a, const SolitonCurve& b,
                                       double tol) {
    // identical inputs are degenerate for a crossing count
    if (a.samples.size() == b.samples.size()) {
        double sup = 0.0;
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            sup = std::max(sup, (a.samples[i].x - b.samples[i].x).norm());
        if (sup < tol)
            throw DegenerateInputError("count_intersections: curves coincide within tolerance");
    }
    return count_impl(a, b, tol, false);
}

IntersectionResult count_self_intersections(const SolitonCurve& a, double tol) {
    return count_impl(a, a, tol, true);
}

double stationarity_check(const MetricChart& metric, const VectorFieldSpec& X,
                          const SolitonCurve& curve, double dt, int stride) {
    if (curve.samples.empty()) throw InsufficientDataError("stationarity_check: empty curve");
    double sup = 0.0;
    for (std::size_t i = 0; i < curve.samples.size(); i += static_cast<std::size_t>(stride)) {
        const auto& smp = curve.samples[i];
        Vec fwd, bwd;
        try {
            fwd = flow(X, metric.domain(), smp.x, dt, 1e-12);
            bwd = flow(X, metric.domain(), smp.x, -dt, 1e-12);
        } catch (const DomainExitError&) {
            continue; // flow left the chart; skip this sample
        }
        const Vec disp = 0.5 * (fwd - bwd);
        const double normal_speed = disp.dot(metric.value(smp.x) * smp.nu) / dt;
        sup = std::max(sup, std::abs(normal_speed + smp.kappa_g));
    }
    return sup;
}

SolitonCurve resample_uniform(const SolitonCurve& curve, int n_samples) {
    if (curve.samples.size() < 2)
        throw InsufficientDataError("resample_uniform: curve has fewer than 2 samples");
    if (n_samples < 2) throw ConfigError("resample_uniform: need at least 2 samples");
    SolitonCurve out = curve;
    out.samples.clear();
    const double s0 = curve.samples.front().s, s1 = curve.samples.back().s;
    for (int i = 0; i < n_samples; ++i) {
        const double s = s0 + (s1 - s0) * i / (n_samples - 1);
        CurveSample smp;
        smp.s = s;
        smp.x = curve.position_at(s);
        smp.T = curve.tangent_at(s);
        smp.nu = Vec::Zero(smp.x.size());
        out.samples.push_back(std::move(smp));
    }
    return out;
}

void write_curve_csv(std::ostream& os, const SolitonCurve& curve,
                     const std::vector<std::string>& metadata) {
    os << "# solitonlab curve v1\n";
    os << "# metric = " << curve.metric_name << "\n";
    os << "# field = " << curve.field_name << "\n";
    os << "# rtol = " << curve.rtol << ", atol = " << curve.atol
       << ", max_step = " << curve.max_step << "\n";
    os << "# complete = " << (curve.complete ? "true" : "false") << "\n";
    for (const auto& m : metadata) os << "# " << m << "\n";
    const int d = curve.dim();
    os << "s";
    for (int i = 1; i <= d; ++i) os << ",x" << i;
    for (int i = 1; i <= d; ++i) os << ",T" << i;
    for (int i = 1; i <= d; ++i) os << ",nu" << i;
    os << ",kappa_g,residual\n";
    char buf[64];
    auto put = [&](double v, bool comma = true) {
        snprintf(buf, sizeof buf, "%.17g", v);
        if (comma) os << ',';
        os << buf;
    };
    for (const auto& smp : curve.samples) {
        put(smp.s, false);
        for (int i = 0; i < d; ++i) put(smp.x[i]);
        for (int i = 0; i < d; ++i) put(smp.T[i]);
        for (int i = 0; i < d; ++i) put(smp.nu[i]);
        put(smp.kappa_g);
        put(smp.residual);
        os << "\n";
    }
}

SolitonCurve read_curve_csv(std::istream& is) {
    SolitonCurve curve;
    std::string line;
    bool header_seen = false;
    int dim = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto grab = [&](const char* k) -> std::string {
                auto pos = line.find(k);
                if (pos == std::string::npos) return "";
                auto eq = line.find('=', pos);
                if (eq == std::string::npos) return "";
                std::string v = line.substr(eq + 1);
                auto comma = v.find(',');
                if (comma != std::string::npos) v = v.substr(0, comma);
                while (!v.empty() && v.front() == ' ') v.erase(v.begin());
                while (!v.empty() && v.back() == ' ') v.pop_back();
                return v;
            };
            if (line.find("metric =") != std::string::npos) curve.metric_name = grab("metric");
            if (line.find("field =") != std::string::npos) curve.field_name = grab("field");
            continue;
        }
        if (!header_seen) {
            // count columns: s + 3*dim + 2
            const long cols = std::count(line.begin(), line.end(), ',') + 1;
            dim = static_cast<int>((cols - 3) / 3);
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (static_cast<int>(vals.size()) != 3 + 3 * dim)
            throw ConfigError("curve CSV row has the wrong number of columns");
        CurveSample smp;
        smp.s = vals[0];
        smp.x = Eigen::Map<Vec>(vals.data() + 1, dim);
        smp.T = Eigen::Map<Vec>(vals.data() + 1 + dim, dim);
        smp.nu = Eigen::Map<Vec>(vals.data() + 1 + 2 * dim, dim);
        smp.kappa_g = vals[1 + 3 * dim];
        smp.residual = vals[2 + 3 * dim];
        curve.samples.push_back(std::move(smp));
    }
    return curve;
}

} // namespace solitonlab
