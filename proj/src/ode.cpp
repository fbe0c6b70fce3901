#include "solitonlab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace solitonlab {

namespace {

// DOPRI5 tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// y5 - y4 error weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
    const OdeRhs& rhs;
    Vec k1, k2, k3, k4, k5, k6, k7, ytmp;

    explicit Stepper(const OdeRhs& f, int n) : rhs(f) {
        k1 = k2 = k3 = k4 = k5 = k6 = k7 = ytmp = Vec::Zero(n);
    }

    // One trial step from (t, y) with k1 = f(t, y) already set.
    // Fills ynew and err (weighted difference of the embedded orders).
    void step(double t, const Vec& y, double h, Vec& ynew, Vec& err) {
        ytmp = y + h * a21 * k1;
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + h, ynew, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    }
};

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
    double sum = 0.0;
    for (int i = 0; i < err.size(); ++i) {
        double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double r = err[i] / sk;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

} // namespace

OdeResult integrate_adaptive(const OdeRhs& rhs, double t0, double t1, Vec y0,
                             const OdeOptions& opts, const OdeObserver& observer,
                             const OdeTransform& transform, const OdeGuard& guard) {
    const int n = static_cast<int>(y0.size());
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    OdeResult out;
    out.t = t0;
    out.y = y0;
    if (span == 0.0) {
        if (observer) observer(t0, y0);
        return out;
    }

    Stepper st(rhs, n);
    Vec y = y0, ynew = y0, err = y0;
    double t = t0;
    rhs(t, y, st.k1);

    double h = opts.initial_step;
    if (h <= 0.0) {
        double d0 = y.cwiseAbs().maxCoeff() + 1.0;
        double d1 = st.k1.cwiseAbs().maxCoeff() + 1e-30;
        h = std::min(1e-2 * d0 / d1, span / 10.0);
    }
    h = std::min(h, opts.max_step);
    h = std::min(h, span);

    const double h_floor = 1e-14 * std::max(1.0, std::abs(t0) + span);

    if (observer) observer(t, y);

    for (long steps = 0; steps < opts.max_steps; ++steps) {
        if (std::abs(t - t1) <= 1e-15 * std::max(1.0, std::abs(t1))) break;
        h = std::min({h, opts.max_step, std::abs(t1 - t)});
        // stretch the final step to absorb accumulated rounding, so the
        // stored grid never ends in a degenerate sliver step
        if (std::abs(t1 - t) < 1.001 * h) h = std::abs(t1 - t);
        if (h < h_floor) {
            out.status = OdeStatus::StepUnderflow;
            out.t = t;
            out.y = y;
            return out;
        }

        st.step(t, y, dir * h, ynew, err);
        double en = error_norm(err, y, ynew, opts.rtol, opts.atol);
        if (en > 1.0) { // reject
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            continue;
        }

        // accepted; check the domain guard, bisecting on the step size so we
        // stop just inside the boundary
        if (guard && !guard(ynew)) {
            double lo = 0.0, hi = h;
            Vec ybest = y;
            bool have_inside = false;
            for (int it = 0; it < 80 && (hi - lo) > 1e-13 * std::max(1.0, h); ++it) {
                double mid = 0.5 * (lo + hi);
                st.step(t, y, dir * mid, ynew, err);
                if (guard(ynew)) {
                    lo = mid;
                    ybest = ynew;
                    have_inside = true;
                } else {
                    hi = mid;
                }
            }
            if (have_inside) {
                t += dir * lo;
                y = ybest;
                if (transform) transform(t, y);
                if (observer) observer(t, y);
            }
            out.status = OdeStatus::DomainExit;
            out.t = t;
            out.y = y;
            return out;
        }

        t += dir * h;
        y = ynew;
        if (transform) transform(t, y);
        rhs(t, y, st.k1); // refresh derivative after the transform
        if (observer) observer(t, y);

        double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
    }

    out.status = OdeStatus::Done;
    out.t = t;
    out.y = y;
    return out;
}

} // namespace solitonlab
