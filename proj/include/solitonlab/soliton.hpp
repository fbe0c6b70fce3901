#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "solitonlab/fields.hpp"
#include "solitonlab/geometry.hpp"

namespace solitonlab {

// Global sign convention of the curve/hypersurface equation, pinned by the
// requirement that the counterclockwise unit circle solves it for the radial
// field X(p) = p. With the positively oriented normal (tangent rotated by
// +90 degrees) this fixes
//     kappa_g = kSolitonSign * g(X, nu),
// equivalently: curvature vector + normal part of X = 0. The same constant
// governs the hypersurface residual |H - kSolitonSign * g(X, nu)|.
inline constexpr double kSolitonSign = -1.0;

struct CurveState {
    Vec x; // chart point
    Vec T; // unit tangent (g-norm 1)
    double s = 0.0;
};

struct CurveSample {
    double s = 0.0;
    Vec x, T, nu;
    double kappa_g = 0.0;  // signed curvature w.r.t. nu (equation value at the sample)
    double residual = 0.0; // |kappa measured from the samples - kSolitonSign*g(X,nu)|
};

struct SolitonCurve {
    std::vector<CurveSample> samples;
    std::string field_name, metric_name;
    double rtol = 0.0, atol = 0.0, max_step = 0.0;
    bool complete = true; // false when the integration stopped at the boundary

    double length() const { return samples.empty() ? 0.0 : samples.back().s; }
    int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().x.size()); }
    // Cubic Hermite evaluation between stored samples.
    Vec position_at(double s) const;
    Vec tangent_at(double s) const;
};

// Positively oriented unit normal: T rotated by +90 degrees in the
// g-orthonormal sense (det[T, nu] > 0). Surface charts only.
Vec unit_normal(const MetricChart& metric, const Vec& x, const Vec& T);

struct SolitonRhs {
    Vec dx, dT;
    double kappa_g = 0.0;
    Vec nu;
};

// Right-hand side of the arclength system: dx/ds = T,
// dT/ds = -Gamma(T,T) + kappa_g * nu with kappa_g = kSolitonSign * g(X, nu).
SolitonRhs soliton_rhs(const MetricChart& metric, const VectorFieldSpec& X,
                       const CurveState& state);

struct SolitonIntegrationOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    // Uniform step cap: keeps the stored grid fine and evenly spaced, which
    // the stencil-based residual measures rely on.
    double max_step = 2e-3;
    bool renormalize = true;
};

SolitonCurve integrate_soliton(const MetricChart& metric, const VectorFieldSpec& X,
                               CurveState initial, double length,
                               const SolitonIntegrationOptions& opts = {});

struct IntersectionResult {
    int count = 0;
    std::vector<Vec> locations;
    bool density_warning = false; // max segment length exceeded 10 * tol
};

// Transversal crossings of the two sampled polylines; crossings closer than
// tol are merged, endpoint touches are not counted.
IntersectionResult count_intersections(const SolitonCurve& a, const SolitonCurve& b,
                                       double tol = 1e-6);
IntersectionResult count_self_intersections(const SolitonCurve& a, double tol = 1e-6);

// Consistency of the curve with the flow of X: the g-normal displacement of
// flow(X, p, dt) (centered in dt) must match -kappa_g per unit time at every
// checked sample. Returns the sup residual divided by dt. Samples whose flow
// leaves the domain are skipped.
double stationarity_check(const MetricChart& metric, const VectorFieldSpec& X,
                          const SolitonCurve& curve, double dt, int stride = 16);

// Uniform-parameter resampling via cubic Hermite interpolation.
SolitonCurve resample_uniform(const SolitonCurve& curve, int n_samples);

void write_curve_csv(std::ostream& os, const SolitonCurve& curve,
                     const std::vector<std::string>& metadata = {});
SolitonCurve read_curve_csv(std::istream& is);

} // namespace solitonlab
