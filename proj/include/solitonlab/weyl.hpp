#pragma once
#include <string>
#include <vector>

#include "solitonlab/fields.hpp"
#include "solitonlab/geometry.hpp"
#include "solitonlab/soliton.hpp"

namespace solitonlab {

// Torsion-free affine connection on a chart: the Levi-Civita connection of a
// base metric, optionally modified by a vector field X into the Weyl
// connection whose unparametrized geodesics are the X-soliton curves:
//
//   nabla_{Y1} Y2 = D_{Y1} Y2 + g(Y1,Y2) X - g(X,Y1) Y2 - g(X,Y2) Y1.
//
// For X = grad u this is exactly the Levi-Civita connection of e^{-2u} g,
// matching the conformal description of gradient solitons. (The signs of
// the X terms are tied to the kSolitonSign convention; see soliton.hpp.)
class AffineConnection {
public:
    static AffineConnection levi_civita(MetricChart metric);
    static AffineConnection weyl(MetricChart metric, VectorFieldSpec X);

    // Non-derivative part of nabla_v w at x (the Gamma(v, w) analogue);
    // symmetric in v and w.
    Vec coefficients(const Vec& x, const Vec& v, const Vec& w) const;

    const MetricChart& base_metric() const { return metric_; }
    const VectorFieldSpec& field() const { return X_; }

private:
    AffineConnection(MetricChart m, VectorFieldSpec X);
    MetricChart metric_;
    VectorFieldSpec X_;
};

inline Vec weyl_apply(const AffineConnection& conn, const Vec& x, const Vec& v, const Vec& w) {
    return conn.coefficients(x, v, w);
}

// A curve with an explicit parameter (not necessarily arclength).
struct ParamCurve {
    std::vector<double> t;
    std::vector<Vec> x;
    std::vector<Vec> v; // velocities where known (may be empty)
    bool complete = true;

    static ParamCurve from_soliton(const SolitonCurve& c);
};

struct GeodesicOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double max_step = 2e-3;
};

// Integrates c'' = -coefficients(c, c', c') in an affine parameter.
ParamCurve integrate_weyl_geodesic(const AffineConnection& conn, const Vec& x0, const Vec& v0,
                                   double param_length, const GeodesicOptions& opts = {});

struct ResidualReport {
    double sup = 0.0;
    double mean = 0.0;
    double argmax_t = 0.0;
    Vec argmax_x;
    int samples = 0;
};

// Unparametrized-geodesic defect of a sampled curve against the connection:
// at each interior sample, a = c'' + coefficients(c, c', c') is formed with
// centered finite differences on the stored parameter grid and the component
// of a transverse to c' is measured, normalized by |c'|^2. Zero exactly for
// reparametrized geodesics.
ResidualReport unparam_residual(const AffineConnection& conn, const ParamCurve& curve);
ResidualReport unparam_residual(const AffineConnection& conn, const SolitonCurve& curve);

} // namespace solitonlab
