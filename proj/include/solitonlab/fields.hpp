#pragma once
#include <functional>
#include <string>
#include <vector>

#include "solitonlab/geometry.hpp"
#include "solitonlab/types.hpp"

namespace solitonlab {

struct VectorFieldSpec {
    int dim = 0;
    std::function<Vec(const Vec&)> eval;
    std::string name;

    Vec operator()(const Vec& x) const { return eval(x); }
};

// Components of a 1-form on the chart.
struct Covector {
    int dim = 0;
    std::function<Vec(const Vec&)> eval;

    Vec operator()(const Vec& x) const { return eval(x); }
};

struct LoopIntegral {
    std::string descriptor;
    double value = 0.0;
};

// Result of the closedness test for the flat of a field: sup-norm of the
// exterior derivative components over a sample grid, plus circulation
// integrals around axis-aligned rectangles as independent witnesses. On a
// box chart closed means exact, so is_closed decides gradient-ness.
struct ClosednessReport {
    double max_curl_residual = 0.0;
    Vec worst_point;
    std::vector<LoopIntegral> loop_integrals;
    bool is_closed = false;
    double tolerance = 0.0;
    int grid_resolution = 0;
};

// (X_flat)_j = g_ij X^i
Covector flat(const MetricChart& metric, const VectorFieldSpec& X);
// (w_sharp)^i = g^ij w_j
VectorFieldSpec sharp(const MetricChart& metric, const Covector& w);

ClosednessReport closedness_test(const MetricChart& metric, const VectorFieldSpec& X,
                                 int grid_resolution, double tol);

// Potential of a closed field by staircase line integration of X_flat from
// base_point; u(base_point) = 0. Requires a passing witness; verifies that
// the chart gradient of u reproduces X_flat on a coarse sample.
ConformalFactor recover_potential(const MetricChart& metric, const VectorFieldSpec& X,
                                  const Vec& base_point, const ClosednessReport& witness,
                                  double quad_tol = 1e-12);

// Flow of X through p for time t (adaptive RK, local tolerance tol). Throws
// DomainExitError with the exit time if the trajectory leaves the box.
Vec flow(const VectorFieldSpec& X, const Box& domain, const Vec& p, double t,
         double tol = 1e-10);

// Circulation of X_flat around the axis-aligned rectangle [a1,b1]x[a2,b2]
// in the (axis_i, axis_j) plane through `base` (other coordinates fixed).
double circulation(const MetricChart& metric, const VectorFieldSpec& X, const Vec& base,
                   int axis_i, int axis_j, double ai, double bi, double aj, double bj);

// Built-in field presets.
VectorFieldSpec zero_field(int dim);
VectorFieldSpec radial_field(int dim);
VectorFieldSpec rotation_field(double omega, int dim = 2);
VectorFieldSpec translation_field(const Vec& direction);

} // namespace solitonlab
