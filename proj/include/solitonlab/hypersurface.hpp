#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "solitonlab/fields.hpp"
#include "solitonlab/geometry.hpp"

namespace solitonlab {

// Normal selection rule for an oriented patch. PositiveFrame picks the sign
// making det[nu | Jacobian] > 0; Reference picks g(nu, ref(p)) > 0 with the
// reference direction evaluated at the ambient point.
struct Orientation {
    enum class Rule { PositiveFrame, Reference } rule = Rule::PositiveFrame;
    std::function<Vec(const Vec&)> reference;

    static Orientation positive_frame() { return {}; }
    static Orientation toward(std::function<Vec(const Vec&)> ref);
    static Orientation constant(const Vec& dir);
};

// Parametric hypersurface patch f : parameter box in R^n -> chart, with a
// continuous unit normal chosen by the orientation rule. Ambient dimension
// n+1 in {3, 4}; the curve case n = 1 lives in soliton.hpp.
struct ImmersedPatch {
    int n = 0;
    int ambient_dim = 0;
    Box param_box;
    std::function<Vec(const Vec&)> f;
    Orientation orientation;
    std::string name;
    double fd_scale = 1e-4; // finite-difference step per unit parameter extent
};

struct ShapeData {
    Mat first_form;  // pullback of g
    Mat second_form; // h_ab = g(nabla_a d_b f, nu)
    double H = 0.0;  // (1/n) tr(I^{-1} h), the averaged mean curvature
    Vec normal;
    Mat jacobian;    // ambient x n
};

ShapeData shape_data(const MetricChart& metric, const ImmersedPatch& patch, const Vec& t);

// Tensor grid of parameter points, shrunk so finite differences stay inside.
std::vector<Vec> param_grid(const ImmersedPatch& patch, int per_axis);

// sup over the grid of |H - kSolitonSign * g(X(f(t)), nu)|; orientation
// independent.
double soliton_residual(const MetricChart& metric, const VectorFieldSpec& X,
                        const ImmersedPatch& patch, const std::vector<Vec>& grid);

// Mean curvature of the same patch w.r.t. gbar = e^{-2u} g, by direct
// recomputation (new Christoffel symbols, new normal normalization).
double conformal_mean_curvature(const MetricChart& metric, const ConformalFactor& u,
                                const ImmersedPatch& patch, const Vec& t);

// Patch presets.
ImmersedPatch plane_patch(int ambient_dim, const Vec& origin, const std::vector<Vec>& span,
                          double half_width = 1.0);
ImmersedPatch sphere_patch(int ambient_dim, double radius, std::optional<Vec> center = {});
ImmersedPatch cylinder_patch(double radius, double half_height = 1.0);
ImmersedPatch graph_patch(int ambient_dim, std::function<double(const Vec&)> height, Box base);

// -- rotationally symmetric profiles ---------------------------------------

struct ProfileSample {
    double s = 0.0;
    double r = 0.0, z = 0.0; // distance to the symmetry axis, axial coordinate
    Vec T;                   // unit planar tangent (dr/ds, dz/ds)
    double kappa = 0.0;      // planar curvature demanded by the reduced equation
};

struct ProfileResult {
    std::vector<ProfileSample> samples;
    bool complete = true;
    int n = 0;
    ImmersedPatch patch; // revolved reconstruction
};

// Revolves a sampled planar profile (with unit tangents) about the last
// coordinate axis into a patch, interpolating the profile by cubic Hermite
// segments. n is the intrinsic dimension of the resulting hypersurface.
ImmersedPatch revolve_profile_samples(const std::vector<ProfileSample>& samples, int n);

struct ProfileOptions {
    double rtol = 1e-10;
    double atol = 1e-13;
    double max_step = 1e-3;
    double axis_margin = 1e-3;
};

// Reduces the hypersurface equation for a surface of revolution about the
// last coordinate axis in Euclidean R^{n+1} to the planar profile ODE
//   kappa = -n <X, nu> - (n-1) Tz / r
// (profile curvature plus the n-1 rotational principal curvatures averaging
// to -<X, nu>), integrates it, and revolves the result back into a patch.
// X must be invariant under rotations about the axis (checked).
ProfileResult rotational_profile(const MetricChart& metric, const VectorFieldSpec& X, int n,
                                 double r0, double z0, const Vec& dir_rz, double length,
                                 const ProfileOptions& opts = {});

} // namespace solitonlab
