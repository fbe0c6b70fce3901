#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "solitonlab/types.hpp"

namespace solitonlab {

// Axis-aligned box in chart coordinates.
struct Box {
    Vec lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vec& x, double margin = 0.0) const;
    // Smallest per-axis distance from x to the boundary (negative outside).
    double boundary_margin(const Vec& x) const;
    Vec center() const { return 0.5 * (lo + hi); }
    Vec extent() const { return hi - lo; }
    double scale() const { return (hi - lo).maxCoeff(); }

    static Box cube(int dim, double half_width);
    static Box of(std::initializer_list<double> lo_hi_pairs);
};

// Finite-difference step sizes; both are scaled by max(1, |x|) at the
// evaluation point. h1 drives first derivatives, h2 second derivatives.
struct FdOptions {
    double h1 = 1e-5;
    double h2 = 1e-4;
};

using MatrixField = std::function<Mat(const Vec&)>;
// partials[k](i,j) = d g_ij / d x_k
using MatrixFieldDeriv = std::function<std::vector<Mat>(const Vec&)>;

// A Riemannian metric on an open chart box, evaluable pointwise. Evaluation
// checks symmetry and positive definiteness (Cholesky); failure is a hard
// DegenerateMetricError. Values are immutable and safe to share across
// threads.
class MetricChart {
public:
    MetricChart(int dim, Box domain, MatrixField g, std::string name,
                MatrixFieldDeriv dg = nullptr, FdOptions fd = {});

    int dim() const { return dim_; }
    const Box& domain() const { return domain_; }
    const std::string& name() const { return name_; }
    bool has_analytic_derivatives() const { return static_cast<bool>(dg_); }
    const FdOptions& fd() const { return fd_; }

    Mat value(const Vec& x) const;
    Mat inverse(const Vec& x) const;
    // Analytic partials when supplied, else central differences of value().
    std::vector<Mat> partials(const Vec& x) const;

    double inner(const Vec& x, const Vec& v, const Vec& w) const;
    double norm(const Vec& x, const Vec& v) const;

private:
    int dim_;
    Box domain_;
    MatrixField g_;
    std::string name_;
    MatrixFieldDeriv dg_;
    FdOptions fd_;
};

// Scalar conformal factor u with optional analytic chart gradient.
struct ConformalFactor {
    std::function<double(const Vec&)> u;
    std::function<Vec(const Vec&)> grad; // may be null
    std::string name = "u";

    double operator()(const Vec& x) const { return u(x); }
    // Analytic gradient when present, else central differences.
    Vec gradient(const Vec& x, const FdOptions& fd = {}) const;

    static ConformalFactor zero();
};

// Christoffel symbols of the second kind at x: symbols[i](j,k) = Gamma^i_jk.
struct Christoffels {
    std::vector<Mat> symbols;
    // Gamma(v, w)^i = Gamma^i_jk v^j w^k
    Vec apply(const Vec& v, const Vec& w) const;
};

Christoffels christoffel(const MetricChart& metric, const Vec& x);

// Gaussian curvature of a surface chart (dim 2 only) by the Brioschi formula.
double gauss_curvature(const MetricChart& metric, const Vec& x);

// gbar = e^{-2u} g. Derivative data is composed analytically when both the
// metric partials and grad u are analytic.
MetricChart conformal_rescale(const MetricChart& metric, const ConformalFactor& u);

// Built-in metric presets.
MetricChart euclidean_metric(int dim, std::optional<Box> domain = {});
MetricChart polar_metric(std::optional<Box> domain = {});
MetricChart half_plane_metric(std::optional<Box> domain = {});
MetricChart sphere_stereographic_metric(int dim, std::optional<Box> domain = {});

} // namespace solitonlab
