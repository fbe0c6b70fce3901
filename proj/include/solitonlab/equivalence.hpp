#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "solitonlab/fields.hpp"
#include "solitonlab/geometry.hpp"
#include "solitonlab/hypersurface.hpp"

#include "json.hpp"

namespace solitonlab {

enum class VerdictKind { Gradient, NotGradient };

// Outcome of the gradient criterion. On charts of dimension >= 3 a Gradient
// verdict certifies equivalence of the soliton problem with a minimal
// hypersurface problem on (M, e^{-2u} g); in dimension 2 the same quantity
// is reported as a criterion value only, since the surface case breaks the
// equivalence (solitons of non-gradient fields remain Weyl geodesics).
struct EquivalenceVerdict {
    VerdictKind kind = VerdictKind::NotGradient;
    std::string label;                          // "equivalence-verdict" | "criterion-value"
    std::optional<ConformalFactor> potential;   // present iff Gradient
    std::optional<MetricChart> rescaled_metric; // present iff Gradient
    ClosednessReport witness;
    Vec base_point;
    double tolerance = 0.0;
};

EquivalenceVerdict decide(const MetricChart& metric, const VectorFieldSpec& X,
                          int grid_resolution, double tol);

struct SampleRow {
    int index = 0;
    std::string kind;       // "curve" | "patch"
    std::string descriptor; // initial data / window, replayable from the seed
    double soliton_residual = 0.0;
    double paired_residual = 0.0; // gbar-geodesic, |Hbar| or Weyl residual
    bool dropped = false;
};

struct CertificationReport {
    std::string mode; // "gradient-case" | "surface-gap"
    std::string metric_name, field_name;
    std::uint64_t seed = 0;
    double tol = 0.0;
    int total = 0, drop_count = 0;
    std::vector<SampleRow> rows;
    double max_soliton = 0.0, mean_soliton = 0.0;
    double max_paired = 0.0, mean_paired = 0.0;
    std::optional<EquivalenceVerdict> verdict;
    bool valid = true; // false when more than half the samples dropped
};

struct CertifyOptions {
    int n_samples = 5;
    std::uint64_t seed = 42;
    int jobs = 1;
    double curve_length = 2.5;
    double max_step = 1e-3;
    double rtol = 1e-9;
    int patch_grid = 5;
    int decide_grid = 33;
    double decide_tol = 1e-6;
};

// Sets X = grad u and pairs the soliton residual of seeded samples with the
// minimality residual in gbar = e^{-2u} g: for surface charts, seeded
// soliton curves measured against the Levi-Civita connection of gbar; for
// dim >= 3, seeded parameter windows of the supplied patch measured by
// |mean curvature in gbar|.
CertificationReport certify_gradient_case(const MetricChart& metric, const ConformalFactor& u,
                                        const CertifyOptions& opts,
                                        const std::optional<ImmersedPatch>& patch = {});

// Surface-case demonstration: X must fail the gradient criterion; seeded
// soliton curves are then measured against the Weyl connection of (g, X),
// documenting that the geodesic structure survives where the equivalence
// criterion fails.
CertificationReport demonstrate_surface_gap(const MetricChart& metric,
                                            const VectorFieldSpec& X,
                                            const CertifyOptions& opts);

nlohmann::ordered_json verdict_to_json(const EquivalenceVerdict& v);
nlohmann::ordered_json report_to_json(const CertificationReport& r);

} // namespace solitonlab
