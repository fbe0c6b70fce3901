#include "solitonlab/equivalence.hpp"

#include <cmath>
#include <sstream>

#include "solitonlab/errors.hpp"
#include "solitonlab/parallel.hpp"
#include "solitonlab/rng.hpp"
#include "solitonlab/soliton.hpp"
#include "solitonlab/weyl.hpp"

namespace solitonlab {

EquivalenceVerdict decide(const MetricChart& metric, const VectorFieldSpec& X,
                          int grid_resolution, double tol) {
    EquivalenceVerdict v;
    v.tolerance = tol;
    v.base_point = metric.domain().center();
    v.label = metric.dim() >= 3 ? "equivalence-verdict" : "criterion-value";
    v.witness = closedness_test(metric, X, grid_resolution, tol);
    if (v.witness.is_closed) {
        v.kind = VerdictKind::Gradient;
        v.potential = recover_potential(metric, X, v.base_point, v.witness);
        v.rescaled_metric = conformal_rescale(metric, *v.potential);
    } else {
        v.kind = VerdictKind::NotGradient;
    }
    return v;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string point_str(const Vec& p) {
    std::string s = "(";
    for (int i = 0; i < p.size(); ++i) s += (i ? "," : "") + fmt(p[i]);
    return s + ")";
}

void finish_summary(CertificationReport& rep) {
    double sum_s = 0.0, sum_p = 0.0;
    int used = 0;
    for (const auto& r : rep.rows) {
        if (r.dropped) {
            ++rep.drop_count;
            continue;
        }
        ++used;
        sum_s += r.soliton_residual;
        sum_p += r.paired_residual;
        rep.max_soliton = std::max(rep.max_soliton, r.soliton_residual);
        rep.max_paired = std::max(rep.max_paired, r.paired_residual);
    }
    rep.mean_soliton = used ? sum_s / used : 0.0;
    rep.mean_paired = used ? sum_p / used : 0.0;
    rep.valid = rep.drop_count * 2 <= rep.total;
}

double curve_soliton_residual(const SolitonCurve& c) {
    double sup = 0.0;
    for (const auto& s : c.samples) sup = std::max(sup, s.residual);
    return sup;
}

// Seeded initial state: position in the inner half of the domain, direction
// uniform in angle.
CurveState seeded_state(SplitMix64& rng, const Box& box) {
    CurveState st;
    st.x = Vec(2);
    for (int a = 0; a < 2; ++a) {
        const double lo = box.lo[a], hi = box.hi[a];
        const double pad = 0.3 * (hi - lo);
        st.x[a] = rng.uniform(lo + pad, hi - pad);
    }
    const double ang = rng.uniform(0.0, 2.0 * M_PI);
    st.T = vec2(std::cos(ang), std::sin(ang));
    return st;
}

} // namespace

CertificationReport certify_gradient_case(const MetricChart& metric, const ConformalFactor& u,
                                        const CertifyOptions& opts,
                                        const std::optional<ImmersedPatch>& patch) {
    // X = grad u (sharp of du), with the analytic gradient when available
    Covector du;
    du.dim = metric.dim();
    const ConformalFactor uu = u;
    const FdOptions fd = metric.fd();
    du.eval = [uu, fd](const Vec& x) { return uu.gradient(x, fd); };
    VectorFieldSpec X = sharp(metric, du);
    X.name = "grad(" + u.name + ")";

    CertificationReport rep;
    rep.mode = "gradient-case";
    rep.metric_name = metric.name();
    rep.field_name = X.name;
    rep.seed = opts.seed;
    rep.tol = opts.decide_tol;
    rep.total = opts.n_samples;
    rep.rows.resize(static_cast<std::size_t>(opts.n_samples));

    const SplitMix64 root(opts.seed);

    if (metric.dim() == 2) {
        const MetricChart gbar = conformal_rescale(metric, u);
        const AffineConnection conn = AffineConnection::levi_civita(gbar);
        SolitonIntegrationOptions iopts;
        iopts.rtol = opts.rtol;
        iopts.max_step = opts.max_step;
        parallel_for(opts.n_samples, opts.jobs, [&](int i) {
            SplitMix64 rng = root.split(static_cast<std::uint64_t>(i));
            SampleRow row;
            row.index = i;
            row.kind = "curve";
            CurveState st = seeded_state(rng, metric.domain());
            row.descriptor = "start " + point_str(st.x) + " dir " + point_str(st.T) +
                             " length " + fmt(opts.curve_length);
            try {
                SolitonCurve c = integrate_soliton(metric, X, st, opts.curve_length, iopts);
                if (!c.complete || c.samples.size() < 5) {
                    row.dropped = true;
                } else {
                    row.soliton_residual = curve_soliton_residual(c);
                    row.paired_residual = unparam_residual(conn, c).sup;
                }
            } catch (const Error&) {
                row.dropped = true;
            }
            rep.rows[static_cast<std::size_t>(i)] = std::move(row);
        });
    } else {
        if (!patch)
            throw PreconditionError(
                "certify_gradient_case: dim >= 3 certification needs a patch of solitons");
        const ImmersedPatch& base = *patch;
        parallel_for(opts.n_samples, opts.jobs, [&](int i) {
            SplitMix64 rng = root.split(static_cast<std::uint64_t>(i));
            SampleRow row;
            row.index = i;
            row.kind = "patch";
            // seeded window: a sub-box of the parameter box
            ImmersedPatch window = base;
            Vec lo(base.n), hi(base.n);
            for (int a = 0; a < base.n; ++a) {
                const double w = base.param_box.hi[a] - base.param_box.lo[a];
                const double ext = 0.3 * w;
                const double c0 = rng.uniform(base.param_box.lo[a] + 0.5 * ext,
                                              base.param_box.hi[a] - 0.5 * ext);
                lo[a] = c0 - 0.5 * ext;
                hi[a] = c0 + 0.5 * ext;
            }
            window.param_box = Box{lo, hi};
            row.descriptor = "window lo " + point_str(lo) + " hi " + point_str(hi);
            try {
                const auto grid = param_grid(window, opts.patch_grid);
                row.soliton_residual = soliton_residual(metric, X, window, grid);
                double sup = 0.0;
                for (const Vec& t : grid)
                    sup = std::max(sup, std::abs(conformal_mean_curvature(metric, u, window, t)));
                row.paired_residual = sup;
            } catch (const Error&) {
                row.dropped = true;
            }
            rep.rows[static_cast<std::size_t>(i)] = std::move(row);
        });
    }
    finish_summary(rep);
    return rep;
}

CertificationReport demonstrate_surface_gap(const MetricChart& metric,
                                            const VectorFieldSpec& X,
                                            const CertifyOptions& opts) {
    if (metric.dim() != 2)
        throw DimensionError("demonstrate_surface_gap: the surface-case demonstration runs "
                             "on charts of dimension 2");
    EquivalenceVerdict v = decide(metric, X, opts.decide_grid, opts.decide_tol);
    if (v.kind == VerdictKind::Gradient)
        throw PreconditionError("demonstrate_surface_gap: field '" + X.name +
                                "' passes the gradient criterion; use certify_gradient_case");

    CertificationReport rep;
    rep.mode = "surface-gap";
    rep.metric_name = metric.name();
    rep.field_name = X.name;
    rep.seed = opts.seed;
    rep.tol = opts.decide_tol;
    rep.total = opts.n_samples;
    rep.rows.resize(static_cast<std::size_t>(opts.n_samples));
    rep.verdict = v;

    const AffineConnection conn = AffineConnection::weyl(metric, X);
    SolitonIntegrationOptions iopts;
    iopts.rtol = opts.rtol;
    iopts.max_step = opts.max_step;
    const SplitMix64 root(opts.seed);
    parallel_for(opts.n_samples, opts.jobs, [&](int i) {
        SplitMix64 rng = root.split(static_cast<std::uint64_t>(i));
        SampleRow row;
        row.index = i;
        row.kind = "curve";
        CurveState st = seeded_state(rng, metric.domain());
        row.descriptor = "start " + point_str(st.x) + " dir " + point_str(st.T) + " length " +
                         fmt(opts.curve_length);
        try {
            SolitonCurve c = integrate_soliton(metric, X, st, opts.curve_length, iopts);
            if (!c.complete || c.samples.size() < 5) {
                row.dropped = true;
            } else {
                row.soliton_residual = curve_soliton_residual(c);
                row.paired_residual = unparam_residual(conn, c).sup;
            }
        } catch (const Error&) {
            row.dropped = true;
        }
        rep.rows[static_cast<std::size_t>(i)] = std::move(row);
    });
    finish_summary(rep);
    return rep;
}

nlohmann::ordered_json verdict_to_json(const EquivalenceVerdict& v) {
    nlohmann::ordered_json j;
    j["kind"] = v.kind == VerdictKind::Gradient ? "GRADIENT" : "NOT_GRADIENT";
    j["label"] = v.label;
    j["tolerance"] = v.tolerance;
    j["base_point"] = std::vector<double>(v.base_point.data(),
                                          v.base_point.data() + v.base_point.size());
    nlohmann::ordered_json w;
    w["max_curl_residual"] = v.witness.max_curl_residual;
    w["worst_point"] = std::vector<double>(v.witness.worst_point.data(),
                                           v.witness.worst_point.data() +
                                               v.witness.worst_point.size());
    w["is_closed"] = v.witness.is_closed;
    w["tolerance"] = v.witness.tolerance;
    w["grid_resolution"] = v.witness.grid_resolution;
    nlohmann::ordered_json loops = nlohmann::ordered_json::array();
    for (const auto& li : v.witness.loop_integrals)
        loops.push_back({{"loop", li.descriptor}, {"value", li.value}});
    w["loop_integrals"] = loops;
    j["witness"] = w;
    return j;
}

nlohmann::ordered_json report_to_json(const CertificationReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = "solitonlab.certification.v1";
    j["mode"] = r.mode;
    nlohmann::ordered_json inputs;
    inputs["metric"] = r.metric_name;
    inputs["field"] = r.field_name;
    inputs["seed"] = r.seed;
    inputs["tolerance"] = r.tol;
    inputs["samples"] = r.total;
    j["inputs"] = inputs;
    if (r.verdict) j["verdict"] = verdict_to_json(*r.verdict);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json rr;
        rr["index"] = row.index;
        rr["kind"] = row.kind;
        rr["descriptor"] = row.descriptor;
        rr["dropped"] = row.dropped;
        if (!row.dropped) {
            rr["soliton_residual"] = row.soliton_residual;
            rr["paired_residual"] = row.paired_residual;
        }
        rows.push_back(rr);
    }
    j["samples"] = rows;
    nlohmann::ordered_json s;
    s["max_soliton_residual"] = r.max_soliton;
    s["mean_soliton_residual"] = r.mean_soliton;
    s["max_paired_residual"] = r.max_paired;
    s["mean_paired_residual"] = r.mean_paired;
    s["dropped"] = r.drop_count;
    s["total"] = r.total;
    s["valid"] = r.valid;
    j["summary"] = s;
    return j;
}

} // namespace solitonlab
