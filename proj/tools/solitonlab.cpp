// solitonlab - curves and hypersurfaces driven by an ambient vector field:
// traces solutions of the curvature equation, decides the gradient
// criterion, and certifies the conformal / Weyl-geodesic correspondences.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "solitonlab/config.hpp"
#include "solitonlab/equivalence.hpp"
#include "solitonlab/errors.hpp"
#include "solitonlab/soliton.hpp"
#include "solitonlab/svg.hpp"
#include "solitonlab/verify.hpp"
#include "solitonlab/weyl.hpp"

namespace fs = std::filesystem;
using namespace solitonlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCriterionFalse = 3;

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    int jobs = 1;
    double tol = 0.0; // 0 = keep per-command defaults
    std::string format = "csv";
};

ConfigFile resolve_config(const GlobalArgs& g, const CLI::App& cmd) {
    ConfigFile cfg;
    if (!g.config_path.empty()) cfg = ConfigFile::parse_file(g.config_path);
    // flags win over file values
    if (cmd.count("--seed") || !cfg.has("run", "seed"))
        cfg.set("run", "seed", std::to_string(g.seed));
    if (cmd.count("--out") || !cfg.has("run", "out")) cfg.set("run", "out", g.out_dir);
    if (cmd.count("--tol")) cfg.set("run", "tol", std::to_string(g.tol));
    if (cmd.count("--format") || !cfg.has("run", "format")) cfg.set("run", "format", g.format);
    // tolerances must be strictly positive
    for (const char* key : {"tol", "max_step", "rtol"})
        for (const char* sec : {"run", "curve", "geodesic", "gradient_check"})
            if (cfg.has(sec, key) && cfg.get_double(sec, key, 1.0) <= 0.0)
                throw ConfigError(std::string("[") + sec + "] " + key +
                                  " must be strictly positive");
    return cfg;
}

fs::path ensure_outdir(const ConfigFile& cfg) {
    const fs::path dir = cfg.get_string("run", "out", "out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path probe = dir / ".write-probe";
    std::ofstream p(probe);
    if (!p) throw ConfigError("output directory '" + dir.string() + "' is not writable");
    p.close();
    fs::remove(probe, ec);
    return dir;
}

std::vector<std::string> meta_lines(const ConfigFile& cfg, const std::string& command) {
    std::vector<std::string> m;
    m.push_back("command = " + command);
    for (const auto& line : cfg.dump_lines()) m.push_back(line);
    return m;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    os << text;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j,
                const ConfigFile& cfg, const std::string& command) {
    nlohmann::ordered_json out = j;
    nlohmann::ordered_json meta = nlohmann::ordered_json::array();
    for (const auto& line : meta_lines(cfg, command)) meta.push_back(line);
    out["resolved_config"] = meta;
    write_text(path, out.dump(2) + "\n");
}

SolitonIntegrationOptions curve_options(const ConfigFile& cfg) {
    SolitonIntegrationOptions o;
    o.rtol = cfg.get_double("run", "tol", cfg.get_double("curve", "rtol", 1e-9));
    o.max_step = cfg.get_double("curve", "max_step", 2e-3);
    return o;
}

std::vector<SolitonCurve> trace_curves(const ConfigFile& cfg, const MetricChart& metric,
                                       const VectorFieldSpec& X) {
    const auto starts = cfg.all("curve", "start");
    if (starts.empty()) throw ConfigError("[curve] needs at least one start = x y");
    const Vec dir = cfg.get_vec("curve", "direction").value_or(vec2(1.0, 0.0));
    const double length = cfg.get_double("curve", "length", 6.0);
    const auto opts = curve_options(cfg);
    std::vector<SolitonCurve> out;
    for (const auto* e : starts) {
        const Vec x0 = parse_numbers(e->value, "curve start");
        CurveState st;
        st.x = x0;
        st.T = dir;
        out.push_back(integrate_soliton(metric, X, st, length, opts));
    }
    return out;
}

void emit_curves_svg(const fs::path& path, const std::vector<SolitonCurve>& curves,
                     const std::string& caption, const ConfigFile& cfg,
                     const std::string& command) {
    static const char* colors[] = {"#1f6fb2", "#c94f22", "#3a8a3a", "#7a4fb2", "#b2941f"};
    std::vector<SvgPolyline> lines;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        SvgPolyline pl;
        pl.color = colors[i % 5];
        for (const auto& s : curves[i].samples) pl.points.push_back(s.x);
        lines.push_back(std::move(pl));
    }
    std::ostringstream os;
    write_svg(os, lines, caption, meta_lines(cfg, command));
    write_text(path, os.str());
}

int cmd_trace_soliton(const ConfigFile& cfg) {
    const fs::path dir = ensure_outdir(cfg);
    const MetricChart metric = build_metric(cfg);
    const VectorFieldSpec X = build_field(cfg, metric.dim(), &metric.domain());
    const auto curves = trace_curves(cfg, metric, X);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        std::ostringstream os;
        write_curve_csv(os, curves[i], meta_lines(cfg, "trace-soliton"));
        write_text(dir / ("curve_" + std::to_string(i) + ".csv"), os.str());
    }
    if (cfg.get_string("run", "format", "csv") == "svg")
        emit_curves_svg(dir / "trace.svg", curves,
                        "soliton curves | field " + X.name + " on " + metric.name(), cfg,
                        "trace-soliton");
    std::cout << "wrote " << curves.size() << " curve file(s) to " << dir.string() << "\n";
    return kExitOk;
}

int cmd_trace_weyl(const ConfigFile& cfg) {
    const fs::path dir = ensure_outdir(cfg);
    const MetricChart metric = build_metric(cfg);
    VectorFieldSpec X = cfg.has("field") ? build_field(cfg, metric.dim(), &metric.domain())
                                         : zero_field(metric.dim());
    const AffineConnection conn = AffineConnection::weyl(metric, X);

    // measurement mode: score an existing curve CSV against the connection
    const std::string measure = cfg.get_string("geodesic", "measure", "");
    if (!measure.empty()) {
        std::ifstream is(measure);
        if (!is) throw ConfigError("trace-weyl: cannot open curve CSV '" + measure + "'");
        const SolitonCurve curve = read_curve_csv(is);
        const ResidualReport rep = unparam_residual(conn, curve);
        nlohmann::ordered_json j;
        j["schema"] = "solitonlab.weyl-residual.v1";
        j["inputs"] = {{"metric", metric.name()}, {"field", X.name}, {"curve", measure}};
        j["sup"] = rep.sup;
        j["mean"] = rep.mean;
        j["argmax_t"] = rep.argmax_t;
        j["argmax_x"] = std::vector<double>(rep.argmax_x.data(),
                                            rep.argmax_x.data() + rep.argmax_x.size());
        j["samples"] = rep.samples;
        write_json(dir / "weyl_residual.json", j, cfg, "trace-weyl");
        std::cout << "weyl residual: sup " << rep.sup << ", mean " << rep.mean << "\n";
        return kExitOk;
    }
    const Vec x0 = cfg.get_vec("geodesic", "start").value_or(metric.domain().center());
    Vec v0 = cfg.get_vec("geodesic", "velocity").value_or(Vec::Ones(metric.dim()));
    GeodesicOptions gopts;
    gopts.rtol = cfg.get_double("run", "tol", 1e-9);
    gopts.max_step = cfg.get_double("geodesic", "max_step", 2e-3);
    const ParamCurve c = integrate_weyl_geodesic(
        conn, x0, v0, cfg.get_double("geodesic", "length", 2.0), gopts);

    std::ostringstream os;
    os << "# solitonlab weyl geodesic v1\n";
    for (const auto& m : meta_lines(cfg, "trace-weyl")) os << "# " << m << "\n";
    os << "t";
    for (int i = 1; i <= metric.dim(); ++i) os << ",x" << i;
    for (int i = 1; i <= metric.dim(); ++i) os << ",v" << i;
    os << "\n";
    char buf[64];
    for (std::size_t k = 0; k < c.t.size(); ++k) {
        snprintf(buf, sizeof buf, "%.17g", c.t[k]);
        os << buf;
        for (int i = 0; i < metric.dim(); ++i) {
            snprintf(buf, sizeof buf, ",%.17g", c.x[k][i]);
            os << buf;
        }
        for (int i = 0; i < metric.dim(); ++i) {
            snprintf(buf, sizeof buf, ",%.17g", c.v[k][i]);
            os << buf;
        }
        os << "\n";
    }
    write_text(dir / "weyl_geodesic.csv", os.str());
    if (cfg.get_string("run", "format", "csv") == "svg" && metric.dim() == 2) {
        SvgPolyline pl;
        for (const auto& x : c.x) pl.points.push_back(x);
        std::ostringstream svg;
        write_svg(svg, {pl}, "Weyl geodesic | field " + X.name + " on " + metric.name(),
                  meta_lines(cfg, "trace-weyl"));
        write_text(dir / "weyl_geodesic.svg", svg.str());
    }
    std::cout << "wrote weyl_geodesic.csv (" << c.t.size() << " samples) to " << dir.string()
              << "\n";
    return kExitOk;
}

int cmd_gradient_check(const ConfigFile& cfg) {
    const fs::path dir = ensure_outdir(cfg);
    const MetricChart metric = build_metric(cfg);
    const VectorFieldSpec X = build_field(cfg, metric.dim(), &metric.domain());
    const int grid = cfg.get_int("gradient_check", "grid", 33);
    const double tol = cfg.get_double("run", "tol", cfg.get_double("gradient_check", "tol", 1e-6));
    const EquivalenceVerdict v = decide(metric, X, grid, tol);

    nlohmann::ordered_json j;
    j["schema"] = "solitonlab.gradient-check.v1";
    j["inputs"] = {{"metric", metric.name()}, {"field", X.name},
                   {"grid", grid},            {"tolerance", tol}};
    j["verdict"] = verdict_to_json(v);
    write_json(dir / "gradient_check.json", j, cfg, "gradient-check");

    if (v.kind == VerdictKind::Gradient) {
        // potential sampled on a grid
        std::ostringstream os;
        os << "# solitonlab potential v1\n";
        for (const auto& m : meta_lines(cfg, "gradient-check")) os << "# " << m << "\n";
        for (int i = 1; i <= metric.dim(); ++i) os << (i > 1 ? "," : "") << "x" << i;
        os << ",u\n";
        const int res = 33;
        const Box& box = metric.domain();
        std::vector<int> idx(metric.dim(), 0);
        Vec x(metric.dim());
        const long total = static_cast<long>(std::pow(res, std::min(metric.dim(), 2)));
        char buf[64];
        for (long cnt = 0; cnt < total; ++cnt) {
            for (int a = 0; a < metric.dim(); ++a) {
                const double pad = 0.02 * (box.hi[a] - box.lo[a]);
                x[a] = a < 2 ? box.lo[a] + pad +
                                   (box.hi[a] - box.lo[a] - 2 * pad) * idx[a] / (res - 1)
                             : box.center()[a];
            }
            for (int a = 0; a < metric.dim(); ++a) {
                snprintf(buf, sizeof buf, "%.17g", x[a]);
                os << (a ? "," : "") << buf;
            }
            snprintf(buf, sizeof buf, ",%.17g\n", (*v.potential)(x));
            os << buf;
            for (int a = 0; a < std::min(metric.dim(), 2); ++a) {
                if (++idx[a] < res) break;
                idx[a] = 0;
            }
        }
        write_text(dir / "potential.csv", os.str());
        std::cout << "GRADIENT (max curl residual " << v.witness.max_curl_residual << ")\n";
        return kExitOk;
    }
    std::cout << "NOT_GRADIENT (max curl residual " << v.witness.max_curl_residual << " at ["
              << v.witness.worst_point.transpose() << "])\n";
    return kExitCriterionFalse;
}

int cmd_certify(const ConfigFile& cfg, int jobs) {
    const fs::path dir = ensure_outdir(cfg);
    const MetricChart metric = build_metric(cfg);
    const ConformalFactor u = build_potential(cfg, metric.dim());
    CertifyOptions opts;
    opts.n_samples = cfg.get_int("certify", "samples", 5);
    opts.seed = cfg.get_u64("run", "seed", 42);
    opts.jobs = jobs;
    opts.curve_length = cfg.get_double("certify", "length", 2.5);
    opts.rtol = cfg.get_double("run", "tol", 1e-9);
    std::optional<ImmersedPatch> patch;
    if (metric.dim() >= 3) patch = build_patch(cfg, metric.dim());
    const CertificationReport rep = certify_gradient_case(metric, u, opts, patch);
    write_json(dir / "certify.json", report_to_json(rep), cfg, "certify");
    std::cout << "certify: max soliton residual " << rep.max_soliton
              << ", max minimality residual " << rep.max_paired << ", dropped "
              << rep.drop_count << "/" << rep.total << "\n";
    return rep.valid ? kExitOk : kExitVerifyFail;
}

int cmd_surface_gap(const ConfigFile& cfg, int jobs) {
    const fs::path dir = ensure_outdir(cfg);
    const MetricChart metric = build_metric(cfg);
    const VectorFieldSpec X = build_field(cfg, metric.dim(), &metric.domain());
    CertifyOptions opts;
    opts.n_samples = cfg.get_int("gap", "samples", 5);
    opts.seed = cfg.get_u64("run", "seed", 42);
    opts.jobs = jobs;
    opts.curve_length = cfg.get_double("gap", "length", 2.5);
    const CertificationReport rep = demonstrate_surface_gap(metric, X, opts);
    write_json(dir / "surface_gap.json", report_to_json(rep), cfg, "surface-gap");
    std::cout << "surface-gap: witness residual "
              << (rep.verdict ? rep.verdict->witness.max_curl_residual : 0.0)
              << ", max Weyl residual " << rep.max_paired << ", dropped " << rep.drop_count
              << "/" << rep.total << "\n";
    return rep.valid ? kExitOk : kExitVerifyFail;
}

int cmd_profile(const ConfigFile& cfg) {
    const fs::path dir = ensure_outdir(cfg);
    const MetricChart metric = build_metric(cfg);
    const VectorFieldSpec X = cfg.has("field") ? build_field(cfg, metric.dim(), &metric.domain())
                                               : zero_field(metric.dim());
    const int n = cfg.get_int("profile", "n", metric.dim() - 1);
    const Vec start = cfg.get_vec("profile", "start").value_or(vec2(1.0, 0.0));
    const Vec pdir = cfg.get_vec("profile", "direction").value_or(vec2(0.0, 1.0));
    ProfileOptions popts;
    popts.rtol = cfg.get_double("run", "tol", 1e-10);
    const ProfileResult pr =
        rotational_profile(metric, X, n, start[0], start[1], pdir,
                           cfg.get_double("profile", "length", 2.0), popts);

    char buf[160];
    std::ostringstream os;
    os << "# solitonlab profile v1\n";
    for (const auto& m : meta_lines(cfg, "profile")) os << "# " << m << "\n";
    os << "s,r,z,Tr,Tz,kappa\n";
    for (const auto& s : pr.samples) {
        snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.s, s.r, s.z,
                 s.T[0], s.T[1], s.kappa);
        os << buf;
    }
    write_text(dir / "profile.csv", os.str());

    // sampled reconstruction: parameters, position, normal, H, residual
    const auto grid = param_grid(pr.patch, cfg.get_int("profile", "grid", 5));
    std::ostringstream ps;
    ps << "# solitonlab patch samples v1\n";
    for (const auto& m : meta_lines(cfg, "profile")) ps << "# " << m << "\n";
    for (int a = 1; a <= pr.patch.n; ++a) ps << (a > 1 ? "," : "") << "t" << a;
    for (int i = 1; i <= pr.patch.ambient_dim; ++i) ps << ",x" << i;
    for (int i = 1; i <= pr.patch.ambient_dim; ++i) ps << ",nu" << i;
    ps << ",H,residual\n";
    double residual = 0.0;
    for (const Vec& t : grid) {
        const ShapeData sd = shape_data(metric, pr.patch, t);
        const Vec p = pr.patch.f(t);
        const double row_res =
            std::abs(sd.H - kSolitonSign * X.eval(p).dot(metric.value(p) * sd.normal));
        residual = std::max(residual, row_res);
        for (int a = 0; a < pr.patch.n; ++a) {
            snprintf(buf, sizeof buf, "%.17g", t[a]);
            ps << (a ? "," : "") << buf;
        }
        for (int i = 0; i < pr.patch.ambient_dim; ++i) {
            snprintf(buf, sizeof buf, ",%.17g", p[i]);
            ps << buf;
        }
        for (int i = 0; i < pr.patch.ambient_dim; ++i) {
            snprintf(buf, sizeof buf, ",%.17g", sd.normal[i]);
            ps << buf;
        }
        snprintf(buf, sizeof buf, ",%.17g,%.17g\n", sd.H, row_res);
        ps << buf;
    }
    write_text(dir / "patch_samples.csv", ps.str());

    nlohmann::ordered_json j;
    j["schema"] = "solitonlab.profile.v1";
    j["inputs"] = {{"metric", metric.name()},
                   {"field", X.name},
                   {"n", n},
                   {"start", {start[0], start[1]}},
                   {"length", cfg.get_double("profile", "length", 2.0)}};
    j["complete"] = pr.complete;
    j["samples"] = static_cast<int>(pr.samples.size());
    j["patch_residual"] = residual;
    write_json(dir / "profile.json", j, cfg, "profile");
    std::cout << "profile: " << pr.samples.size()
              << " samples, reconstructed patch residual " << residual << "\n";
    return kExitOk;
}

int cmd_verify(const ConfigFile& cfg, const std::vector<std::string>& suites,
               double tighten, int jobs) {
    const fs::path dir = ensure_outdir(cfg);
    VerifyOptions opts;
    opts.seed = cfg.get_u64("run", "seed", 42);
    opts.jobs = jobs;
    opts.tighten = tighten;
    opts.suites = suites;
    const auto rows = run_acceptance(opts);
    bool all = true;
    for (const auto& r : rows) {
        all = all && r.pass;
        char buf[64];
        snprintf(buf, sizeof buf, "%-10.3e <= %-10.3e", r.value, r.threshold);
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << "  " << buf << "  " << r.name
                  << (r.detail.empty() ? "" : "  [" + r.detail + "]") << "\n";
    }
    std::cout << (all ? "all criteria passed" : "SOME CRITERIA FAILED") << "\n";
    write_text(dir / "verify.json", verify_to_json(rows, opts).dump(2) + "\n");
    return all ? kExitOk : kExitVerifyFail;
}

int cmd_render(const ConfigFile& cfg, const std::vector<std::string>& inputs) {
    const fs::path dir = ensure_outdir(cfg);
    if (inputs.empty()) throw ConfigError("render: give at least one curve CSV via --in");
    std::vector<SolitonCurve> curves;
    for (const auto& path : inputs) {
        std::ifstream is(path);
        if (!is) throw ConfigError("render: cannot open '" + path + "'");
        curves.push_back(read_curve_csv(is));
    }
    emit_curves_svg(dir / "render.svg", curves, "rendered curves", cfg, "render");
    std::cout << "wrote render.svg (" << curves.size() << " curves) to " << dir.string()
              << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"soliton curve and hypersurface laboratory"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "run configuration file");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "seed for sampled runs");
    app.add_option("--jobs", g.jobs, "max parallel sample evaluations");
    app.add_option("--tol", g.tol, "integration / decision tolerance override");
    app.add_option("--format", g.format, "csv|json|svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));

    app.fallthrough(); // global flags may appear after the subcommand

    auto* trace = app.add_subcommand("trace-soliton", "integrate soliton curves");
    auto* weyl = app.add_subcommand("trace-weyl", "integrate a Weyl-connection geodesic");
    auto* gradcheck = app.add_subcommand("gradient-check", "decide the gradient criterion");
    auto* certify = app.add_subcommand("certify", "pair soliton and minimality residuals "
                                                  "for a gradient field");
    auto* gap = app.add_subcommand("surface-gap", "surface-case demonstration for a "
                                                  "non-gradient field");
    auto* profile = app.add_subcommand("profile", "rotationally symmetric profile");
    auto* verify = app.add_subcommand("verify", "run the acceptance suites");
    std::vector<std::string> suites;
    double tighten = 1.0;
    verify->add_option("--suite", suites, "run selected suites (c1..c9)");
    verify->add_option("--tighten", tighten, "scale every threshold (0.01 = 100x tighter)");
    auto* render = app.add_subcommand("render", "render curve CSVs to SVG");
    std::vector<std::string> render_in;
    render->add_option("--in", render_in, "curve CSV files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const ConfigFile cfg = resolve_config(g, app);
        if (app.got_subcommand(trace)) return cmd_trace_soliton(cfg);
        if (app.got_subcommand(weyl)) return cmd_trace_weyl(cfg);
        if (app.got_subcommand(gradcheck)) return cmd_gradient_check(cfg);
        if (app.got_subcommand(certify)) return cmd_certify(cfg, g.jobs);
        if (app.got_subcommand(gap)) return cmd_surface_gap(cfg, g.jobs);
        if (app.got_subcommand(profile)) return cmd_profile(cfg);
        if (app.got_subcommand(verify)) return cmd_verify(cfg, suites, tighten, g.jobs);
        if (app.got_subcommand(render)) return cmd_render(cfg, render_in);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
