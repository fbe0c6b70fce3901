#include "solitonlab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "solitonlab/errors.hpp"
#include "solitonlab/expr.hpp"

namespace solitonlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse(is, path);
}

ConfigFile ConfigFile::parse(std::istream& is, const std::string& name) {
    ConfigFile cfg;
    cfg.name_ = name;
    std::string line, section = "run";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(name + ":" + std::to_string(lineno) +
                                  ": unterminated section header '" + t + "'");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError(name + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": expected 'key = value', found '" + t + "'");
        Entry e;
        e.key = trim(t.substr(0, eq));
        e.value = trim(t.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
        cfg.sections_[section].push_back(std::move(e));
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section) const {
    return sections_.count(section) > 0;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return nullptr;
    const Entry* last = nullptr;
    for (const auto& e : it->second)
        if (e.key == key) last = &e;
    return last; // later entries (e.g. CLI overrides) win
}

std::vector<const ConfigFile::Entry*> ConfigFile::all(const std::string& section,
                                                      const std::string& key) const {
    std::vector<const Entry*> out;
    auto it = sections_.find(section);
    if (it == sections_.end()) return out;
    for (const auto& e : it->second)
        if (e.key == key) out.push_back(&e);
    return out;
}

std::string ConfigFile::get_string(const std::string& sec, const std::string& key,
                                   const std::string& fallback) const {
    const Entry* e = find(sec, key);
    return e ? e->value : fallback;
}

double ConfigFile::get_double(const std::string& sec, const std::string& key,
                              double fallback) const {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    try {
        std::size_t pos = 0;
        double v = std::stod(e->value, &pos);
        if (trim(e->value.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(name_ + ":" + std::to_string(e->line) + ": key '" + key +
                      "' expects a number, found '" + e->value + "'");
}

int ConfigFile::get_int(const std::string& sec, const std::string& key, int fallback) const {
    const double v = get_double(sec, key, static_cast<double>(fallback));
    return static_cast<int>(v);
}

std::uint64_t ConfigFile::get_u64(const std::string& sec, const std::string& key,
                                  std::uint64_t fallback) const {
    const Entry* e = find(sec, key);
    if (!e) return fallback;
    try {
        return std::stoull(e->value);
    } catch (const std::exception&) {
        throw ConfigError(name_ + ":" + std::to_string(e->line) + ": key '" + key +
                          "' expects an unsigned integer, found '" + e->value + "'");
    }
}

std::optional<Vec> ConfigFile::get_vec(const std::string& sec, const std::string& key) const {
    const Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    return parse_numbers(e->value, name_ + ":" + std::to_string(e->line) + " key '" + key + "'");
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    sections_[section].push_back({key, value, 0});
}

std::vector<std::string> ConfigFile::dump_lines() const {
    std::vector<std::string> out;
    for (const auto& [sec, entries] : sections_)
        for (const auto& e : entries)
            out.push_back("[" + sec + "] " + e.key + " = " + e.value);
    return out;
}

Vec parse_numbers(const std::string& text, const std::string& context) {
    std::stringstream ss(text);
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) {
        try {
            std::size_t pos = 0;
            vals.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(context + ": expected a number, found '" + tok + "'");
        }
    }
    return Eigen::Map<Vec>(vals.data(), static_cast<long>(vals.size()));
}

namespace {

std::optional<ConfigFile> load_extra_preset(const std::string& name) {
    const char* dir = std::getenv("SOLITONLAB_PRESETS");
    if (!dir) return std::nullopt;
    const std::string path = std::string(dir) + "/" + name + ".cfg";
    std::ifstream probe(path);
    if (!probe) return std::nullopt;
    return ConfigFile::parse(probe, path);
}

Box domain_from(const ConfigFile& cfg, const std::string& sec, int dim,
                const Box& fallback) {
    auto v = cfg.get_vec(sec, "domain");
    if (!v) return fallback;
    if (v->size() != 2 * dim)
        throw ConfigError("domain under [" + sec + "] needs " + std::to_string(2 * dim) +
                          " numbers (lo hi per axis)");
    Box b;
    b.lo = Vec(dim);
    b.hi = Vec(dim);
    for (int i = 0; i < dim; ++i) {
        b.lo[i] = (*v)[2 * i];
        b.hi[i] = (*v)[2 * i + 1];
        if (b.lo[i] >= b.hi[i])
            throw ConfigError("domain under [" + sec + "] has lo >= hi on axis " +
                              std::to_string(i + 1));
    }
    return b;
}

std::string bracket_key(const std::string& base, std::initializer_list<int> idx) {
    std::string k = base;
    for (int i : idx) k += "[" + std::to_string(i) + "]";
    return k;
}

} // namespace

MetricChart build_metric(const ConfigFile& cfg) {
    const std::string sec = "metric";
    const std::string preset = cfg.get_string(sec, "preset", "");
    const int dim = cfg.get_int(sec, "dim", 2);

    if (!preset.empty()) {
        std::optional<Box> dom;
        if (cfg.has(sec, "domain")) dom = domain_from(cfg, sec, dim, Box::cube(dim, 1.0));
        if (preset == "euclidean") return euclidean_metric(dim, dom);
        if (preset == "polar") return polar_metric(dom);
        if (preset == "half-plane") return half_plane_metric(dom);
        if (preset == "sphere-stereographic") return sphere_stereographic_metric(dim, dom);
        if (auto extra = load_extra_preset(preset)) return build_metric(*extra);
        throw ConfigError("unknown metric preset '" + preset + "'");
    }

    // expression metric
    const auto vars = Expr::chart_vars(dim);
    std::vector<std::vector<Expr>> gij(dim, std::vector<Expr>(dim));
    bool any = false;
    for (int i = 1; i <= dim; ++i)
        for (int j = i; j <= dim; ++j) {
            const auto* e = cfg.find(sec, bracket_key("g", {i, j}));
            if (!e && i == j)
                throw ConfigError("expression metric needs " + bracket_key("g", {i, j}) +
                                  " under [metric]");
            if (e) {
                gij[i - 1][j - 1] = Expr::parse(e->value, vars);
                any = true;
            }
        }
    if (!any) throw ConfigError("[metric] needs either preset = <name> or g[i][j] entries");

    MatrixField val = [gij, dim](const Vec& x) {
        Mat g = Mat::Zero(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                const double v = gij[i][j].valid() ? gij[i][j].eval(x) : 0.0;
                g(i, j) = v;
                g(j, i) = v;
            }
        return g;
    };

    // optional analytic partials: all dg[i][j][k] for i <= j or none
    MatrixFieldDeriv deriv = nullptr;
    int have = 0, want = 0;
    std::vector<std::vector<std::vector<Expr>>> dg(
        dim, std::vector<std::vector<Expr>>(dim, std::vector<Expr>(dim)));
    for (int i = 1; i <= dim; ++i)
        for (int j = i; j <= dim; ++j)
            for (int k = 1; k <= dim; ++k) {
                ++want;
                const auto* e = cfg.find(sec, bracket_key("dg", {i, j, k}));
                if (e) {
                    dg[i - 1][j - 1][k - 1] = Expr::parse(e->value, vars);
                    ++have;
                }
            }
    if (have > 0 && have < want)
        throw ConfigError("[metric] has a partial dg[i][j][k] set: give all " +
                          std::to_string(want) + " entries or none");
    if (have == want) {
        deriv = [dg, dim](const Vec& x) {
            std::vector<Mat> out(dim, Mat::Zero(dim, dim));
            for (int i = 0; i < dim; ++i)
                for (int j = i; j < dim; ++j)
                    for (int k = 0; k < dim; ++k) {
                        const double v = dg[i][j][k].valid() ? dg[i][j][k].eval(x) : 0.0;
                        out[k](i, j) = v;
                        out[k](j, i) = v;
                    }
            return out;
        };
    }

    Box dom = domain_from(cfg, sec, dim, Box::cube(dim, 2.0));
    const std::string name = cfg.get_string(sec, "name", "config-metric");
    return MetricChart(dim, dom, std::move(val), name, std::move(deriv));
}

namespace {

// the field must evaluate finite on the chart; probe interior domain points
void check_field_finite(const VectorFieldSpec& X, const Box* domain) {
    if (!domain) return;
    for (double c : {0.2, 0.5, 0.8}) {
        const Vec p = domain->lo + c * (domain->hi - domain->lo);
        if (!X.eval(p).allFinite())
            throw ConfigError("[field] '" + X.name + "' is not finite at a sample point");
    }
}

} // namespace

VectorFieldSpec build_field(const ConfigFile& cfg, int dim, const Box* domain) {
    const std::string sec = "field";
    const std::string preset = cfg.get_string(sec, "preset", "");
    if (!preset.empty()) {
        if (preset == "zero") return zero_field(dim);
        if (preset == "radial") return radial_field(dim);
        if (preset == "rotation")
            return rotation_field(cfg.get_double(sec, "omega", 1.0), dim);
        if (preset == "translation") {
            auto d = cfg.get_vec(sec, "direction");
            if (!d || d->size() != dim)
                throw ConfigError("[field] translation preset needs direction with " +
                                  std::to_string(dim) + " components");
            return translation_field(*d);
        }
        if (auto extra = load_extra_preset(preset)) return build_field(*extra, dim, domain);
        throw ConfigError("unknown field preset '" + preset + "'");
    }

    const auto vars = Expr::chart_vars(dim);
    std::vector<Expr> comps(dim);
    for (int i = 1; i <= dim; ++i) {
        const auto* e = cfg.find(sec, bracket_key("X", {i}));
        if (!e)
            throw ConfigError("[field] needs either preset = <name> or all X[i] entries ("
                              "missing " + bracket_key("X", {i}) + ")");
        comps[i - 1] = Expr::parse(e->value, vars);
    }
    VectorFieldSpec X;
    X.dim = dim;
    X.name = cfg.get_string(sec, "name", "config-field");
    X.eval = [comps, dim](const Vec& x) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = comps[i].eval(x);
        return v;
    };
    check_field_finite(X, domain);
    return X;
}

ImmersedPatch build_patch(const ConfigFile& cfg, int ambient_dim) {
    const std::string sec = "patch";
    const std::string preset = cfg.get_string(sec, "preset", "");
    if (!preset.empty()) {
        if (preset == "plane") {
            std::vector<Vec> span;
            for (int a = 1; a < ambient_dim; ++a) {
                Vec e = Vec::Zero(ambient_dim);
                e[a - 1] = 1.0;
                span.push_back(e);
            }
            Vec origin = cfg.get_vec(sec, "origin").value_or(Vec::Zero(ambient_dim));
            return plane_patch(ambient_dim, origin, span,
                               cfg.get_double(sec, "half_width", 1.0));
        }
        if (preset == "sphere") {
            std::optional<Vec> center = cfg.get_vec(sec, "center");
            return sphere_patch(ambient_dim, cfg.get_double(sec, "radius", 1.0), center);
        }
        if (preset == "cylinder") {
            if (ambient_dim != 3)
                throw ConfigError("[patch] cylinder preset needs ambient dimension 3");
            return cylinder_patch(cfg.get_double(sec, "radius", 1.0),
                                  cfg.get_double(sec, "half_height", 1.0));
        }
        if (preset == "graph") {
            const int n = ambient_dim - 1;
            const auto* he = cfg.find(sec, "h");
            if (!he) throw ConfigError("[patch] graph preset needs h = <expr of t1..tn>");
            const Expr h = Expr::parse(he->value, Expr::patch_vars(n));
            auto box = cfg.get_vec(sec, "box");
            if (!box || box->size() != 2 * n)
                throw ConfigError("[patch] graph preset needs box = lo hi per axis");
            Box base;
            base.lo = Vec(n);
            base.hi = Vec(n);
            for (int a = 0; a < n; ++a) {
                base.lo[a] = (*box)[2 * a];
                base.hi[a] = (*box)[2 * a + 1];
            }
            return graph_patch(ambient_dim, [h](const Vec& t) { return h.eval(t); },
                               std::move(base));
        }
        if (preset == "rotational") {
            const std::string path = cfg.get_string(sec, "profile", "");
            if (path.empty())
                throw ConfigError("[patch] rotational preset needs profile = <csv path>");
            std::ifstream is(path);
            if (!is) throw ConfigError("[patch] cannot open profile CSV '" + path + "'");
            std::vector<ProfileSample> samples;
            std::string line;
            while (std::getline(is, line)) {
                if (line.empty() || line[0] == '#' || line[0] == 's') continue;
                const Vec row = parse_numbers(
                    [&] {
                        std::string t = line;
                        for (auto& c : t)
                            if (c == ',') c = ' ';
                        return t;
                    }(),
                    "profile CSV row");
                if (row.size() < 5)
                    throw ConfigError("profile CSV rows need s,r,z,Tr,Tz columns");
                ProfileSample ps;
                ps.s = row[0];
                ps.r = row[1];
                ps.z = row[2];
                ps.T = vec2(row[3], row[4]);
                samples.push_back(std::move(ps));
            }
            return revolve_profile_samples(samples, ambient_dim - 1);
        }
        if (auto extra = load_extra_preset(preset)) return build_patch(*extra, ambient_dim);
        throw ConfigError("unknown patch preset '" + preset + "'");
    }

    // expression patch: f[i] = <expr of t1..tn>
    const int n = ambient_dim - 1;
    const auto vars = Expr::patch_vars(n);
    std::vector<Expr> comps(ambient_dim);
    for (int i = 1; i <= ambient_dim; ++i) {
        const auto* e = cfg.find(sec, bracket_key("f", {i}));
        if (!e)
            throw ConfigError("[patch] needs either preset = <name> or all f[i] entries ("
                              "missing " + bracket_key("f", {i}) + ")");
        comps[i - 1] = Expr::parse(e->value, vars);
    }
    ImmersedPatch p;
    p.n = n;
    p.ambient_dim = ambient_dim;
    p.name = cfg.get_string(sec, "name", "config-patch");
    auto box = cfg.get_vec(sec, "box");
    if (!box || box->size() != 2 * n)
        throw ConfigError("[patch] expression patches need box = lo hi per parameter axis (" +
                          std::to_string(2 * n) + " numbers)");
    p.param_box.lo = Vec(n);
    p.param_box.hi = Vec(n);
    for (int a = 0; a < n; ++a) {
        p.param_box.lo[a] = (*box)[2 * a];
        p.param_box.hi[a] = (*box)[2 * a + 1];
    }
    p.f = [comps, ambient_dim](const Vec& t) {
        Vec x(ambient_dim);
        for (int i = 0; i < ambient_dim; ++i) x[i] = comps[i].eval(t);
        return x;
    };
    auto ref = cfg.get_vec(sec, "orient_toward");
    p.orientation = ref ? Orientation::constant(*ref) : Orientation::positive_frame();
    return p;
}

ConformalFactor build_potential(const ConfigFile& cfg, int dim) {
    const std::string sec = "certify";
    const auto* e = cfg.find(sec, "u");
    if (!e) throw ConfigError("[certify] needs u = <expression>");
    const auto vars = Expr::chart_vars(dim);
    const Expr u = Expr::parse(e->value, vars);

    ConformalFactor out;
    out.name = e->value;
    out.u = [u](const Vec& x) { return u.eval(x); };

    int have = 0;
    std::vector<Expr> grads(dim);
    for (int i = 1; i <= dim; ++i) {
        const auto* ge = cfg.find(sec, bracket_key("grad", {i}));
        if (ge) {
            grads[i - 1] = Expr::parse(ge->value, vars);
            ++have;
        }
    }
    if (have > 0 && have < dim)
        throw ConfigError("[certify] grad[i] entries must be given for every axis or not "
                          "at all");
    if (have == dim) {
        out.grad = [grads, dim](const Vec& x) {
            Vec g(dim);
            for (int i = 0; i < dim; ++i) g[i] = grads[i].eval(x);
            return g;
        };
    }
    return out;
}

} // namespace solitonlab
