// End-to-end checks of the command-line tool: exit codes, emitted files,
// diagnostics, determinism. The binary path arrives via SOLITONLAB_BIN.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "solitonlab/soliton.hpp"

namespace fs = std::filesystem;
using namespace solitonlab;

namespace {

std::string bin() {
    const char* b = std::getenv("SOLITONLAB_BIN");
    REQUIRE(b != nullptr);
    return b;
}

struct RunResult {
    int exit_code;
    std::string out, err;
};

RunResult run(const std::string& args, const fs::path& dir) {
    const fs::path so = dir / "stdout.txt", se = dir / "stderr.txt";
    const std::string cmd = bin() + " " + args + " > " + so.string() + " 2> " + se.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(rc);
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

fs::path make_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("solitonlab_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kFigureCfg =
    "[metric]\n"
    "preset = euclidean\n"
    "dim = 2\n"
    "domain = -8 8 -8 8\n"
    "[field]\n"
    "preset = rotation\n"
    "omega = 1\n"
    "[curve]\n"
    "start = 1 0\n"
    "start = 1.5 0.5\n"
    "direction = 0 1\n"
    "length = 12\n"
    "max_step = 0.01\n";

} // namespace

TEST_CASE("trace-soliton: figure preset emits CSV + SVG; pair crosses once") {
    const fs::path d = make_dir("trace");
    write_file(d / "fig.cfg", kFigureCfg);
    const auto r = run("--config " + (d / "fig.cfg").string() + " --out " +
                           (d / "out").string() + " --format svg trace-soliton",
                       d);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(d / "out" / "curve_0.csv"));
    REQUIRE(fs::exists(d / "out" / "curve_1.csv"));
    CHECK(fs::exists(d / "out" / "trace.svg"));
    CHECK(slurp(d / "out" / "curve_0.csv").rfind("# solitonlab curve v1", 0) == 0);
    CHECK(slurp(d / "out" / "trace.svg").find("<polyline") != std::string::npos);

    std::ifstream a(d / "out" / "curve_0.csv"), b(d / "out" / "curve_1.csv");
    const SolitonCurve ca = read_curve_csv(a), cb = read_curve_csv(b);
    CHECK(count_intersections(ca, cb, 1e-6).count == 1);
}

TEST_CASE("config and expression errors exit 2 with a diagnostic") {
    const fs::path d = make_dir("badcfg");
    write_file(d / "bad.cfg",
               "[metric]\npreset = euclidean\ndim = 2\n[field]\nX[1] = 3*@y\nX[2] = 0\n");
    const auto r = run("--config " + (d / "bad.cfg").string() + " --out " +
                           (d / "out").string() + " gradient-check",
                       d);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("unexpected token '@'") != std::string::npos);

    write_file(d / "bad2.cfg", "[metric\n");
    const auto r2 = run("--config " + (d / "bad2.cfg").string() + " gradient-check", d);
    CHECK(r2.exit_code == 2);
    CHECK(r2.err.find("bad2.cfg:1") != std::string::npos);

    const auto r3 = run("--config " + (d / "missing.cfg").string() + " gradient-check", d);
    CHECK(r3.exit_code == 2);
}

TEST_CASE("gradient-check exit codes and potential output") {
    const fs::path d = make_dir("grad");
    write_file(d / "radial.cfg",
               "[metric]\npreset = euclidean\ndim = 2\ndomain = -1 1 -1 1\n"
               "[field]\npreset = radial\n");
    const auto r0 = run("--config " + (d / "radial.cfg").string() + " --out " +
                            (d / "o0").string() + " gradient-check",
                        d);
    CHECK(r0.exit_code == 0);
    CHECK(fs::exists(d / "o0" / "potential.csv"));
    CHECK(fs::exists(d / "o0" / "gradient_check.json"));

    write_file(d / "rot.cfg",
               "[metric]\npreset = euclidean\ndim = 2\ndomain = -1 1 -1 1\n"
               "[field]\npreset = rotation\n");
    const auto r3 = run("--config " + (d / "rot.cfg").string() + " --out " +
                            (d / "o3").string() + " gradient-check",
                        d);
    CHECK(r3.exit_code == 3);
    const std::string j = slurp(d / "o3" / "gradient_check.json");
    CHECK(j.find("NOT_GRADIENT") != std::string::npos);
    CHECK(j.find("\"max_curl_residual\": 2.0") != std::string::npos);
}

TEST_CASE("verify: pass, tightened failure, unknown suite") {
    const fs::path d = make_dir("verify");
    const auto ok = run("verify --suite c3 --out " + (d / "v1").string(), d);
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("PASS c3a") != std::string::npos);
    CHECK(fs::exists(d / "v1" / "verify.json"));

    const auto tight =
        run("verify --suite c3 --tighten 1e-12 --out " + (d / "v2").string(), d);
    CHECK(tight.exit_code == 1);
    CHECK(tight.out.find("FAIL c3a") != std::string::npos);

    const auto unknown = run("verify --suite nope --out " + (d / "v3").string(), d);
    CHECK(unknown.exit_code == 2);
}

TEST_CASE("verify JSON is byte-identical across repeats and job counts") {
    const fs::path d = make_dir("verifyrep");
    REQUIRE(run("verify --suite c4 --seed 7 --out " + (d / "v").string(), d).exit_code == 0);
    const std::string first = slurp(d / "v" / "verify.json");
    REQUIRE(run("verify --suite c4 --seed 7 --jobs 8 --out " + (d / "v").string(), d)
                .exit_code == 0);
    CHECK(first == slurp(d / "v" / "verify.json"));
    REQUIRE(run("verify --suite c4 --seed 7 --out " + (d / "v").string(), d).exit_code == 0);
    CHECK(first == slurp(d / "v" / "verify.json"));
}

TEST_CASE("certify / surface-gap / profile / trace-weyl / render round trip") {
    const fs::path d = make_dir("misc");
    write_file(d / "cert.cfg",
               "[metric]\npreset = euclidean\ndim = 2\ndomain = -4 4 -8 8\n"
               "[certify]\nu = -y\ngrad[1] = 0\ngrad[2] = -1\nsamples = 5\n");
    const auto c = run("--config " + (d / "cert.cfg").string() + " --out " +
                           (d / "c").string() + " certify",
                       d);
    CHECK(c.exit_code == 0);
    CHECK(fs::exists(d / "c" / "certify.json"));

    write_file(d / "gap.cfg",
               "[metric]\npreset = euclidean\ndim = 2\ndomain = -6 6 -6 6\n"
               "[field]\npreset = rotation\n[gap]\nlength = 2.0\n");
    const auto gp = run("--config " + (d / "gap.cfg").string() + " --out " +
                            (d / "g").string() + " surface-gap",
                        d);
    CHECK(gp.exit_code == 0);

    // refusal: gradient field into surface-gap
    write_file(d / "gapbad.cfg",
               "[metric]\npreset = euclidean\ndim = 2\ndomain = -6 6 -6 6\n"
               "[field]\npreset = radial\n");
    CHECK(run("--config " + (d / "gapbad.cfg").string() + " --out " + (d / "gb").string() +
                  " surface-gap",
              d).exit_code == 2);

    write_file(d / "prof.cfg",
               "[metric]\npreset = euclidean\ndim = 3\n[field]\npreset = radial\n"
               "[profile]\nn = 2\nstart = 1 0\ndirection = 0 1\nlength = 1.2\n");
    const auto pf = run("--config " + (d / "prof.cfg").string() + " --out " +
                            (d / "p").string() + " profile",
                        d);
    CHECK(pf.exit_code == 0);
    CHECK(slurp(d / "p" / "profile.json").find("patch_residual") != std::string::npos);

    write_file(d / "weyl.cfg",
               "[metric]\npreset = sphere-stereographic\ndim = 2\n[geodesic]\n"
               "start = 0 0\nvelocity = 0.5 0\nlength = 2\n");
    const auto wy = run("--config " + (d / "weyl.cfg").string() + " --out " +
                            (d / "w").string() + " trace-weyl",
                        d);
    CHECK(wy.exit_code == 0);
    CHECK(fs::exists(d / "w" / "weyl_geodesic.csv"));

    write_file(d / "fig.cfg", kFigureCfg);
    REQUIRE(run("--config " + (d / "fig.cfg").string() + " --out " + (d / "t").string() +
                    " trace-soliton",
                d).exit_code == 0);
    const auto rd = run("render --in " + (d / "t" / "curve_0.csv").string() + " --out " +
                            (d / "r").string(),
                        d);
    CHECK(rd.exit_code == 0);
    CHECK(fs::exists(d / "r" / "render.svg"));
}

TEST_CASE("trace-weyl measures a curve CSV against the connection") {
    const fs::path d = make_dir("measure");
    write_file(d / "yy.cfg",
               "[metric]\npreset = euclidean\ndim = 2\ndomain = -6 6 -6 6\n"
               "[field]\npreset = rotation\n[curve]\nstart = 1 0\ndirection = 0 1\n"
               "length = 4\n");
    REQUIRE(run("--config " + (d / "yy.cfg").string() + " --out " + (d / "t").string() +
                    " trace-soliton",
                d).exit_code == 0);
    write_file(d / "m.cfg",
               "[metric]\npreset = euclidean\ndim = 2\ndomain = -6 6 -6 6\n"
               "[field]\npreset = rotation\n[geodesic]\nmeasure = " +
                   (d / "t" / "curve_0.csv").string() + "\n");
    const auto r = run("--config " + (d / "m.cfg").string() + " --out " +
                           (d / "m").string() + " trace-weyl",
                       d);
    CHECK(r.exit_code == 0);
    const std::string j = slurp(d / "m" / "weyl_residual.json");
    CHECK(j.find("\"sup\"") != std::string::npos);
    CHECK(j.find("argmax_t") != std::string::npos);
}

TEST_CASE("profile emits patch samples; rotational preset revolves a profile CSV") {
    const fs::path d = make_dir("rotational");
    write_file(d / "prof.cfg",
               "[metric]\npreset = euclidean\ndim = 3\n[field]\npreset = radial\n"
               "[profile]\nn = 2\nstart = 1 0\ndirection = 0 1\nlength = 1.2\n");
    REQUIRE(run("--config " + (d / "prof.cfg").string() + " --out " + (d / "p").string() +
                    " profile",
                d).exit_code == 0);
    CHECK(fs::exists(d / "p" / "patch_samples.csv"));
    CHECK(slurp(d / "p" / "patch_samples.csv").find(",H,residual") != std::string::npos);

    write_file(d / "cert.cfg",
               "[metric]\npreset = euclidean\ndim = 3\n[patch]\npreset = rotational\n"
               "profile = " + (d / "p" / "profile.csv").string() +
                   "\n[certify]\nu = (x1^2 + x2^2 + x3^2)/2\nsamples = 3\n");
    const auto c = run("--config " + (d / "cert.cfg").string() + " --out " +
                           (d / "c").string() + " certify",
                       d);
    CHECK(c.exit_code == 0);
    CHECK(slurp(d / "c" / "certify.json").find("\"dropped\": 0") != std::string::npos);
}

TEST_CASE("graph patch preset builds from an expression") {
    const fs::path d = make_dir("graph");
    write_file(d / "g.cfg",
               "[metric]\npreset = euclidean\ndim = 3\n"
               "[patch]\npreset = graph\nh = t1^2 - t2^2\nbox = -0.5 0.5 -0.5 0.5\n"
               "[certify]\nu = 0\nsamples = 2\n");
    // a saddle graph is not minimal, but the command must run cleanly and
    // report the nonzero paired residual
    const auto r = run("--config " + (d / "g.cfg").string() + " --out " +
                           (d / "o").string() + " certify",
                       d);
    CHECK(r.exit_code == 0);
}

TEST_CASE("SOLITONLAB_PRESETS supplies extra named presets") {
    const fs::path d = make_dir("presets");
    fs::create_directories(d / "extra");
    write_file(d / "extra" / "shifted-rotation.cfg",
               "[field]\nX[1] = -(y - 1)\nX[2] = x\n");
    write_file(d / "run.cfg",
               "[metric]\npreset = euclidean\ndim = 2\ndomain = -1 1 -1 1\n"
               "[field]\npreset = shifted-rotation\n");
    const std::string cmd = "SOLITONLAB_PRESETS=" + (d / "extra").string() + " " + bin() +
                            " --config " + (d / "run.cfg").string() + " --out " +
                            (d / "o").string() + " gradient-check > " +
                            (d / "so.txt").string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 3); // still a rotation: not a gradient
}
