#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solitonlab/fields.hpp"
#include "solitonlab/geometry.hpp"
#include "solitonlab/hypersurface.hpp"

namespace solitonlab {

// Line-oriented run configuration:
//
//   # comment
//   [metric]
//   preset = euclidean          # or expression entries:
//   dim = 2
//   domain = -2 2 -2 2          # lo hi per axis
//   g[1][1] = 1/(y^2)
//   dg[1][1][2] = -2/(y^3)      # optional analytic partials (all or none)
//
//   [field]
//   preset = rotation
//   omega = 1
//   X[1] = -y                   # expression alternative
//
// Repeated keys are kept in order (e.g. several `start =` lines under
// [curve] trace several curves). Parse errors name the file, line and token.
class ConfigFile {
public:
    struct Entry {
        std::string key, value;
        int line = 0;
    };

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse(std::istream& is, const std::string& name);

    bool has(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    const Entry* find(const std::string& section, const std::string& key) const;
    std::vector<const Entry*> all(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& sec, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& sec, const std::string& key, double fallback) const;
    int get_int(const std::string& sec, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& sec, const std::string& key,
                          std::uint64_t fallback) const;
    std::optional<Vec> get_vec(const std::string& sec, const std::string& key) const;

    const std::string& name() const { return name_; }

    // Overrides (CLI flags win over file values).
    void set(const std::string& section, const std::string& key, const std::string& value);

    // "[section] key = value" lines of the resolved config, for embedding in
    // output files.
    std::vector<std::string> dump_lines() const;

private:
    std::string name_;
    std::map<std::string, std::vector<Entry>> sections_;
};

Vec parse_numbers(const std::string& text, const std::string& context);

// Builders from the [metric], [field], [patch] sections (presets or
// expression entries). Unknown preset names are searched as <name>.cfg in
// the directory named by SOLITONLAB_PRESETS.
MetricChart build_metric(const ConfigFile& cfg);
VectorFieldSpec build_field(const ConfigFile& cfg, int dim,
                            const Box* domain = nullptr);
ImmersedPatch build_patch(const ConfigFile& cfg, int ambient_dim);
// u from [certify]: `u = <expr>` and optional `grad[i] = <expr>`.
ConformalFactor build_potential(const ConfigFile& cfg, int dim);

} // namespace solitonlab
