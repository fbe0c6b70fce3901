#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace solitonlab {

struct CriterionRow {
    std::string id;     // c1..c9 with a letter per sub-check
    std::string name;
    double value = 0.0;     // measured quantity
    double threshold = 0.0; // pinned acceptance tolerance (scaled by tighten)
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    int jobs = 1;
    double tighten = 1.0; // multiplies every threshold; < 1 tightens
    std::vector<std::string> suites; // empty = all, else criterion ids ("c3")
};

std::vector<std::string> acceptance_suite_ids();

// Runs the acceptance criteria (all, or the selected subset) and returns one
// row per measured quantity. Throws ConfigError for unknown suite names.
std::vector<CriterionRow> run_acceptance(const VerifyOptions& opts);

nlohmann::ordered_json verify_to_json(const std::vector<CriterionRow>& rows,
                                      const VerifyOptions& opts);

} // namespace solitonlab
