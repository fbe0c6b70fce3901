// Acceptance suite: runs every shipped criterion at its pinned tolerance and
// prints one pass/fail line per measured quantity.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>

#include "solitonlab/verify.hpp"

using namespace solitonlab;

TEST_CASE("acceptance criteria") {
    VerifyOptions opts; // seed 42, thresholds as shipped
    const auto rows = run_acceptance(opts);
    REQUIRE(!rows.empty());
    for (const auto& r : rows) {
        std::printf("%s %-4s %-10.3e <= %-10.3e %s%s%s\n", r.pass ? "PASS" : "FAIL",
                    r.id.c_str(), r.value, r.threshold, r.name.c_str(),
                    r.detail.empty() ? "" : "  [", r.detail.empty() ? "" : (r.detail + "]").c_str());
        INFO(r.id, ": ", r.name, " value ", r.value, " threshold ", r.threshold);
        CHECK(r.pass);
    }
}
