#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace popdyn {

// One validation criterion of the release gate. `canonical` is a byte-stable
// rendering of every number the criterion produced; the determinism criterion
// re-runs the others and compares these strings, so nothing time- or
// scheduling-dependent may leak into them.
struct AcceptanceResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    std::string canonical;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20260825;  // master seed shared by all criteria
    int threads = 0;                // <= 0: default worker count
};

// suite ids accepted by run_acceptance
std::vector<std::string> acceptance_suites();

// Runs a suite ("all", "exact-laws", "mc", "determinism") and returns one
// result per criterion. Individual failures do not stop the run. Throws
// std::invalid_argument (listing the suites) for an unknown id.
std::vector<AcceptanceResult> run_acceptance(const std::string& suite,
                                             const AcceptanceOptions& opts = {});

// machine-readable form of a finished run
std::string acceptance_json(const std::vector<AcceptanceResult>& results);

} // namespace popdyn
