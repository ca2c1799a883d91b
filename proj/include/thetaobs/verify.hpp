#pragma once

// The full verification suite behind `thetaobs verify-all` and the
// acceptance tests: one function per criterion, each returning its
// records, plus an orchestrator that merges them into a deterministic
// report.  Criterion functions are pure given their seed.

#include <cstdint>
#include <string>
#include <vector>

#include "thetaobs/report.hpp"

namespace thetaobs::verify {

struct Options {
    uint64_t seed = 1;
    bool full = true; // false: quick level (reduced sweeps)
    unsigned threads = 1;
};

using Records = std::vector<report::Record>;

Records c01_classification(const Options &);
Records c02_theta_axioms(const Options &);
Records c03_schrodinger(const Options &);
Records c04_odd_splitting(const Options &);
Records c05_exceptional(const Options &);
Records c06_stabilizer_structure(const Options &);
Records c07_obstruction(const Options &);
Records c08_negligibility(const Options &);
Records c09_baer(const Options &);
Records c10_quadratic(const Options &);
Records c11_appendix(const Options &);

// All criteria, honoring Options::threads for parallel execution.
report::Report verify_all(const Options &);

} // namespace thetaobs::verify
