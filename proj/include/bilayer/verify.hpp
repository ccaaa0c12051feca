#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bilayer/composites.hpp"

namespace bilayer {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// `check=<name> status=pass|fail value=<v> tol=<t> [detail]`
std::string format_check(const CheckResult& c);

/// A reference parameter point inside the existence domain of each kind.
CompositeSpec reference_spec(Kind k);

/// Random parameter points around reference_spec whose constraint margins all
/// exceed min_margin. Points with h_m/h1_m within a relative linear_limit_gap of 1
/// or sigma+1 can be skipped: there a parabola degenerates into a line and its
/// vertex position diverges.
std::vector<CompositeSpec> sample_existence_domain(Kind k, int n, std::mt19937_64& rng, double min_margin = 1e-3,
                                                   double linear_limit_gap = 0.0);

struct OracleSample {
    CompositeSpec spec;
    double max_rel_error = 0.0;
    bool converged = false;
};

/// Closed-form unknowns vs a Newton solve started from the closed form at a
/// parameter point 1% away.
OracleSample oracle_compare(const CompositeSpec& spec, std::mt19937_64& rng);

struct SuiteOptions {
    int samples = 20;
    std::uint64_t seed = 1;
    int threads = 1;
};

const std::vector<std::string>& suite_names();
/// Runs one named suite ("all" runs every suite). Throws UsageError on unknown names.
std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& opt = {});

}  // namespace bilayer
