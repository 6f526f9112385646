#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lamegap/fem.hpp"

namespace lamegap {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

/// Shared verification sweep on the tangent disks: one datum problem plus the
/// rigid modes at each gap width.
struct OracleSweep {
    std::vector<double> eps;
    std::vector<OracleRun> runs;
    LameConstants lame;
    BoundaryData phi;
    MeshParams params;
    double r1 = 0.5, r0 = 1.0;
};

OracleSweep run_oracle_sweep(const std::vector<double>& eps_list, const BoundaryData& phi,
                             const LameConstants& lame, const MeshParams& params,
                             double r1 = 0.5, double r0 = 1.0);

/// The acceptance suite. quick_only runs the closed-form, rate, parity and
/// linear-algebra criteria (1-5); the full suite adds the finite-element
/// sweep criteria (6-11).
std::vector<CriterionResult> run_acceptance(bool quick_only, std::ostream* progress);

void print_results(const std::vector<CriterionResult>& results, std::ostream& os);
bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace lamegap
