#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geosolve/dataset.hpp"

namespace geosolve::synth {

// A generated problem: the dataset record (label computed by executing the
// gold program under the geomverse context), the gold program itself, and the
// literal variables a constant-shift perturbation may scale without driving
// any formula out of its domain.
struct GeneratedProblem {
    ProblemRecord record;
    std::string gold_program;
    std::vector<std::string> shift_safe_vars;
};

// Generates `count` problems of the given depth (1, 2, or 3 chained shapes).
// Deterministic: the same (depth, count, seed) triple yields byte-identical
// output. Each gold program calls at least one library function per shape;
// depth-1 programs call exactly one. Infeasible samples are retried up to a
// bound, then reported as an error.
std::vector<GeneratedProblem> generate(int depth, std::size_t count, std::uint64_t seed);

enum class PerturbMode {
    ConstantShift,   // scale one literal out of the 3% band -> wrong output
    FunctionSwap,    // rename one call to a nonexistent function -> NameError
    DropStatement,   // drop a needed assign (NameError) or the return (SyntaxError)
};

// Produces a corrupted candidate program from the gold one.
std::string perturb(const GeneratedProblem& problem, PerturbMode mode, std::uint64_t seed);

// Constant-shift with an explicit factor; throws std::invalid_argument when
// the factor sits inside the 3% relaxed-match band (|factor - 1| <= 0.03).
std::string perturb_constant_shift(const GeneratedProblem& problem, double factor,
                                   std::uint64_t seed);

}  // namespace geosolve::synth
