#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opchain/fock.hpp"
#include "opchain/gen.hpp"

namespace opchain {

// One asserted inequality lhs <= rhs.
struct Check {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
    double margin() const { return rhs - lhs; }
};

struct SuiteReport {
    std::vector<Check> checks;
    int failures() const;
    void add(std::string name, double lhs, double rhs);
};

// Random realized polynomial of the given degree on the grid intervals inside [t_lo, t_hi], zero elsewhere.
OneParticle random_one_particle(const FockSpace& space, SplitMix64& rng, int degree, double t_lo, double t_hi);

// xi a + l(f1) xi b + l(f2) l(f3) xi c with random ingredients; depth <= 2.
FockVector random_fock_vector(const FockSpace& space, SplitMix64& rng);

// Moments of Y against the partition sums, adjointness, the product relations, disjoint-support vanishing,
// Gram positivity, additivity of Y, monotone-independence factorizations and the coupling bound.
SuiteReport fock_suite(const StepDriving& dr, int max_order, std::uint64_t seed, double tol = 1e-10);

}  // namespace opchain
