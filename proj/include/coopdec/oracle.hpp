#pragma once

#include <span>

#include "coopdec/codes.hpp"
#include "coopdec/coop.hpp"

namespace coopdec::oracle {

struct MlResult {
    CodewordBits codeword;
    double cost = 0.0;  // signed objective: sum of (+2a, -2a) unaries
    bool is_tie = false;
};

// Exhaustive maximum-likelihood decode over all 2^dimension codewords,
// enumerated through the encoder. dimension must be <= 24.
MlResult ml_decode_bruteforce(const LinearCode& code, std::span<const double> llr);

struct MinimizeResult {
    std::vector<int> assignment;  // domain value indices
    double cost = 0.0;
};

// Exhaustive scan of the assignment space of a decomposition; assignments
// violating hard constraints are excluded. Requires |space| <= 2^24.
MinimizeResult minimize_bruteforce(const coop::CostDecomposition& dec);

struct EquilibriumEstimate {
    coop::AssignmentConstraints c;
    double final_residual = 0.0;
};

// Long-run fixpoint estimate: iterates from c^(0)=0 at constant lambda.
EquilibriumEstimate estimate_equilibrium(const coop::CostDecomposition& dec,
                                         const coop::PropagationMatrix& w, double lambda,
                                         int iterations = 2000);

} // namespace coopdec::oracle
