#include "coopdec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coopdec::oracle {

MlResult ml_decode_bruteforce(const LinearCode& code, std::span<const double> llr) {
    if (code.dimension > 24)
        throw CapacityError("ml_decode_bruteforce: dimension " + std::to_string(code.dimension) +
                            " exceeds 24");
    if (int(llr.size()) != code.h.n)
        throw std::invalid_argument("ml_decode_bruteforce: llr length does not match n");

    MlResult best;
    double second = 0.0;
    bool have_second = false;

    std::vector<std::uint8_t> info(code.dimension, 0);
    const std::uint64_t total = std::uint64_t(1) << code.dimension;
    for (std::uint64_t u = 0; u < total; ++u) {
        for (int b = 0; b < code.dimension; ++b) info[b] = std::uint8_t((u >> b) & 1u);
        CodewordBits x = code.encode(info);
        double cost = 0.0;
        for (int i = 0; i < code.h.n; ++i) cost += (x[i] ? -2.0 : 2.0) * llr[i];
        if (u == 0 || cost < best.cost) {
            if (u != 0) {
                second = best.cost;
                have_second = true;
            }
            best.cost = cost;
            best.codeword = std::move(x);
        } else if (!have_second || cost < second) {
            second = cost;
            have_second = true;
        }
    }
    best.is_tie = have_second && std::abs(second - best.cost) < 1e-12;
    return best;
}

MinimizeResult minimize_bruteforce(const coop::CostDecomposition& dec) {
    const auto& doms = dec.domains();
    const int n = dec.num_variables();
    double space = 1.0;
    for (const auto& d : doms) space *= double(d.size());
    if (space > double(1l << 24))
        throw CapacityError("minimize_bruteforce: assignment space exceeds 2^24");

    MinimizeResult best;
    bool found = false;
    std::vector<int> val(n, 0);
    for (;;) {
        const auto cost = dec.total_cost(val);
        if (cost && (!found || *cost < best.cost)) {
            best.cost = *cost;
            best.assignment = val;
            found = true;
        }
        int p = n - 1;
        while (p >= 0 && val[p] + 1 == int(doms[p].size())) val[p--] = 0;
        if (p < 0) break;
        ++val[p];
    }
    if (!found)
        throw std::runtime_error("minimize_bruteforce: every assignment violates a hard constraint");
    return best;
}

EquilibriumEstimate estimate_equilibrium(const coop::CostDecomposition& dec,
                                         const coop::PropagationMatrix& w, double lambda,
                                         int iterations) {
    if (iterations < 1)
        throw std::invalid_argument("estimate_equilibrium: iterations must be >= 1");
    coop::CoopEngine engine(dec, w);
    EquilibriumEstimate est;
    est.c = dec.zero_state();
    coop::AssignmentConstraints next;
    for (int k = 0; k < iterations; ++k) {
        engine.step(est.c, next, lambda);
        std::swap(est.c, next);
        est.final_residual = engine.residual();
    }
    return est;
}

} // namespace coopdec::oracle
