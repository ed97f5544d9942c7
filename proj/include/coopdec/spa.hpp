#pragma once

#include <span>

#include "coopdec/codes.hpp"
#include "coopdec/ldpc.hpp"

namespace coopdec {

// Flooding-schedule sum-product decoding in the LLR domain (positive LLR
// favors bit 1). Check updates use the tanh rule with inputs clamped at
// +-30; stops early once the hard decision is a codeword.
DecodeResult decode_sum_product(const ParityCheckMatrix& h, std::span<const double> llr,
                                int max_iterations = 30);
DecodeResult decode_sum_product(const LinearCode& code, std::span<const double> llr,
                                int max_iterations = 30);

} // namespace coopdec
