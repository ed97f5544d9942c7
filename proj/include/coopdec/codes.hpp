#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coopdec {

using CodewordBits = std::vector<std::uint8_t>;

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sparse binary parity-check matrix with both adjacency views.
// row_support[j] lists the variables of check j, col_support[i] the checks
// touching variable i; both sorted and mutually consistent.
struct ParityCheckMatrix {
    int n = 0;     // variables (columns)
    int rows = 0;  // checks
    std::vector<std::vector<int>> row_support;
    std::vector<std::vector<int>> col_support;

    // Builds from per-check supports and validates: indices in range,
    // no duplicates within a row, every check with >= 2 variables.
    static ParityCheckMatrix from_rows(int n, std::vector<std::vector<int>> rows);

    bool operator==(const ParityCheckMatrix&) const = default;
};

// H x^T mod 2, one bit per check
std::vector<std::uint8_t> syndrome(const ParityCheckMatrix& h, std::span<const std::uint8_t> x);
bool syndrome_ok(const ParityCheckMatrix& h, std::span<const std::uint8_t> x);

int rank_gf2(const ParityCheckMatrix& h);

long count_four_cycles(const ParityCheckMatrix& h);

// Linear code with a systematic encoder expressed as a parity-completion
// plan: information bits go to info_positions, then each completion step
// fills one position with the xor of already-filled ones.
struct LinearCode {
    ParityCheckMatrix h;
    int dimension = 0;
    std::vector<int> info_positions;
    std::vector<std::pair<int, std::vector<int>>> completion;
    std::optional<long> four_cycles;  // residual count from the Gallager constructor

    CodewordBits encode(std::span<const std::uint8_t> info) const;
};

// Systematic encoder for an arbitrary H via GF(2) elimination with column
// pivoting; redundant rows are kept in h.
LinearCode make_linear_code(ParityCheckMatrix h);

// (side, side-1)^dims single-parity-check product code. One check per axis
// and fixed off-axis coordinates; encoder by iterated parity completion.
LinearCode build_product_code(int side, int dims, long max_cells = 1l << 26);

// Regular Gallager-style code from a random permutation of edge stubs,
// collisions re-drawn, then best-effort 4-cycle removal by edge swaps.
LinearCode build_gallager_regular(int n, int col_weight, int row_weight, std::uint64_t seed);

} // namespace coopdec
