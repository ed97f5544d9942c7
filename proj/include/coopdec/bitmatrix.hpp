#pragma once

#include <cstdint>
#include <vector>

namespace coopdec {

// Dense GF(2) matrix with 64-bit packed rows. Work-horse for rank,
// reduced row echelon form and the systematic-encoder construction.
class BitMatrix {
public:
    BitMatrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool get(int r, int c) const {
        return (row_ptr(r)[c >> 6] >> (c & 63)) & 1u;
    }
    void set(int r, int c, bool v) {
        std::uint64_t& w = row_ptr(r)[c >> 6];
        const std::uint64_t m = std::uint64_t(1) << (c & 63);
        if (v) w |= m; else w &= ~m;
    }

    void xor_rows(int dst, int src);
    void swap_rows(int a, int b);
    bool row_empty(int r) const;

    // In-place Gaussian elimination. Returns the rank; pivot column indices
    // are appended to *pivot_cols when given. full_reduce additionally clears
    // entries above the pivots (RREF).
    int eliminate(bool full_reduce = false, std::vector<int>* pivot_cols = nullptr);

    // support (set columns) of a row, ascending
    std::vector<int> row_support(int r) const;

private:
    std::uint64_t* row_ptr(int r) { return bits_.data() + std::size_t(r) * words_; }
    const std::uint64_t* row_ptr(int r) const { return bits_.data() + std::size_t(r) * words_; }

    int rows_;
    int cols_;
    int words_;
    std::vector<std::uint64_t> bits_;
};

} // namespace coopdec
