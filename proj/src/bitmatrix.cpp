#include "coopdec/bitmatrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace coopdec {

BitMatrix::BitMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64),
      bits_(std::size_t(rows) * std::size_t((cols + 63) / 64), 0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("BitMatrix: negative shape");
}

void BitMatrix::xor_rows(int dst, int src) {
    std::uint64_t* d = row_ptr(dst);
    const std::uint64_t* s = row_ptr(src);
    for (int w = 0; w < words_; ++w) d[w] ^= s[w];
}

void BitMatrix::swap_rows(int a, int b) {
    if (a == b) return;
    std::uint64_t* ra = row_ptr(a);
    std::uint64_t* rb = row_ptr(b);
    for (int w = 0; w < words_; ++w) std::swap(ra[w], rb[w]);
}

bool BitMatrix::row_empty(int r) const {
    const std::uint64_t* p = row_ptr(r);
    for (int w = 0; w < words_; ++w)
        if (p[w]) return false;
    return true;
}

int BitMatrix::eliminate(bool full_reduce, std::vector<int>* pivot_cols) {
    int rank = 0;
    for (int c = 0; c < cols_ && rank < rows_; ++c) {
        const int cw = c >> 6;
        const std::uint64_t cm = std::uint64_t(1) << (c & 63);
        int pivot = -1;
        for (int r = rank; r < rows_; ++r) {
            if (row_ptr(r)[cw] & cm) { pivot = r; break; }
        }
        if (pivot < 0) continue;
        swap_rows(rank, pivot);
        // the pivot row is zero left of column c, so xor from word cw on
        const std::uint64_t* pr = row_ptr(rank);
        const int lo = full_reduce ? 0 : rank + 1;
        for (int r = lo; r < rows_; ++r) {
            if (r == rank) continue;
            std::uint64_t* q = row_ptr(r);
            if (q[cw] & cm)
                for (int w = cw; w < words_; ++w) q[w] ^= pr[w];
        }
        if (pivot_cols) pivot_cols->push_back(c);
        ++rank;
    }
    return rank;
}

std::vector<int> BitMatrix::row_support(int r) const {
    std::vector<int> out;
    const std::uint64_t* p = row_ptr(r);
    for (int w = 0; w < words_; ++w) {
        std::uint64_t m = p[w];
        while (m) {
            const int b = __builtin_ctzll(m);
            out.push_back(w * 64 + b);
            m &= m - 1;
        }
    }
    return out;
}

} // namespace coopdec
