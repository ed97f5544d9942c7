#include "coopdec/codes.hpp"

#include <algorithm>
#include <unordered_map>

#include "coopdec/bitmatrix.hpp"
#include "coopdec/rng.hpp"

namespace coopdec {

ParityCheckMatrix ParityCheckMatrix::from_rows(int n, std::vector<std::vector<int>> rows) {
    if (n <= 0) throw std::invalid_argument("ParityCheckMatrix: n must be positive");
    ParityCheckMatrix h;
    h.n = n;
    h.rows = int(rows.size());
    h.row_support = std::move(rows);
    h.col_support.assign(n, {});
    for (int j = 0; j < h.rows; ++j) {
        auto& r = h.row_support[j];
        std::sort(r.begin(), r.end());
        if (r.size() < 2)
            throw std::invalid_argument("ParityCheckMatrix: check " + std::to_string(j) +
                                        " has fewer than 2 variables");
        for (std::size_t t = 0; t < r.size(); ++t) {
            if (r[t] < 0 || r[t] >= n)
                throw std::invalid_argument("ParityCheckMatrix: variable index out of range in check " +
                                            std::to_string(j));
            if (t > 0 && r[t] == r[t - 1])
                throw std::invalid_argument("ParityCheckMatrix: duplicate variable in check " +
                                            std::to_string(j));
        }
        for (int v : r) h.col_support[v].push_back(j);
    }
    return h;
}

std::vector<std::uint8_t> syndrome(const ParityCheckMatrix& h, std::span<const std::uint8_t> x) {
    if (int(x.size()) != h.n)
        throw std::invalid_argument("syndrome: word length " + std::to_string(x.size()) +
                                    " does not match n=" + std::to_string(h.n));
    std::vector<std::uint8_t> s(h.rows, 0);
    for (int j = 0; j < h.rows; ++j) {
        unsigned p = 0;
        for (int v : h.row_support[j]) p ^= x[v];
        s[j] = std::uint8_t(p & 1u);
    }
    return s;
}

bool syndrome_ok(const ParityCheckMatrix& h, std::span<const std::uint8_t> x) {
    if (int(x.size()) != h.n)
        throw std::invalid_argument("syndrome_ok: word length does not match n");
    for (int j = 0; j < h.rows; ++j) {
        unsigned p = 0;
        for (int v : h.row_support[j]) p ^= x[v];
        if (p & 1u) return false;
    }
    return true;
}

static BitMatrix to_bitmatrix(const ParityCheckMatrix& h) {
    BitMatrix m(h.rows, h.n);
    for (int j = 0; j < h.rows; ++j)
        for (int v : h.row_support[j]) m.set(j, v, true);
    return m;
}

int rank_gf2(const ParityCheckMatrix& h) {
    BitMatrix m = to_bitmatrix(h);
    return m.eliminate(false);
}

long count_four_cycles(const ParityCheckMatrix& h) {
    std::unordered_map<std::uint64_t, long> pairs;
    for (const auto& row : h.row_support)
        for (std::size_t a = 0; a < row.size(); ++a)
            for (std::size_t b = a + 1; b < row.size(); ++b)
                ++pairs[std::uint64_t(row[a]) * std::uint64_t(h.n) + std::uint64_t(row[b])];
    long cycles = 0;
    for (const auto& [k, c] : pairs) cycles += c * (c - 1) / 2;
    return cycles;
}

CodewordBits LinearCode::encode(std::span<const std::uint8_t> info) const {
    if (int(info.size()) != dimension)
        throw std::invalid_argument("encode: expected " + std::to_string(dimension) +
                                    " information bits, got " + std::to_string(info.size()));
    CodewordBits x(h.n, 0);
    for (int k = 0; k < dimension; ++k) x[info_positions[k]] = info[k] & 1u;
    for (const auto& [target, sources] : completion) {
        unsigned p = 0;
        for (int s : sources) p ^= x[s];
        x[target] = std::uint8_t(p & 1u);
    }
    return x;
}

LinearCode make_linear_code(ParityCheckMatrix h) {
    BitMatrix m = to_bitmatrix(h);
    std::vector<int> pivots;
    const int rank = m.eliminate(true, &pivots);

    LinearCode code;
    code.dimension = h.n - rank;
    std::vector<char> is_pivot(h.n, 0);
    for (int c : pivots) is_pivot[c] = 1;
    for (int c = 0; c < h.n; ++c)
        if (!is_pivot[c]) code.info_positions.push_back(c);

    // each RREF row fixes its pivot column from information positions only
    code.completion.reserve(rank);
    for (int t = 0; t < rank; ++t) {
        std::vector<int> sup = m.row_support(t);
        std::vector<int> src;
        src.reserve(sup.size() - 1);
        for (int c : sup)
            if (c != pivots[t]) src.push_back(c);
        code.completion.emplace_back(pivots[t], std::move(src));
    }
    code.h = std::move(h);
    return code;
}

namespace {

long ipow_checked(int base, int exp, long cap) {
    long v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > cap / base) return -1;
        v *= base;
    }
    return v;
}

} // namespace

LinearCode build_product_code(int side, int dims, long max_cells) {
    if (side < 2) throw std::invalid_argument("build_product_code: side must be >= 2");
    if (dims < 1) throw std::invalid_argument("build_product_code: dims must be >= 1");
    const long cells = ipow_checked(side, dims, max_cells);
    if (cells < 0 || cells * dims > max_cells)
        throw CapacityError("build_product_code: dims*side^dims exceeds the memory cap");
    const long n = cells;

    std::vector<long> stride(dims);
    stride[0] = 1;
    for (int d = 1; d < dims; ++d) stride[d] = stride[d - 1] * side;

    // one check per (axis, fixed off-axis coordinates)
    std::vector<std::vector<int>> rows;
    rows.reserve(std::size_t(dims) * std::size_t(n / side));
    std::vector<int> coord(dims, 0);
    for (int d = 0; d < dims; ++d) {
        for (long p = 0; p < n; ++p) {
            if ((p / stride[d]) % side != 0) continue;
            std::vector<int> sup(side);
            for (int t = 0; t < side; ++t) sup[t] = int(p + t * stride[d]);
            rows.push_back(std::move(sup));
        }
    }

    LinearCode code;
    code.h = ParityCheckMatrix::from_rows(int(n), std::move(rows));
    code.dimension = int(ipow_checked(side - 1, dims, n));

    // information positions: all coordinates < side-1; parities filled in
    // ascending order of how many coordinates sit on the parity face
    std::vector<std::vector<long>> by_weight(dims + 1);
    for (long p = 0; p < n; ++p) {
        int w = 0;
        long q = p;
        for (int d = 0; d < dims; ++d) {
            if (q % side == side - 1) ++w;
            q /= side;
        }
        by_weight[w].push_back(p);
    }
    code.info_positions.reserve(by_weight[0].size());
    for (long p : by_weight[0]) code.info_positions.push_back(int(p));
    for (int w = 1; w <= dims; ++w) {
        for (long p : by_weight[w]) {
            int axis = -1;
            long q = p;
            for (int d = 0; d < dims; ++d) {
                if (q % side == side - 1) { axis = d; break; }
                q /= side;
            }
            std::vector<int> src(side - 1);
            const long base = p - (side - 1) * stride[axis];
            for (int t = 0; t < side - 1; ++t) src[t] = int(base + t * stride[axis]);
            code.completion.emplace_back(int(p), std::move(src));
        }
    }
    return code;
}

namespace {

struct EdgeGraph {
    int n = 0;
    std::vector<std::vector<int>> rows;  // column lists, unsorted during editing
    std::unordered_map<std::uint64_t, long> pair_count;
    long cycles = 0;

    std::uint64_t key(int u, int v) const {
        if (u > v) std::swap(u, v);
        return std::uint64_t(u) * std::uint64_t(n) + std::uint64_t(v);
    }
    void add_pair(int u, int v) {
        long& c = pair_count[key(u, v)];
        cycles += c;
        ++c;
    }
    void remove_pair(int u, int v) {
        long& c = pair_count[key(u, v)];
        --c;
        cycles -= c;
    }
    bool row_has(int r, int c) const {
        const auto& row = rows[r];
        return std::find(row.begin(), row.end(), c) != row.end();
    }
    void count_all() {
        pair_count.clear();
        cycles = 0;
        for (const auto& row : rows)
            for (std::size_t a = 0; a < row.size(); ++a)
                for (std::size_t b = a + 1; b < row.size(); ++b) add_pair(row[a], row[b]);
    }
    // replace column c_old by c_new in row r, updating the pair counts
    void move(int r, int c_old, int c_new) {
        auto& row = rows[r];
        for (int x : row)
            if (x != c_old) remove_pair(c_old, x);
        *std::find(row.begin(), row.end(), c_old) = c_new;
        for (int x : row)
            if (x != c_new) add_pair(c_new, x);
    }
};

} // namespace

LinearCode build_gallager_regular(int n, int col_weight, int row_weight, std::uint64_t seed) {
    if (n <= 0 || col_weight < 1 || row_weight < 2)
        throw std::invalid_argument("build_gallager_regular: need n>0, col_weight>=1, row_weight>=2");
    const long stubs = long(n) * col_weight;
    if (stubs % row_weight != 0)
        throw std::invalid_argument("build_gallager_regular: n*col_weight must be divisible by row_weight");
    const int m = int(stubs / row_weight);
    if (row_weight > n)
        throw std::invalid_argument("build_gallager_regular: row_weight exceeds n");
    if (col_weight > m)
        throw std::invalid_argument("build_gallager_regular: col_weight exceeds the check count");

    Rng rng(seed);
    std::vector<int> perm(stubs);

    EdgeGraph g;
    g.n = n;

    // random stub matching; duplicate edges are re-drawn by swapping stubs
    for (int restart = 0;; ++restart) {
        if (restart > 50)
            throw std::runtime_error("build_gallager_regular: could not resolve duplicate edges");
        for (long s = 0; s < stubs; ++s) perm[s] = int(s / row_weight);
        for (long s = stubs - 1; s > 0; --s)
            std::swap(perm[s], perm[rng.below(std::uint64_t(s + 1))]);

        bool clean = false;
        for (int pass = 0; pass < 400 && !clean; ++pass) {
            std::unordered_map<std::uint64_t, int> seen;
            clean = true;
            for (long s = 0; s < stubs; ++s) {
                const std::uint64_t k = std::uint64_t(s / col_weight) * std::uint64_t(m) +
                                        std::uint64_t(perm[s]);
                auto [it, fresh] = seen.emplace(k, 1);
                if (!fresh) {
                    clean = false;
                    std::swap(perm[s], perm[rng.below(std::uint64_t(stubs))]);
                }
            }
        }
        if (clean) break;
    }

    g.rows.assign(m, {});
    for (long s = 0; s < stubs; ++s) g.rows[perm[s]].push_back(int(s / col_weight));
    g.count_all();

    // best-effort 4-cycle removal: swap the column endpoints of two edges
    // when that strictly lowers the cycle count
    for (int pass = 0; pass < 50 && g.cycles > 0; ++pass) {
        bool improved = false;
        for (int r1 = 0; r1 < m; ++r1) {
            for (std::size_t t = 0; t < g.rows[r1].size(); ++t) {
                const int c1 = g.rows[r1][t];
                bool offending = false;
                for (int x : g.rows[r1])
                    if (x != c1 && g.pair_count[g.key(c1, x)] > 1) { offending = true; break; }
                if (!offending) continue;
                for (int attempt = 0; attempt < 24; ++attempt) {
                    const int r2 = int(rng.below(std::uint64_t(m)));
                    if (r2 == r1) continue;
                    const int c2 = g.rows[r2][rng.below(std::uint64_t(g.rows[r2].size()))];
                    if (c2 == c1 || g.row_has(r1, c2) || g.row_has(r2, c1)) continue;
                    const long before = g.cycles;
                    g.move(r1, c1, c2);
                    g.move(r2, c2, c1);
                    if (g.cycles < before) {
                        improved = true;
                        break;
                    }
                    g.move(r1, c2, c1);
                    g.move(r2, c1, c2);
                }
            }
        }
        if (!improved) break;
    }

    const long residual = g.cycles;
    LinearCode code = make_linear_code(ParityCheckMatrix::from_rows(n, std::move(g.rows)));
    code.four_cycles = residual;
    return code;
}

} // namespace coopdec
