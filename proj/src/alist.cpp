#include "coopdec/alist.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace coopdec {

namespace {

// one line of whitespace-separated integers; blank lines are skipped
struct LineReader {
    std::istream& in;
    int line_no = 0;

    bool next(std::vector<long>& out) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream ss(line);
            out.clear();
            long v;
            while (ss >> v) out.push_back(v);
            if (!ss.eof()) {
                std::string tok;
                ss.clear();
                ss >> tok;
                throw AlistParseError(line_no, "unexpected token '" + tok + "'");
            }
            if (!out.empty()) return true;
        }
        return false;
    }

    std::vector<long> expect(std::size_t count, const char* what) {
        std::vector<long> v;
        if (!next(v)) throw AlistParseError(line_no + 1, std::string("missing ") + what);
        if (v.size() != count)
            throw AlistParseError(line_no, std::string("expected ") + std::to_string(count) + " " +
                                               what + ", found " + std::to_string(v.size()));
        return v;
    }
};

} // namespace

ParityCheckMatrix alist_read(std::istream& in) {
    LineReader rd{in};

    const auto head = rd.expect(2, "values on the size line");
    const long n = head[0], m = head[1];
    if (n <= 0 || m <= 0) throw AlistParseError(rd.line_no, "non-positive matrix size");

    const auto maxw = rd.expect(2, "values on the max-weight line");
    const long max_col = maxw[0], max_row = maxw[1];
    if (max_col < 0 || max_row < 0) throw AlistParseError(rd.line_no, "negative max weight");

    const auto col_w = rd.expect(std::size_t(n), "column weights");
    const auto row_w = rd.expect(std::size_t(m), "row weights");
    for (long w : col_w)
        if (w < 0 || w > max_col) throw AlistParseError(rd.line_no, "column weight out of range");
    for (long w : row_w)
        if (w < 0 || w > max_row) throw AlistParseError(rd.line_no, "row weight out of range");

    auto read_adjacency = [&](long count, long declared_w, long index_limit,
                              const char* what) -> std::vector<int> {
        std::vector<long> v;
        if (!rd.next(v)) throw AlistParseError(rd.line_no + 1, std::string("missing ") + what);
        std::vector<int> entries;
        for (long x : v) {
            if (x == 0) continue;  // padding
            if (x < 1 || x > index_limit)
                throw AlistParseError(rd.line_no, std::string("index out of range in ") + what);
            entries.push_back(int(x - 1));
        }
        if (long(entries.size()) != declared_w)
            throw AlistParseError(rd.line_no, std::string("declared degree ") +
                                                  std::to_string(declared_w) + " but " +
                                                  std::to_string(entries.size()) + " entries in " + what);
        (void)count;
        return entries;
    };

    std::vector<std::vector<int>> cols(n);
    for (long c = 0; c < n; ++c) cols[c] = read_adjacency(n, col_w[c], m, "column list");
    std::vector<std::vector<int>> rows(m);
    for (long r = 0; r < m; ++r) rows[r] = read_adjacency(m, row_w[r], n, "row list");

    ParityCheckMatrix h = ParityCheckMatrix::from_rows(int(n), std::move(rows));

    // the column lists must agree with the row lists
    for (long c = 0; c < n; ++c) {
        std::vector<int> want = cols[c];
        std::sort(want.begin(), want.end());
        if (want != h.col_support[c])
            throw AlistParseError(rd.line_no, "column list " + std::to_string(c + 1) +
                                                  " inconsistent with the row lists");
    }
    return h;
}

ParityCheckMatrix alist_read(const std::string& text) {
    std::istringstream ss(text);
    return alist_read(ss);
}

std::string alist_write(const ParityCheckMatrix& h) {
    std::size_t max_col = 0, max_row = 0;
    for (const auto& c : h.col_support) max_col = std::max(max_col, c.size());
    for (const auto& r : h.row_support) max_row = std::max(max_row, r.size());

    std::ostringstream out;
    out << h.n << ' ' << h.rows << '\n';
    out << max_col << ' ' << max_row << '\n';
    for (int c = 0; c < h.n; ++c) out << h.col_support[c].size() << (c + 1 < h.n ? ' ' : '\n');
    for (int r = 0; r < h.rows; ++r) out << h.row_support[r].size() << (r + 1 < h.rows ? ' ' : '\n');
    auto emit = [&](const std::vector<int>& entries, std::size_t width) {
        for (std::size_t t = 0; t < width; ++t) {
            out << (t < entries.size() ? entries[t] + 1 : 0);
            out << (t + 1 < width ? ' ' : '\n');
        }
    };
    for (const auto& c : h.col_support) emit(c, max_col);
    for (const auto& r : h.row_support) emit(r, max_row);
    return out.str();
}

ParityCheckMatrix alist_load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open alist file: " + path);
    return alist_read(f);
}

void alist_save(const std::string& path, const ParityCheckMatrix& h) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write alist file: " + path);
    f << alist_write(h);
}

} // namespace coopdec
