#include "coopdec/spa.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace coopdec {

namespace {
constexpr double kClamp = 30.0;

double clamp_msg(double v) { return v < -kClamp ? -kClamp : (v > kClamp ? kClamp : v); }
} // namespace

DecodeResult decode_sum_product(const ParityCheckMatrix& h, std::span<const double> llr,
                                int max_iterations) {
    if (int(llr.size()) != h.n)
        throw std::invalid_argument("decode_sum_product: llr length does not match n");
    if (max_iterations < 1)
        throw std::invalid_argument("decode_sum_product: max_iterations must be >= 1");

    // edge layout: one slot per (check, position-in-row)
    std::vector<int> row_start(h.rows + 1, 0);
    for (int j = 0; j < h.rows; ++j)
        row_start[j + 1] = row_start[j] + int(h.row_support[j].size());
    const int edges = row_start[h.rows];

    // per-variable edge list for the variable-side update
    std::vector<std::vector<int>> var_edges(h.n);
    for (int j = 0; j < h.rows; ++j)
        for (std::size_t t = 0; t < h.row_support[j].size(); ++t)
            var_edges[h.row_support[j][t]].push_back(row_start[j] + int(t));

    std::vector<double> v2c(edges), c2v(edges, 0.0), belief(h.n);
    for (int j = 0; j < h.rows; ++j)
        for (std::size_t t = 0; t < h.row_support[j].size(); ++t)
            v2c[row_start[j] + int(t)] = clamp_msg(llr[h.row_support[j][t]]);

    DecodeResult res;
    res.codeword.assign(h.n, 0);

    std::vector<double> tanhs, fwd, bwd;
    for (int iter = 1; iter <= max_iterations; ++iter) {
        // check update: extrinsic tanh-rule product via forward/backward
        // partial products
        for (int j = 0; j < h.rows; ++j) {
            const int deg = row_start[j + 1] - row_start[j];
            tanhs.resize(deg);
            fwd.resize(deg + 1);
            bwd.resize(deg + 1);
            for (int t = 0; t < deg; ++t) tanhs[t] = std::tanh(-0.5 * v2c[row_start[j] + t]);
            fwd[0] = 1.0;
            bwd[deg] = 1.0;
            for (int t = 0; t < deg; ++t) fwd[t + 1] = fwd[t] * tanhs[t];
            for (int t = deg - 1; t >= 0; --t) bwd[t] = bwd[t + 1] * tanhs[t];
            for (int t = 0; t < deg; ++t) {
                double ext = fwd[t] * bwd[t + 1];
                if (ext > 1.0) ext = 1.0;
                if (ext < -1.0) ext = -1.0;
                c2v[row_start[j] + t] = -2.0 * std::atanh(ext);
            }
        }

        // variable update: channel value plus extrinsic sums
        for (int i = 0; i < h.n; ++i) {
            double sum = llr[i];
            for (int e : var_edges[i]) sum += c2v[e];
            belief[i] = sum;
            res.codeword[i] = sum > 0.0 ? 1 : 0;
            for (int e : var_edges[i]) v2c[e] = clamp_msg(sum - c2v[e]);
        }

        res.iterations = iter;
        if (syndrome_ok(h, res.codeword)) {
            res.syndrome_ok = true;
            res.status = DecodeStatus::SyndromeOnly;
            return res;
        }
    }
    res.syndrome_ok = false;
    res.status = DecodeStatus::MaxIterations;
    return res;
}

DecodeResult decode_sum_product(const LinearCode& code, std::span<const double> llr,
                                int max_iterations) {
    return decode_sum_product(code.h, llr, max_iterations);
}

} // namespace coopdec
