#include "coopdec/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace coopdec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

using EvenOdd = std::pair<double, double>;  // min cost with even / odd xor

inline EvenOdd combine(const EvenOdd& acc, double c0, double c1) {
    return {std::min(c0 + acc.first, c1 + acc.second),
            std::min(c0 + acc.second, c1 + acc.first)};
}

inline EvenOdd pair_combine(const EvenOdd& a, const EvenOdd& b) {
    return {std::min(a.first + b.first, a.second + b.second),
            std::min(a.first + b.second, a.second + b.first)};
}
} // namespace

std::vector<std::array<double, 2>> unary_costs(std::span<const double> llr) {
    std::vector<std::array<double, 2>> f(llr.size());
    for (std::size_t i = 0; i < llr.size(); ++i) f[i] = {2.0 * llr[i], -2.0 * llr[i]};
    return f;
}

ParityMinResult parity_constrained_min(std::span<const std::array<double, 2>> costs,
                                       int required_parity) {
    if (costs.empty()) throw std::invalid_argument("parity_constrained_min: empty cost list");
    const int m = int(costs.size());

    // suffix DP over (even, odd) minima, then a lexicographic front walk
    std::vector<EvenOdd> suffix(m + 1);
    suffix[m] = {0.0, kInf};
    for (int t = m - 1; t >= 0; --t) suffix[t] = combine(suffix[t + 1], costs[t][0], costs[t][1]);

    ParityMinResult r;
    r.argmin.resize(m);
    int parity = required_parity & 1;
    r.min_total = parity ? suffix[0].second : suffix[0].first;

    for (int t = 0; t < m; ++t) {
        const double with0 =
            costs[t][0] + (parity ? suffix[t + 1].second : suffix[t + 1].first);
        const double with1 =
            costs[t][1] + (parity ? suffix[t + 1].first : suffix[t + 1].second);
        if (with0 <= with1) {
            r.argmin[t] = 0;
        } else {
            r.argmin[t] = 1;
            parity ^= 1;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// TannerStructure
// ---------------------------------------------------------------------------

TannerStructure::TannerStructure(const ParityCheckMatrix& h) : h_(h) {
    const int n = h_.n;
    domains_.assign(n, {0, 1});
    scopes_.resize(n);
    sub_.resize(n);
    own_slot_.resize(n);

    std::vector<std::vector<int>> neighbors(n);
    for (int i = 0; i < n; ++i) {
        std::unordered_map<int, int> occ;
        for (int cj : h_.col_support[i])
            for (int v : h_.row_support[cj])
                if (v != i) ++occ[v];

        auto& sc = scopes_[i];
        sc.push_back(i);
        for (const auto& [v, cnt] : occ) sc.push_back(v);
        std::sort(sc.begin(), sc.end());
        own_slot_[i] = int(std::lower_bound(sc.begin(), sc.end(), i) - sc.begin());

        for (int v : sc)
            if (v != i) neighbors[i].push_back(v);

        for (int cj : h_.col_support[i]) {
            CheckRef ref;
            ref.check = cj;
            for (int v : h_.row_support[cj]) {
                if (v == i) continue;
                ref.leaves.push_back(v);
                ref.leaf_slot.push_back(
                    int(std::lower_bound(sc.begin(), sc.end(), v) - sc.begin()));
                ref.leaf_split.push_back(1.0 / double(occ[v]));
            }
            sub_[i].push_back(std::move(ref));
        }
    }
    w_ = coop::build_propagation_matrix(neighbors);
}

// ---------------------------------------------------------------------------
// TannerDecomposition
// ---------------------------------------------------------------------------

TannerDecomposition::TannerDecomposition(std::shared_ptr<const TannerStructure> structure,
                                         std::span<const double> llr)
    : s_(std::move(structure)) {
    if (int(llr.size()) != s_->matrix().n)
        throw std::invalid_argument("TannerDecomposition: llr length does not match n");
    unary_.resize(llr.size());
    shift_ = 0.0;
    for (std::size_t i = 0; i < llr.size(); ++i) {
        const double f0 = 2.0 * llr[i], f1 = -2.0 * llr[i];
        const double lo = std::min(f0, f1);
        unary_[i] = {f0 - lo, f1 - lo};
        shift_ += lo;
    }
}

TannerDecomposition::TannerDecomposition(const ParityCheckMatrix& h, std::span<const double> llr)
    : TannerDecomposition(std::make_shared<const TannerStructure>(h), llr) {}

std::optional<double> TannerDecomposition::subcost(int i, std::span<const int> assignment) const {
    const auto& h = s_->matrix();
    for (int cj : h.col_support[i]) {
        unsigned p = 0;
        for (int v : h.row_support[cj]) p ^= unsigned(assignment[v]);
        if (p & 1u) return std::nullopt;
    }
    return unary_[i][assignment[i]];
}

void TannerDecomposition::minimize(int i, double lambda, std::span<const double> scope_weights,
                                   const std::vector<std::vector<double>>& c_prev,
                                   coop::MinimizeScratch& scratch,
                                   std::vector<coop::MarginalTable>& out) const {
    const auto& checks = s_->subgraph(i);
    const int own = s_->own_slot(i);

    std::size_t tables = 1;
    for (const auto& c : checks) tables += c.leaves.size();
    out.resize(tables);
    out[0].subproblem = i;
    out[0].variable = i;
    out[0].values.assign(2, 0.0);

    const double one_minus = 1.0 - lambda;
    const double w_own = lambda * scope_weights[own];
    double base0 = one_minus * unary_[i][0] + w_own * c_prev[i][0];
    double base1 = one_minus * unary_[i][1] + w_own * c_prev[i][1];

    // pass 1: full parity minima per check
    auto& full = scratch.pair_a;
    full.assign(checks.size(), EvenOdd{0.0, kInf});
    double total0 = 0.0, total1 = 0.0;
    for (std::size_t c = 0; c < checks.size(); ++c) {
        const auto& ref = checks[c];
        EvenOdd acc{0.0, kInf};
        for (std::size_t t = 0; t < ref.leaves.size(); ++t) {
            const int v = ref.leaves[t];
            const double wl = lambda * scope_weights[ref.leaf_slot[t]] * ref.leaf_split[t];
            acc = combine(acc, wl * c_prev[v][0], wl * c_prev[v][1]);
        }
        full[c] = acc;
        total0 += acc.first;
        total1 += acc.second;
    }
    out[0].values[0] = base0 + total0;
    out[0].values[1] = base1 + total1;

    // pass 2: leave-one-out marginal per (check, leaf) occurrence; the own
    // pin is minimized over, the leaf is pinned in this check only
    std::size_t slot = 1;
    auto& pre = scratch.pair_b;
    auto& suf = scratch.pair_c;
    for (std::size_t c = 0; c < checks.size(); ++c) {
        const auto& ref = checks[c];
        const int m = int(ref.leaves.size());
        const double rest0 = base0 + (total0 - full[c].first);
        const double rest1 = base1 + (total1 - full[c].second);

        scratch.buf_a.resize(2 * std::size_t(m));
        pre.assign(m + 1, EvenOdd{0.0, kInf});
        suf.assign(m + 1, EvenOdd{0.0, kInf});
        for (int t = 0; t < m; ++t) {
            const double wl = lambda * scope_weights[ref.leaf_slot[t]] * ref.leaf_split[t];
            scratch.buf_a[2 * t] = wl * c_prev[ref.leaves[t]][0];
            scratch.buf_a[2 * t + 1] = wl * c_prev[ref.leaves[t]][1];
            pre[t + 1] = combine(pre[t], scratch.buf_a[2 * t], scratch.buf_a[2 * t + 1]);
        }
        for (int t = m - 1; t >= 0; --t)
            suf[t] = combine(suf[t + 1], scratch.buf_a[2 * t], scratch.buf_a[2 * t + 1]);

        for (int t = 0; t < m; ++t) {
            const EvenOdd ex = pair_combine(pre[t], suf[t + 1]);
            const double c0 = scratch.buf_a[2 * t], c1 = scratch.buf_a[2 * t + 1];
            auto& table = out[slot++];
            table.subproblem = i;
            table.variable = ref.leaves[t];
            table.values.assign(2, 0.0);
            table.values[0] = std::min(rest0 + c0 + ex.first, rest1 + c0 + ex.second);
            table.values[1] = std::min(rest0 + c1 + ex.second, rest1 + c1 + ex.first);
        }
    }
}

double subproblem_min(const TannerDecomposition& dec, const coop::PropagationMatrix& w,
                      int variable, int pin, const coop::AssignmentConstraints& c_prev,
                      double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("subproblem_min: cooperation strength must be in [0,1)");
    const auto& sc = dec.scope(variable);
    std::vector<double> weights(sc.size());
    for (std::size_t t = 0; t < sc.size(); ++t) weights[t] = w.weight(variable, sc[t]);

    coop::MinimizeScratch scratch;
    std::vector<coop::MarginalTable> tables;
    dec.minimize(variable, lambda, weights, c_prev.values, scratch, tables);

    double extra = 0.0;
    for (const auto& [j, wt] : w.rows[variable])
        if (wt > 0.0 && !std::binary_search(sc.begin(), sc.end(), j)) {
            const auto& cj = c_prev.values[j];
            extra += wt * *std::min_element(cj.begin(), cj.end());
        }
    return tables[0].values[pin & 1] + lambda * extra;
}

// ---------------------------------------------------------------------------
// Cooperative decode loop
// ---------------------------------------------------------------------------

DecodeResult CoopDecoder::decode(std::span<const double> llr, const CoopDecodeConfig& cfg) const {
    if (int(llr.size()) != s_->matrix().n)
        throw std::invalid_argument("decode: llr length does not match n");
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("decode: max_iterations must be >= 1");

    const ParityCheckMatrix& h = s_->matrix();
    TannerDecomposition dec(s_, llr);
    coop::CoopEngine engine(dec, s_->propagation());

    coop::AssignmentConstraints cur = dec.zero_state();
    coop::AssignmentConstraints next;

    DecodeResult res;
    res.codeword.assign(h.n, 0);
    res.lower_bound_trace.reserve(cfg.max_iterations);

    double bound_prev = 0.0;
    int streak = 0;
    int syn_streak = 0;
    CodewordBits streak_word;
    std::optional<double> cert;

    for (int k = 1; k <= cfg.max_iterations; ++k) {
        engine.step(cur, next, cfg.lambda);
        res.iterations = k;
        res.lower_bound_trace.push_back(engine.lower_bound());

        const auto& cand = engine.candidate();
        for (int i = 0; i < h.n; ++i) res.codeword[i] = std::uint8_t(cand[i]);
        const bool syn = syndrome_ok(h, res.codeword);
        const bool cons = engine.consensus();

        if (cons) {
            if (streak == 0 || res.codeword != streak_word) {
                streak = 1;
                streak_word = res.codeword;
                cert.reset();
            } else {
                ++streak;
            }
            if (syn) {
                double e_tilde = 0.0;
                for (int i = 0; i < h.n; ++i) e_tilde += dec.unary()[i][res.codeword[i]];
                const double fresh = coop::gap_certificate(e_tilde, bound_prev, cfg.lambda);
                cert = cert ? std::min(fresh, cfg.lambda * *cert) : fresh;
            }
        } else {
            streak = 0;
            cert.reset();
        }

        res.consensus = cons;
        res.syndrome_ok = syn;
        res.gap_certificate = cert;
        syn_streak = syn ? syn_streak + 1 : 0;

        if (cons && syn && streak >= cfg.consensus_window) {
            res.status = DecodeStatus::Consensus;
            return res;
        }
        if (syn && !cons && syn_streak >= cfg.syndrome_window) {
            res.status = DecodeStatus::SyndromeOnly;
            return res;
        }

        bound_prev = engine.lower_bound();
        std::swap(cur, next);
    }
    res.status = DecodeStatus::MaxIterations;
    return res;
}

DecodeResult decode_cooperative(const LinearCode& code, std::span<const double> llr,
                                const CoopDecodeConfig& cfg) {
    return CoopDecoder(code.h).decode(llr, cfg);
}

} // namespace coopdec
