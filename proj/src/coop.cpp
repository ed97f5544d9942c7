#include "coopdec/coop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace coopdec::coop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// index of the unique minimum, -1 on a tie
int strict_argmin(std::span<const double> values) {
    int best = 0;
    bool tie = false;
    for (int v = 1; v < int(values.size()); ++v) {
        if (values[v] < values[best]) {
            best = v;
            tie = false;
        } else if (values[v] == values[best]) {
            tie = true;
        }
    }
    return tie ? -1 : best;
}

int argmin_lowest(std::span<const double> values) {
    int best = 0;
    for (int v = 1; v < int(values.size()); ++v)
        if (values[v] < values[best]) best = v;
    return best;
}

} // namespace

// ---------------------------------------------------------------------------
// PropagationMatrix
// ---------------------------------------------------------------------------

double PropagationMatrix::weight(int i, int j) const {
    const auto& row = rows[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const auto& e, int col) { return e.first < col; });
    if (it != row.end() && it->first == j) return it->second;
    return 0.0;
}

ValidationReport validate_propagation_matrix(const PropagationMatrix& w, bool require_symmetric) {
    if (w.n <= 0 || int(w.rows.size()) != w.n)
        return {false, "shape: rows array does not match n"};

    std::vector<double> col_sum(w.n, 0.0);
    for (int i = 0; i < w.n; ++i) {
        int prev = -1;
        for (const auto& [j, v] : w.rows[i]) {
            if (j < 0 || j >= w.n) return {false, "column index out of range"};
            if (j <= prev) return {false, "row entries not strictly sorted"};
            prev = j;
            if (!(v >= 0.0)) return {false, "negative entry at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")"};
            col_sum[j] += v;
        }
    }
    for (int j = 0; j < w.n; ++j)
        if (std::abs(col_sum[j] - 1.0) > 1e-12)
            return {false, "column " + std::to_string(j) + " sums to " + std::to_string(col_sum[j])};

    // irreducibility == strong connectivity of the positive support
    auto reach_all = [&](bool transpose) {
        std::vector<std::vector<int>> adj(w.n);
        for (int i = 0; i < w.n; ++i)
            for (const auto& [j, v] : w.rows[i])
                if (v > 0.0) adj[transpose ? j : i].push_back(transpose ? i : j);
        std::vector<char> seen(w.n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
        }
        return count == w.n;
    };
    if (!reach_all(false) || !reach_all(true)) return {false, "support graph is not strongly connected"};

    if (require_symmetric) {
        for (int i = 0; i < w.n; ++i)
            for (const auto& [j, v] : w.rows[i])
                if (std::abs(w.weight(j, i) - v) > 1e-12)
                    return {false, "not symmetric at (" + std::to_string(i) + "," +
                                       std::to_string(j) + ")"};
    }
    return {true, ""};
}

PropagationMatrix build_propagation_matrix(const std::vector<std::vector<int>>& neighbors) {
    const int n = int(neighbors.size());
    if (n <= 0) throw TopologyError("build_propagation_matrix: empty neighbor relation");

    std::vector<std::vector<int>> nb(n);
    for (int i = 0; i < n; ++i) {
        nb[i] = neighbors[i];
        std::sort(nb[i].begin(), nb[i].end());
        nb[i].erase(std::unique(nb[i].begin(), nb[i].end()), nb[i].end());
        nb[i].erase(std::remove(nb[i].begin(), nb[i].end(), i), nb[i].end());
        for (int j : nb[i])
            if (j < 0 || j >= n)
                throw TopologyError("build_propagation_matrix: neighbor index out of range");
    }
    for (int i = 0; i < n; ++i)
        for (int j : nb[i])
            if (!std::binary_search(nb[j].begin(), nb[j].end(), i))
                throw TopologyError("build_propagation_matrix: neighbor relation is not symmetric");

    // connectivity; report a node from the separated part on failure
    {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : nb[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
        }
        if (count != n) {
            int witness = 0;
            while (seen[witness]) ++witness;
            throw TopologyError("build_propagation_matrix: graph is disconnected (variable " +
                                std::to_string(witness) + " unreachable from variable 0)");
        }
    }

    int max_deg = 0;
    for (const auto& s : nb) max_deg = std::max(max_deg, int(s.size()));

    int denom = std::max(max_deg, 1);
    bool all_diag_zero = true;
    for (const auto& s : nb)
        if (int(s.size()) != max_deg) all_diag_zero = false;
    if (all_diag_zero && max_deg > 0) {
        // periodic support iff the graph is bipartite
        std::vector<int> color(n, -1);
        color[0] = 0;
        std::vector<int> stack{0};
        bool bipartite = true;
        while (!stack.empty() && bipartite) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : nb[u]) {
                if (color[v] < 0) {
                    color[v] = 1 - color[u];
                    stack.push_back(v);
                } else if (color[v] == color[u]) {
                    bipartite = false;
                    break;
                }
            }
        }
        if (bipartite) denom = max_deg + 1;
    }

    PropagationMatrix w;
    w.n = n;
    w.rows.resize(n);
    const double off = 1.0 / denom;
    for (int i = 0; i < n; ++i) {
        const double self = 1.0 - double(nb[i].size()) / denom;
        bool placed = false;
        for (int j : nb[i]) {
            if (!placed && j > i) {
                if (self > 0.0) w.rows[i].emplace_back(i, self);
                placed = true;
            }
            w.rows[i].emplace_back(j, off);
        }
        if (!placed && self > 0.0) w.rows[i].emplace_back(i, self);
    }
    return w;
}

// ---------------------------------------------------------------------------
// CostDecomposition helpers
// ---------------------------------------------------------------------------

AssignmentConstraints CostDecomposition::zero_state() const {
    AssignmentConstraints c;
    c.values.resize(num_variables());
    const auto& doms = domains();
    for (int i = 0; i < num_variables(); ++i) c.values[i].assign(doms[i].size(), 0.0);
    return c;
}

std::optional<double> CostDecomposition::total_cost(std::span<const int> assignment) const {
    double total = 0.0;
    for (int i = 0; i < num_variables(); ++i) {
        const auto v = subcost(i, assignment);
        if (!v) return std::nullopt;
        total += *v;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

CoopEngine::CoopEngine(const CostDecomposition& dec, const PropagationMatrix& w) : dec_(dec) {
    const int n = dec.num_variables();
    if (w.n != n)
        throw std::invalid_argument("CoopEngine: propagation matrix size does not match");
    scope_weights_.resize(n);
    outside_scope_.resize(n);
    marginals_.resize(n);
    candidate_.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        const auto& sc = dec.scope(i);
        if (!std::binary_search(sc.begin(), sc.end(), i))
            throw std::invalid_argument("CoopEngine: scope of sub-problem " + std::to_string(i) +
                                        " does not contain its variable");
        scope_weights_[i].resize(sc.size());
        for (std::size_t t = 0; t < sc.size(); ++t) scope_weights_[i][t] = w.weight(i, sc[t]);
        for (const auto& [j, v] : w.rows[i])
            if (v > 0.0 && !std::binary_search(sc.begin(), sc.end(), j))
                outside_scope_[i].emplace_back(j, v);
    }
}

void CoopEngine::step(const AssignmentConstraints& c_prev, AssignmentConstraints& c_next,
                      double lambda) {
    if (&c_prev == &c_next)
        throw std::invalid_argument("CoopEngine::step: in-place update is not allowed");
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("CoopEngine::step: cooperation strength must be in [0,1)");
    const int n = dec_.num_variables();
    if (int(c_prev.values.size()) != n)
        throw std::invalid_argument("CoopEngine::step: state size mismatch");

    c_next.values.resize(n);
    lower_bound_ = 0.0;
    residual_ = 0.0;

    for (int i = 0; i < n; ++i) {
        auto& tables = marginals_[i];
        dec_.minimize(i, lambda, scope_weights_[i], c_prev.values, scratch_, tables);
        if (tables.empty() || tables[0].variable != i)
            throw std::logic_error("CoopEngine::step: minimizer must report the own-variable "
                                   "marginal first");

        // mass on variables outside the scope enters as a constant under the min
        if (!outside_scope_[i].empty()) {
            double extra = 0.0;
            for (const auto& [j, wt] : outside_scope_[i]) {
                const auto& cj = c_prev.values[j];
                extra += wt * *std::min_element(cj.begin(), cj.end());
            }
            extra *= lambda;
            if (extra != 0.0)
                for (auto& t : tables)
                    for (double& v : t.values) v += extra;
        }

        const auto& own = tables[0].values;
        for (double v : own)
            if (!std::isfinite(v))
                throw InfeasibleSubproblem(i, "sub-problem " + std::to_string(i) +
                                                  ": no feasible completion for some pin value");

        auto& row = c_next.values[i];
        row.assign(own.begin(), own.end());
        const auto& prev_row = c_prev.values[i];
        if (prev_row.size() != row.size())
            throw std::invalid_argument("CoopEngine::step: state table shape mismatch");
        for (std::size_t v = 0; v < row.size(); ++v)
            residual_ = std::max(residual_, std::abs(row[v] - prev_row[v]));

        const int a = argmin_lowest(row);
        candidate_[i] = a;
        lower_bound_ += row[a];
    }
    c_next.iteration = c_prev.iteration + 1;

    // consensus: all marginal voters strictly agree per variable
    consensus_ = true;
    std::vector<int> vote(n, -1);
    for (const auto& tables : marginals_) {
        for (const auto& t : tables) {
            const int a = strict_argmin(t.values);
            if (a < 0 || (vote[t.variable] >= 0 && vote[t.variable] != a)) {
                consensus_ = false;
                break;
            }
            vote[t.variable] = a;
        }
        if (!consensus_) break;
    }
}

std::pair<AssignmentConstraints, IterationReport> coop_iterate(const CostDecomposition& dec,
                                                               const PropagationMatrix& w,
                                                               const AssignmentConstraints& c_prev,
                                                               double lambda) {
    CoopEngine engine(dec, w);
    AssignmentConstraints c_next;
    engine.step(c_prev, c_next, lambda);

    IterationReport rep;
    rep.k = c_next.iteration;
    rep.candidate = engine.candidate();
    rep.lower_bound = engine.lower_bound();
    rep.consensus = engine.consensus();
    rep.residual = engine.residual();
    rep.candidate_cost = dec.total_cost(rep.candidate);
    for (const auto& tables : engine.marginals())
        rep.marginals.insert(rep.marginals.end(), tables.begin(), tables.end());
    return {std::move(c_next), std::move(rep)};
}

bool consensus_check(std::span<const MarginalTable> marginals, int num_variables) {
    std::vector<int> vote(num_variables, -1);
    std::vector<char> voted(num_variables, 0);
    for (const auto& t : marginals) {
        const int a = strict_argmin(t.values);
        if (a < 0) return false;
        if (voted[t.variable] && vote[t.variable] != a) return false;
        vote[t.variable] = a;
        voted[t.variable] = 1;
    }
    for (int i = 0; i < num_variables; ++i)
        if (!voted[i]) return false;
    return true;
}

double gap_certificate(double e_tilde, double lower_bound_prev, double lambda_product) {
    if (e_tilde < lower_bound_prev - 1e-9)
        throw std::logic_error("gap_certificate: lower bound " + std::to_string(lower_bound_prev) +
                               " exceeds candidate cost " + std::to_string(e_tilde));
    if (lambda_product == 0.0) return 0.0;
    return std::max(0.0, lambda_product * (e_tilde - lower_bound_prev));
}

RunResult run(const CostDecomposition& dec, const PropagationMatrix& w, const CoopConfig& config,
              const AssignmentConstraints* initial) {
    if (config.max_iterations < 1)
        throw std::invalid_argument("run: max_iterations must be >= 1");

    CoopEngine engine(dec, w);
    RunResult result;
    AssignmentConstraints cur = initial ? *initial : dec.zero_state();
    AssignmentConstraints next;

    double bound_prev = 0.0;
    for (const auto& row : cur.values) bound_prev += *std::min_element(row.begin(), row.end());

    int streak = 0;
    std::vector<int> streak_candidate;
    std::optional<double> streak_cost;
    std::optional<double> cert;

    for (int step = 1; step <= config.max_iterations; ++step) {
        const int k = cur.iteration + 1;
        const double lambda = config.lambda_schedule ? config.lambda_schedule(k) : 0.9;
        if (!(lambda >= 0.0 && lambda < 1.0))
            throw std::invalid_argument("run: lambda schedule produced a value outside [0,1)");

        engine.step(cur, next, lambda);

        IterationReport rep;
        rep.k = k;
        rep.candidate = engine.candidate();
        rep.lower_bound = engine.lower_bound();
        rep.consensus = engine.consensus();
        rep.residual = engine.residual();
        rep.candidate_cost = dec.total_cost(rep.candidate);

        if (rep.consensus) {
            if (streak == 0 || rep.candidate != streak_candidate) {
                streak = 1;
                streak_candidate = rep.candidate;
                streak_cost = rep.candidate_cost;
                cert.reset();
            } else {
                ++streak;
            }
            if (streak_cost) {
                const double fresh = gap_certificate(*streak_cost, bound_prev, lambda);
                cert = cert ? std::min(fresh, lambda * *cert) : fresh;
                rep.gap_certificate = cert;
            }
        } else {
            streak = 0;
            cert.reset();
        }

        for (const auto& tables : engine.marginals())
            rep.marginals.insert(rep.marginals.end(), tables.begin(), tables.end());
        result.trace.push_back(std::move(rep));

        bound_prev = engine.lower_bound();
        std::swap(cur, next);

        if (streak >= config.consensus_window) break;
        if (engine.residual() < config.residual_tolerance) break;
    }
    result.final_state = std::move(cur);
    return result;
}

void write_trace_csv(std::ostream& out, std::span<const IterationReport> trace) {
    out << "k,lower_bound,residual,consensus,candidate_cost\n";
    for (const auto& r : trace) {
        out << r.k << ',' << r.lower_bound << ',' << r.residual << ',' << (r.consensus ? 1 : 0)
            << ',';
        if (r.candidate_cost)
            out << *r.candidate_cost;
        else
            out << "inf";
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// TableDecomposition
// ---------------------------------------------------------------------------

TableDecomposition::TableDecomposition(std::vector<std::vector<int>> domains)
    : domains_(std::move(domains)) {
    if (domains_.empty()) throw std::invalid_argument("TableDecomposition: no variables");
    for (const auto& d : domains_) {
        if (d.empty()) throw std::invalid_argument("TableDecomposition: empty domain");
        if (!std::is_sorted(d.begin(), d.end()))
            throw std::invalid_argument("TableDecomposition: domains must be sorted");
    }
}

void TableDecomposition::add_term(std::vector<int> scope, std::vector<double> table) {
    if (scope.empty()) throw std::invalid_argument("add_term: empty scope");
    std::size_t cells = 1;
    for (int v : scope) {
        if (v < 0 || v >= num_variables()) throw std::invalid_argument("add_term: bad variable");
        cells *= domains_[v].size();
    }
    {
        auto s = scope;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw std::invalid_argument("add_term: duplicate variable in scope");
    }
    if (table.size() != cells) throw std::invalid_argument("add_term: table size mismatch");

    Term t;
    t.scope = std::move(scope);
    t.stride.assign(t.scope.size(), 1);
    for (int p = int(t.scope.size()) - 2; p >= 0; --p)
        t.stride[p] = t.stride[p + 1] * int(domains_[t.scope[p + 1]].size());
    t.table = std::move(table);
    terms_.push_back(std::move(t));
    built_ = false;
}

void TableDecomposition::ensure_subproblems() const {
    if (built_) return;
    const int n = num_variables();
    scopes_.assign(n, {});
    terms_of_.assign(n, {});
    for (int i = 0; i < n; ++i) scopes_[i].push_back(i);
    for (std::size_t t = 0; t < terms_.size(); ++t)
        for (int v : terms_[t].scope) {
            terms_of_[v].push_back(int(t));
            for (int u : terms_[t].scope) scopes_[v].push_back(u);
        }
    for (auto& s : scopes_) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    built_ = true;
}

const std::vector<int>& TableDecomposition::scope(int i) const {
    ensure_subproblems();
    return scopes_[i];
}

std::optional<double> TableDecomposition::subcost(int i, std::span<const int> assignment) const {
    ensure_subproblems();
    double total = 0.0;
    for (int t : terms_of_[i]) {
        const Term& term = terms_[t];
        std::size_t flat = 0;
        for (std::size_t p = 0; p < term.scope.size(); ++p)
            flat += std::size_t(term.stride[p]) * std::size_t(assignment[term.scope[p]]);
        const double v = term.table[flat];
        if (!std::isfinite(v)) return std::nullopt;
        total += v / double(term.scope.size());
    }
    return total;
}

std::optional<double> TableDecomposition::evaluate(std::span<const int> assignment) const {
    double total = 0.0;
    for (const Term& term : terms_) {
        std::size_t flat = 0;
        for (std::size_t p = 0; p < term.scope.size(); ++p)
            flat += std::size_t(term.stride[p]) * std::size_t(assignment[term.scope[p]]);
        const double v = term.table[flat];
        if (!std::isfinite(v)) return std::nullopt;
        total += v;
    }
    return total;
}

std::vector<std::vector<int>> TableDecomposition::neighbor_sets() const {
    ensure_subproblems();
    std::vector<std::vector<int>> nb(num_variables());
    for (int i = 0; i < num_variables(); ++i)
        for (int j : scopes_[i])
            if (j != i) nb[i].push_back(j);
    return nb;
}

void TableDecomposition::minimize(int i, double lambda, std::span<const double> scope_weights,
                                  const std::vector<std::vector<double>>& c_prev,
                                  MinimizeScratch& scratch,
                                  std::vector<MarginalTable>& out) const {
    (void)scratch;
    ensure_subproblems();
    const auto& sc = scopes_[i];
    const int s = int(sc.size());

    out.resize(s);
    for (int t = 0; t < s; ++t) {
        out[t].subproblem = i;
        out[t].variable = sc[t];
        out[t].values.assign(domains_[sc[t]].size(), kInf);
    }

    // slot of each term variable within the scope
    std::vector<std::vector<int>> term_slot(terms_of_[i].size());
    for (std::size_t ti = 0; ti < terms_of_[i].size(); ++ti) {
        const Term& term = terms_[terms_of_[i][ti]];
        term_slot[ti].resize(term.scope.size());
        for (std::size_t p = 0; p < term.scope.size(); ++p)
            term_slot[ti][p] =
                int(std::lower_bound(sc.begin(), sc.end(), term.scope[p]) - sc.begin());
    }

    std::vector<int> val(s, 0);
    for (;;) {
        double f = 0.0;
        for (std::size_t ti = 0; ti < terms_of_[i].size() && std::isfinite(f); ++ti) {
            const Term& term = terms_[terms_of_[i][ti]];
            std::size_t flat = 0;
            for (std::size_t p = 0; p < term.scope.size(); ++p)
                flat += std::size_t(term.stride[p]) * std::size_t(val[term_slot[ti][p]]);
            f += term.table[flat] / double(term.scope.size());
        }
        if (std::isfinite(f)) {
            f *= (1.0 - lambda);
            for (int t = 0; t < s; ++t) f += lambda * scope_weights[t] * c_prev[sc[t]][val[t]];
            for (int t = 0; t < s; ++t)
                out[t].values[val[t]] = std::min(out[t].values[val[t]], f);
        }

        int p = s - 1;
        while (p >= 0 && val[p] + 1 == int(domains_[sc[p]].size())) val[p--] = 0;
        if (p < 0) break;
        ++val[p];
    }

    // own-variable table first
    const int own = int(std::lower_bound(sc.begin(), sc.end(), i) - sc.begin());
    if (own != 0) std::swap(out[0], out[own]);
}

} // namespace coopdec::coop
