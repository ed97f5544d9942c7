#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coopdec::coop {

// ---------------------------------------------------------------------------
// Propagation matrix
// ---------------------------------------------------------------------------

// Sparse nonnegative square matrix with unit column sums whose support graph
// is strongly connected. Governs how soft decisions are weighted between
// sub-problems.
struct PropagationMatrix {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;  // (column, weight), sorted

    double weight(int i, int j) const;
};

struct ValidationReport {
    bool ok = true;
    std::string violation;  // first violated property, empty when ok
};

ValidationReport validate_propagation_matrix(const PropagationMatrix& w, bool require_symmetric);

struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform-weight matrix on a symmetric neighbor relation: off-diagonal 1/D
// per edge (D = max degree) and the complementary mass on the diagonal.
// When every diagonal lands on zero and the graph is bipartite, D+1 is used
// instead so the support stays aperiodic.
PropagationMatrix build_propagation_matrix(const std::vector<std::vector<int>>& neighbors);

// ---------------------------------------------------------------------------
// Decomposition contract
// ---------------------------------------------------------------------------

// Soft-decision state: one cost table per variable, values[i][v] indexed by
// the position of v in the variable's domain.
struct AssignmentConstraints {
    std::vector<std::vector<double>> values;
    int iteration = 0;
};

// Min-marginal of one sub-problem for one variable occurrence. Sub-problems
// that internally replicate a variable report one table per occurrence.
struct MarginalTable {
    int subproblem = 0;
    int variable = 0;
    std::vector<double> values;
};

// reusable buffers handed to CostDecomposition::minimize
struct MinimizeScratch {
    std::vector<double> buf_a;
    std::vector<double> buf_b;
    std::vector<std::pair<double, double>> pair_a;
    std::vector<std::pair<double, double>> pair_b;
    std::vector<std::pair<double, double>> pair_c;
};

struct InfeasibleSubproblem : std::runtime_error {
    int subproblem;
    InfeasibleSubproblem(int sp, const std::string& what_)
        : std::runtime_error(what_), subproblem(sp) {}
};

// A decomposition E = sum_i E_i with one sub-problem per variable. The
// blended objective of sub-problem i at cooperation strength lambda is
//
//   (1-lambda) * E_i(x_scope) + lambda * sum_t scope_weights[t] * c_prev[scope[t]][x]
//
// and minimize() must fill one min-marginal table per scope occurrence,
// own variable first (that table is the new assignment-constraint row).
// Hard constraints are handled inside the minimizer; an infeasible pin is
// signalled with an infinite table entry.
class CostDecomposition {
public:
    virtual ~CostDecomposition() = default;

    virtual int num_variables() const = 0;
    virtual const std::vector<std::vector<int>>& domains() const = 0;  // sorted values
    virtual const std::vector<int>& scope(int i) const = 0;            // sorted, contains i

    virtual void minimize(int i, double lambda, std::span<const double> scope_weights,
                          const std::vector<std::vector<double>>& c_prev,
                          MinimizeScratch& scratch,
                          std::vector<MarginalTable>& out) const = 0;

    // E_i at a full assignment (value indices); nullopt when a hard
    // constraint of the sub-problem is violated
    virtual std::optional<double> subcost(int i, std::span<const int> assignment) const = 0;

    AssignmentConstraints zero_state() const;
    std::optional<double> total_cost(std::span<const int> assignment) const;
};

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

struct CoopConfig {
    std::function<double(int)> lambda_schedule;  // k -> lambda_k, default constant 0.9
    int max_iterations = 120;
    int consensus_window = 3;
    double residual_tolerance = 0.0;
};

struct IterationReport {
    int k = 0;
    std::vector<int> candidate;  // per-variable domain value index
    double lower_bound = 0.0;
    bool consensus = false;
    std::optional<double> gap_certificate;
    double residual = 0.0;
    std::optional<double> candidate_cost;
    std::vector<MarginalTable> marginals;
};

// One synchronous-update engine instance. Precomputes per-sub-problem scope
// weights from W and reuses all buffers between steps, so a step allocates
// nothing after the first call.
class CoopEngine {
public:
    CoopEngine(const CostDecomposition& dec, const PropagationMatrix& w);

    // c_next = update(c_prev); every output row is computed from c_prev only
    void step(const AssignmentConstraints& c_prev, AssignmentConstraints& c_next, double lambda);

    const std::vector<std::vector<MarginalTable>>& marginals() const { return marginals_; }
    const std::vector<int>& candidate() const { return candidate_; }
    double lower_bound() const { return lower_bound_; }
    double residual() const { return residual_; }
    bool consensus() const { return consensus_; }

    const CostDecomposition& decomposition() const { return dec_; }

private:
    const CostDecomposition& dec_;
    std::vector<std::vector<double>> scope_weights_;
    std::vector<std::vector<std::pair<int, double>>> outside_scope_;  // (variable, weight)
    std::vector<std::vector<MarginalTable>> marginals_;
    MinimizeScratch scratch_;
    std::vector<int> candidate_;
    double lower_bound_ = 0.0;
    double residual_ = 0.0;
    bool consensus_ = false;
};

// Single Eq.-style difference-equation update with a full report.
std::pair<AssignmentConstraints, IterationReport> coop_iterate(const CostDecomposition& dec,
                                                               const PropagationMatrix& w,
                                                               const AssignmentConstraints& c_prev,
                                                               double lambda);

// True iff every variable has a strict argmin shared by all marginals that
// mention it; any tie counts as disagreement.
bool consensus_check(std::span<const MarginalTable> marginals, int num_variables);

// First Theorem-3 inequality: lambda_product * (e_tilde - lower_bound_prev)
// bounds E(x~) - E*. Zero when lambda_product is zero. Throws when the
// lower bound exceeds the candidate cost beyond numerical slack.
double gap_certificate(double e_tilde, double lower_bound_prev, double lambda_product);

struct RunResult {
    std::vector<IterationReport> trace;
    AssignmentConstraints final_state;
};

// Iterates until consensus holds for consensus_window consecutive steps,
// the residual drops below tolerance, or max_iterations.
RunResult run(const CostDecomposition& dec, const PropagationMatrix& w, const CoopConfig& config,
              const AssignmentConstraints* initial = nullptr);

// one CSV row per iteration: k, lower_bound, residual, consensus, candidate_cost
void write_trace_csv(std::ostream& out, std::span<const IterationReport> trace);

// ---------------------------------------------------------------------------
// Explicit-table decomposition
// ---------------------------------------------------------------------------

// Decomposition built from soft/hard cost tables. Every term is shared
// equally among the sub-problems of its scope variables (weight 1/|scope|),
// which reproduces the usual aggregation-of-subfunctions splitting. Tables
// may contain +inf entries for hard constraints.
class TableDecomposition final : public CostDecomposition {
public:
    explicit TableDecomposition(std::vector<std::vector<int>> domains);

    // table is row-major over the scope's domains (first scope variable is
    // the slowest index)
    void add_term(std::vector<int> scope, std::vector<double> table);

    int num_variables() const override { return int(domains_.size()); }
    const std::vector<std::vector<int>>& domains() const override { return domains_; }
    const std::vector<int>& scope(int i) const override;
    void minimize(int i, double lambda, std::span<const double> scope_weights,
                  const std::vector<std::vector<double>>& c_prev, MinimizeScratch& scratch,
                  std::vector<MarginalTable>& out) const override;
    std::optional<double> subcost(int i, std::span<const int> assignment) const override;

    // direct evaluation of the undecomposed objective (sum of all terms)
    std::optional<double> evaluate(std::span<const int> assignment) const;

    // co-occurrence neighbor sets, ready for build_propagation_matrix
    std::vector<std::vector<int>> neighbor_sets() const;

private:
    struct Term {
        std::vector<int> scope;
        std::vector<int> stride;
        std::vector<double> table;
    };
    void ensure_subproblems() const;

    std::vector<std::vector<int>> domains_;
    std::vector<Term> terms_;
    mutable std::vector<std::vector<int>> scopes_;
    mutable std::vector<std::vector<int>> terms_of_;  // term indices per sub-problem
    mutable bool built_ = false;
};

} // namespace coopdec::coop
