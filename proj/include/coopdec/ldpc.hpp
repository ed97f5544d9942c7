#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "coopdec/codes.hpp"
#include "coopdec/coop.hpp"

namespace coopdec {

// signed unary tables from channel LLRs: f_i = (+2 a_i, -2 a_i) for bits (0,1)
std::vector<std::array<double, 2>> unary_costs(std::span<const double> llr);

struct ParityMinResult {
    double min_total = 0.0;
    std::vector<std::uint8_t> argmin;
};

// Minimum of sum(cost[t][bit_t]) over bit vectors whose xor equals
// required_parity; the reported argmin is the lexicographically smallest
// optimal assignment.
ParityMinResult parity_constrained_min(std::span<const std::array<double, 2>> costs,
                                       int required_parity);

enum class DecodeStatus { Consensus, SyndromeOnly, MaxIterations };

struct DecodeResult {
    CodewordBits codeword;
    bool consensus = false;
    bool syndrome_ok = false;
    int iterations = 0;
    std::optional<double> gap_certificate;
    std::vector<double> lower_bound_trace;
    DecodeStatus status = DecodeStatus::MaxIterations;
};

// LLR-independent part of the Tanner decomposition: depth-1 sub-graph of
// every variable (its checks plus their full supports), scope tables, and
// the co-occurrence propagation matrix. Shareable across threads and frames.
class TannerStructure {
public:
    explicit TannerStructure(const ParityCheckMatrix& h);

    const ParityCheckMatrix& matrix() const { return h_; }
    const coop::PropagationMatrix& propagation() const { return w_; }
    const std::vector<std::vector<int>>& domains() const { return domains_; }
    const std::vector<int>& scope(int i) const { return scopes_[i]; }

    struct CheckRef {
        int check = 0;
        std::vector<int> leaves;       // support minus the own variable
        std::vector<int> leaf_slot;    // position of each leaf in the scope
        std::vector<double> leaf_split;  // 1/occurrences within this sub-problem
    };
    const std::vector<CheckRef>& subgraph(int i) const { return sub_[i]; }
    int own_slot(int i) const { return own_slot_[i]; }
    // total occurrences of a variable across all sub-graphs (own pin included)
    double unary_share(int v) const { return share_[v]; }

private:
    ParityCheckMatrix h_;
    coop::PropagationMatrix w_;
    std::vector<std::vector<int>> domains_;
    std::vector<std::vector<int>> scopes_;
    std::vector<std::vector<CheckRef>> sub_;
    std::vector<int> own_slot_;
    std::vector<double> share_;  // 1 / occurrence count
};

// Per-frame decomposition E = sum_i E_i with E_i = f_i + the parity
// constraints of the variable's checks (each check replicated whole in every
// adjacent sub-problem). Unary tables are normalized to minimum zero so all
// costs stay nonnegative; cost_shift() maps back to the signed scale.
class TannerDecomposition final : public coop::CostDecomposition {
public:
    TannerDecomposition(std::shared_ptr<const TannerStructure> structure,
                        std::span<const double> llr);
    TannerDecomposition(const ParityCheckMatrix& h, std::span<const double> llr);

    const TannerStructure& structure() const { return *s_; }
    const std::vector<std::array<double, 2>>& unary() const { return unary_; }
    // total subtracted from the signed objective: E_normalized = E_signed - cost_shift()
    double cost_shift() const { return shift_; }

    int num_variables() const override { return s_->matrix().n; }
    const std::vector<std::vector<int>>& domains() const override { return s_->domains(); }
    const std::vector<int>& scope(int i) const override { return s_->scope(i); }
    void minimize(int i, double lambda, std::span<const double> scope_weights,
                  const std::vector<std::vector<double>>& c_prev, coop::MinimizeScratch& scratch,
                  std::vector<coop::MarginalTable>& out) const override;
    std::optional<double> subcost(int i, std::span<const int> assignment) const override;

private:
    std::shared_ptr<const TannerStructure> s_;
    std::vector<std::array<double, 2>> unary_;
    double shift_ = 0.0;
};

// Eq.-style single-pin evaluation of one sub-problem, exposed for testing.
double subproblem_min(const TannerDecomposition& dec, const coop::PropagationMatrix& w,
                      int variable, int pin, const coop::AssignmentConstraints& c_prev,
                      double lambda);

struct CoopDecodeConfig {
    double lambda = 0.9;
    int max_iterations = 120;
    int consensus_window = 3;
    int syndrome_window = 3;
};

class CoopDecoder {
public:
    explicit CoopDecoder(const ParityCheckMatrix& h)
        : s_(std::make_shared<const TannerStructure>(h)) {}
    explicit CoopDecoder(std::shared_ptr<const TannerStructure> s) : s_(std::move(s)) {}

    DecodeResult decode(std::span<const double> llr, const CoopDecodeConfig& cfg = {}) const;

    const TannerStructure& structure() const { return *s_; }

private:
    std::shared_ptr<const TannerStructure> s_;
};

DecodeResult decode_cooperative(const LinearCode& code, std::span<const double> llr,
                                const CoopDecodeConfig& cfg = {});

} // namespace coopdec
