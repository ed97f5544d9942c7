#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coopdec/codes.hpp"

namespace coopdec::sim {

struct SimConfig {
    std::string code;   // constructor spec, e.g. "product:side=8,dims=2"
    std::string alist;  // or a path to an AList file
    std::vector<std::string> decoders{"cooperative", "sum_product"};
    std::vector<double> ebn0_db;
    long frames = 1000;
    long target_errors = 50;  // 0 disables early stopping
    std::uint64_t seed = 1;
    int workers = 0;  // 0 = hardware concurrency
    double lambda = 0.9;
    int max_iters_coop = 120;
    int max_iters_spa = 30;
    std::string out;   // CSV path, empty = stdout only via caller
    std::string plot;  // plotdata path, empty = <out>.plot when out is set
    bool timing = true;
};

struct SweepCell {
    std::string decoder;
    double ebn0_db = 0.0;
    long frames = 0;
    long bit_errors = 0;
    long frame_errors = 0;
    long info_bit_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double ci_low = 0.0;   // Wilson 95% interval of the FER
    double ci_high = 0.0;
    double mean_iters = 0.0;
    double mean_ms = 0.0;
    double consensus_rate = 0.0;
    std::optional<double> mean_gap;  // over frames that produced a certificate
    double info_ber = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
    int n = 0;
    int dimension = 0;
};

// "product:side=8,dims=2" | "gallager:n=96,wc=3,wr=6,seed=1" | AList path
LinearCode make_code(const SimConfig& cfg);

SweepResult run_sweep(const SimConfig& cfg);

void emit_csv(const SweepResult& result, std::ostream& out, bool include_timing = true);
void emit_plotdata(const SweepResult& result, std::ostream& out);

std::pair<double, double> wilson_interval(long successes, long trials,
                                          double z = 1.959963984540054);

// key = value file with the CLI flag names; '#' starts a comment
SimConfig load_config_file(const std::string& path);

std::vector<double> parse_double_list(const std::string& csv);
std::vector<std::string> parse_string_list(const std::string& csv);

} // namespace coopdec::sim
