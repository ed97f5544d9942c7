// Command-line front end: Monte-Carlo BER/FER sweeps, code generation and
// AList rank inspection.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coopdec/alist.hpp"
#include "coopdec/codes.hpp"
#include "coopdec/sim.hpp"

namespace {

int cmd_sweep(const coopdec::sim::SimConfig& cfg) {
    const auto result = coopdec::sim::run_sweep(cfg);

    std::ostringstream csv;
    coopdec::sim::emit_csv(result, csv, cfg.timing);
    if (cfg.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error("cannot write " + cfg.out);
        f << csv.str();
        std::cerr << "wrote " << cfg.out << "\n";
    }

    const std::string plot_path = !cfg.plot.empty() ? cfg.plot
                                  : cfg.out.empty() ? std::string()
                                                    : cfg.out + ".plot";
    if (!plot_path.empty()) {
        std::ofstream f(plot_path);
        if (!f) throw std::runtime_error("cannot write " + plot_path);
        coopdec::sim::emit_plotdata(result, f);
        std::cerr << "wrote " << plot_path << "\n";
    }
    return 0;
}

int cmd_rank(const std::string& alist_path) {
    const auto h = coopdec::alist_load(alist_path);
    const int rank = coopdec::rank_gf2(h);
    std::cout << "n " << h.n << "\n"
              << "checks " << h.rows << "\n"
              << "rank " << rank << "\n"
              << "dimension " << (h.n - rank) << "\n"
              << "rate " << double(h.n - rank) / double(h.n) << "\n"
              << "four_cycles " << coopdec::count_four_cycles(h) << "\n";
    return 0;
}

int cmd_gen(const coopdec::sim::SimConfig& cfg, const std::string& out_path) {
    const auto code = coopdec::sim::make_code(cfg);
    coopdec::alist_save(out_path, code.h);
    std::cout << "n " << code.h.n << "\n"
              << "checks " << code.h.rows << "\n"
              << "dimension " << code.dimension << "\n"
              << "rate " << double(code.dimension) / double(code.h.n) << "\n";
    if (code.four_cycles) std::cout << "four_cycles " << *code.four_cycles << "\n";
    std::cerr << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LDPC decoding toolkit: cooperative and sum-product decoders "
                 "with a Monte-Carlo AWGN harness"};
    app.require_subcommand(1);

    coopdec::sim::SimConfig cfg;
    std::string config_path;

    auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo Eb/N0 sweep");
    std::string ebn0_csv, decoders_csv;
    auto* opt_config = sweep->add_option("--config", config_path, "key = value config file");
    auto* opt_code = sweep->add_option("--code", cfg.code, "code spec, e.g. product:side=8,dims=2");
    auto* opt_alist = sweep->add_option("--alist", cfg.alist, "AList file path");
    auto* opt_decoders =
        sweep->add_option("--decoders", decoders_csv, "comma list: cooperative,sum_product");
    auto* opt_ebn0 = sweep->add_option("--ebn0", ebn0_csv, "comma list of Eb/N0 points in dB");
    auto* opt_frames = sweep->add_option("--frames", cfg.frames, "frames per grid point");
    auto* opt_target =
        sweep->add_option("--target-errors", cfg.target_errors,
                          "stop a point after this many frame errors per decoder (0 = never)");
    auto* opt_seed = sweep->add_option("--seed", cfg.seed, "master seed");
    auto* opt_workers = sweep->add_option("--workers", cfg.workers, "worker threads (0 = auto)");
    auto* opt_lambda = sweep->add_option("--lambda", cfg.lambda, "cooperation strength in [0,1)");
    auto* opt_mic = sweep->add_option("--max-iters-coop", cfg.max_iters_coop,
                                      "cooperative iteration cap");
    auto* opt_mis = sweep->add_option("--max-iters-spa", cfg.max_iters_spa,
                                      "sum-product iteration cap");
    auto* opt_out = sweep->add_option("--out", cfg.out, "CSV output path");
    auto* opt_plot = sweep->add_option("--plot", cfg.plot, "plotdata output path");
    auto* flag_no_timing =
        sweep->add_flag("--no-timing", "write nan instead of wall time (reproducible CSV)");

    std::string rank_alist;
    auto* rank = app.add_subcommand("rank", "rank/dimension of an AList matrix");
    rank->add_option("--alist", rank_alist, "AList file path")->required();

    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "construct a code and write it as AList");
    gen->add_option("--code", cfg.code, "code spec, e.g. gallager:n=96,wc=3,wr=6,seed=1")
        ->required();
    gen->add_option("--out", gen_out, "output AList path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            if (*opt_config) {
                // flags given on the command line override the file
                coopdec::sim::SimConfig file_cfg = coopdec::sim::load_config_file(config_path);
                if (*opt_code) file_cfg.code = cfg.code;
                if (*opt_alist) file_cfg.alist = cfg.alist;
                if (*opt_frames) file_cfg.frames = cfg.frames;
                if (*opt_target) file_cfg.target_errors = cfg.target_errors;
                if (*opt_seed) file_cfg.seed = cfg.seed;
                if (*opt_workers) file_cfg.workers = cfg.workers;
                if (*opt_lambda) file_cfg.lambda = cfg.lambda;
                if (*opt_mic) file_cfg.max_iters_coop = cfg.max_iters_coop;
                if (*opt_mis) file_cfg.max_iters_spa = cfg.max_iters_spa;
                if (*opt_out) file_cfg.out = cfg.out;
                if (*opt_plot) file_cfg.plot = cfg.plot;
                cfg = file_cfg;
            }
            if (*opt_decoders) cfg.decoders = coopdec::sim::parse_string_list(decoders_csv);
            if (*opt_ebn0) cfg.ebn0_db = coopdec::sim::parse_double_list(ebn0_csv);
            if (*flag_no_timing) cfg.timing = false;
            return cmd_sweep(cfg);
        }
        if (rank->parsed()) return cmd_rank(rank_alist);
        if (gen->parsed()) return cmd_gen(cfg, gen_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
