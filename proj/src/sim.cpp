#include "coopdec/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "coopdec/alist.hpp"
#include "coopdec/channel.hpp"
#include "coopdec/ldpc.hpp"
#include "coopdec/rng.hpp"
#include "coopdec/spa.hpp"

namespace coopdec::sim {

namespace {

std::map<std::string, std::string> parse_kv_pairs(const std::string& body, const char* what) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(std::string(what) + ": expected key=value, got '" + item +
                                        "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

long kv_long(const std::map<std::string, std::string>& kv, const std::string& key, long fallback,
             bool required, const char* what) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (required)
            throw std::invalid_argument(std::string(what) + ": missing parameter '" + key + "'");
        return fallback;
    }
    return std::stol(it->second);
}

} // namespace

LinearCode make_code(const SimConfig& cfg) {
    if (!cfg.alist.empty()) return make_linear_code(alist_load(cfg.alist));
    if (cfg.code.empty()) throw std::invalid_argument("no code specified");

    const auto colon = cfg.code.find(':');
    const std::string kind = cfg.code.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : cfg.code.substr(colon + 1);

    if (kind == "product") {
        const auto kv = parse_kv_pairs(body, "product code spec");
        const long side = kv_long(kv, "side", 8, false, "product code spec");
        const long dims = kv_long(kv, "dims", 0, true, "product code spec");
        return build_product_code(int(side), int(dims));
    }
    if (kind == "gallager") {
        const auto kv = parse_kv_pairs(body, "gallager code spec");
        const long n = kv_long(kv, "n", 0, true, "gallager code spec");
        const long wc = kv_long(kv, "wc", 0, true, "gallager code spec");
        const long wr = kv_long(kv, "wr", 0, true, "gallager code spec");
        const long seed = kv_long(kv, "seed", 1, false, "gallager code spec");
        return build_gallager_regular(int(n), int(wc), int(wr), std::uint64_t(seed));
    }
    throw std::invalid_argument("unknown code spec '" + cfg.code + "'");
}

std::pair<double, double> wilson_interval(long successes, long trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    const double nd = double(trials);
    const double p = double(successes) / nd;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double center = p + z2 / (2.0 * nd);
    const double half = z * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd));
    return {std::max(0.0, (center - half) / denom), std::min(1.0, (center + half) / denom)};
}

namespace {

struct FrameOutcome {
    // per decoder: bit errors, info-bit errors, frame error flag, iterations,
    // consensus flag, certificate, wall time
    struct PerDecoder {
        int bit_errors = 0;
        int info_bit_errors = 0;
        bool frame_error = false;
        int iterations = 0;
        bool consensus = false;
        std::optional<double> gap;
        double ms = 0.0;
    };
    std::vector<PerDecoder> by_decoder;
};

enum class DecoderKind { Cooperative, SumProduct };

DecoderKind decoder_kind(const std::string& name) {
    if (name == "cooperative") return DecoderKind::Cooperative;
    if (name == "sum_product") return DecoderKind::SumProduct;
    throw std::invalid_argument("unknown decoder '" + name + "' (use cooperative, sum_product)");
}

struct Accumulator {
    long frames = 0;
    long bit_errors = 0;
    long frame_errors = 0;
    long info_bit_errors = 0;
    long iters = 0;
    long consensus_frames = 0;
    double ms = 0.0;
    double gap_sum = 0.0;
    long gap_count = 0;
};

} // namespace

SweepResult run_sweep(const SimConfig& cfg) {
    if (cfg.ebn0_db.empty()) throw std::invalid_argument("run_sweep: empty Eb/N0 grid");
    if (cfg.frames < 1) throw std::invalid_argument("run_sweep: frames must be >= 1");
    if (!(cfg.lambda >= 0.0 && cfg.lambda < 1.0))
        throw std::invalid_argument("run_sweep: lambda must be in [0,1)");
    if (cfg.max_iters_coop < 1 || cfg.max_iters_spa < 1)
        throw std::invalid_argument("run_sweep: iteration caps must be >= 1");

    const LinearCode code = make_code(cfg);
    if (code.dimension < 1) throw std::invalid_argument("run_sweep: code has zero rate");
    const double rate = double(code.dimension) / double(code.h.n);

    std::vector<DecoderKind> kinds;
    for (const auto& name : cfg.decoders) kinds.push_back(decoder_kind(name));
    if (kinds.empty()) throw std::invalid_argument("run_sweep: no decoders selected");

    const bool needs_coop =
        std::find(kinds.begin(), kinds.end(), DecoderKind::Cooperative) != kinds.end();
    std::shared_ptr<const TannerStructure> structure;
    if (needs_coop) structure = std::make_shared<const TannerStructure>(code.h);

    CoopDecodeConfig coop_cfg;
    coop_cfg.lambda = cfg.lambda;
    coop_cfg.max_iterations = cfg.max_iters_coop;

    int workers = cfg.workers > 0 ? cfg.workers : int(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    constexpr long kChunk = 256;

    SweepResult result;
    result.n = code.h.n;
    result.dimension = code.dimension;

    for (std::size_t point = 0; point < cfg.ebn0_db.size(); ++point) {
        const auto params =
            ChannelParams::make(cfg.ebn0_db[point], rate, substream_seed(cfg.seed, point));

        std::vector<Accumulator> acc(kinds.size());
        std::vector<FrameOutcome> outcomes(kChunk);
        long done = 0;
        bool stopped = false;

        while (done < cfg.frames && !stopped) {
            const long count = std::min(kChunk, cfg.frames - done);

            auto run_frame = [&](long frame_index, FrameOutcome& out) {
                out.by_decoder.assign(kinds.size(), {});
                Rng info_rng(substream_seed(cfg.seed, point, std::uint64_t(frame_index)) ^
                             0x5bf0f3a9a1f5c3b7ull);
                std::vector<std::uint8_t> info(code.dimension);
                for (auto& b : info) b = std::uint8_t(info_rng.next() >> 63);
                const CodewordBits x = code.encode(info);
                const ReceivedFrame frame = transmit(x, params, std::uint64_t(frame_index));

                for (std::size_t d = 0; d < kinds.size(); ++d) {
                    auto& slot = out.by_decoder[d];
                    const auto t0 = std::chrono::steady_clock::now();
                    DecodeResult dr;
                    if (kinds[d] == DecoderKind::Cooperative)
                        dr = CoopDecoder(structure).decode(frame.llr, coop_cfg);
                    else
                        dr = decode_sum_product(code.h, frame.llr, cfg.max_iters_spa);
                    const auto t1 = std::chrono::steady_clock::now();
                    slot.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                    slot.iterations = dr.iterations;
                    slot.consensus = dr.status == DecodeStatus::Consensus;
                    slot.gap = dr.gap_certificate;
                    for (int i = 0; i < code.h.n; ++i)
                        if (dr.codeword[i] != x[i]) ++slot.bit_errors;
                    for (int pos : code.info_positions)
                        if (dr.codeword[pos] != x[pos]) ++slot.info_bit_errors;
                    slot.frame_error = slot.bit_errors > 0;
                }
            };

            if (workers == 1) {
                for (long f = 0; f < count; ++f) run_frame(done + f, outcomes[f]);
            } else {
                std::atomic<long> cursor{0};
                auto worker = [&] {
                    for (;;) {
                        const long f = cursor.fetch_add(1);
                        if (f >= count) break;
                        run_frame(done + f, outcomes[f]);
                    }
                };
                std::vector<std::thread> pool;
                for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
                for (auto& t : pool) t.join();
            }

            // reduction in frame order keeps results schedule-independent
            for (long f = 0; f < count; ++f) {
                for (std::size_t d = 0; d < kinds.size(); ++d) {
                    const auto& slot = outcomes[f].by_decoder[d];
                    auto& a = acc[d];
                    ++a.frames;
                    a.bit_errors += slot.bit_errors;
                    a.info_bit_errors += slot.info_bit_errors;
                    a.frame_errors += slot.frame_error ? 1 : 0;
                    a.iters += slot.iterations;
                    a.consensus_frames += slot.consensus ? 1 : 0;
                    a.ms += slot.ms;
                    if (slot.gap) {
                        a.gap_sum += *slot.gap;
                        ++a.gap_count;
                    }
                }
            }
            done += count;

            if (cfg.target_errors > 0) {
                bool all_reached = true;
                for (const auto& a : acc)
                    if (a.frame_errors < cfg.target_errors) all_reached = false;
                stopped = all_reached;
            }
        }

        for (std::size_t d = 0; d < kinds.size(); ++d) {
            const auto& a = acc[d];
            SweepCell cell;
            cell.decoder = cfg.decoders[d];
            cell.ebn0_db = cfg.ebn0_db[point];
            cell.frames = a.frames;
            cell.bit_errors = a.bit_errors;
            cell.frame_errors = a.frame_errors;
            cell.info_bit_errors = a.info_bit_errors;
            cell.ber = double(a.bit_errors) / (double(a.frames) * double(code.h.n));
            cell.fer = double(a.frame_errors) / double(a.frames);
            std::tie(cell.ci_low, cell.ci_high) = wilson_interval(a.frame_errors, a.frames);
            cell.mean_iters = double(a.iters) / double(a.frames);
            cell.mean_ms = a.ms / double(a.frames);
            cell.consensus_rate = double(a.consensus_frames) / double(a.frames);
            if (a.gap_count > 0) cell.mean_gap = a.gap_sum / double(a.gap_count);
            cell.info_ber = double(a.info_bit_errors) /
                            (double(a.frames) * double(code.dimension));
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

void emit_csv(const SweepResult& result, std::ostream& out, bool include_timing) {
    out << "decoder,ebn0_db,frames,bit_errors,frame_errors,ber,fer,ci_low,ci_high,"
           "mean_iters,mean_ms,consensus_rate,mean_gap,info_ber\n";
    for (const auto& c : result.cells) {
        out << c.decoder << ',' << fmt(c.ebn0_db) << ',' << c.frames << ',' << c.bit_errors << ','
            << c.frame_errors << ',' << fmt(c.ber) << ',' << fmt(c.fer) << ',' << fmt(c.ci_low)
            << ',' << fmt(c.ci_high) << ',' << fmt(c.mean_iters) << ','
            << (include_timing ? fmt(c.mean_ms) : std::string("nan")) << ','
            << fmt(c.consensus_rate) << ',' << (c.mean_gap ? fmt(*c.mean_gap) : std::string("nan"))
            << ',' << fmt(c.info_ber) << '\n';
    }
}

void emit_plotdata(const SweepResult& result, std::ostream& out) {
    std::vector<std::string> decoders;
    for (const auto& c : result.cells)
        if (std::find(decoders.begin(), decoders.end(), c.decoder) == decoders.end())
            decoders.push_back(c.decoder);
    bool first = true;
    for (const auto& d : decoders) {
        if (!first) out << "\n\n";
        first = false;
        out << "# series: " << d << " (ebn0_db, ber)\n";
        for (const auto& c : result.cells)
            if (c.decoder == d) out << fmt(c.ebn0_db) << ' ' << fmt(c.ber) << '\n';
    }
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);

    SimConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "code") cfg.code = value;
            else if (key == "alist") cfg.alist = value;
            else if (key == "decoders") cfg.decoders = parse_string_list(value);
            else if (key == "ebn0") cfg.ebn0_db = parse_double_list(value);
            else if (key == "frames") cfg.frames = std::stol(value);
            else if (key == "target-errors") cfg.target_errors = std::stol(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "workers") cfg.workers = std::stoi(value);
            else if (key == "lambda") cfg.lambda = std::stod(value);
            else if (key == "max-iters-coop") cfg.max_iters_coop = std::stoi(value);
            else if (key == "max-iters-spa") cfg.max_iters_spa = std::stoi(value);
            else if (key == "out") cfg.out = value;
            else if (key == "plot") cfg.plot = value;
            else if (key == "timing") cfg.timing = (value == "1" || value == "true");
            else
                throw std::runtime_error("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": bad value for '" + key + "'");
        }
    }
    return cfg;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

std::vector<std::string> parse_string_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace coopdec::sim
