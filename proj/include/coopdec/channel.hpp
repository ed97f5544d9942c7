#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coopdec/codes.hpp"

namespace coopdec {

// sigma for unit-energy BPSK: sigma^2 = 1 / (2 * rate * 10^(ebn0_db/10))
double sigma_from_ebn0(double ebn0_db, double rate);

struct ChannelParams {
    double ebn0_db = 0.0;
    double rate = 1.0;
    double sigma = 1.0;
    std::uint64_t seed = 0;

    static ChannelParams make(double ebn0_db, double rate, std::uint64_t seed);
};

struct ReceivedFrame {
    std::vector<double> y;
    std::vector<double> llr;
    std::optional<CodewordBits> truth;
};

// y_i = (2 x_i - 1) + noise, noise stream derived from (seed, frame_index)
ReceivedFrame transmit(const CodewordBits& x, const ChannelParams& params,
                       std::uint64_t frame_index = 0);

// a_i = 2 y_i / sigma^2 (natural log likelihood ratio of bit 1 vs bit 0)
std::vector<double> llr_from_channel(std::span<const double> y, double sigma);

} // namespace coopdec
