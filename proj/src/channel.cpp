#include "coopdec/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "coopdec/rng.hpp"

namespace coopdec {

double sigma_from_ebn0(double ebn0_db, double rate) {
    if (!(rate > 0.0))
        throw std::invalid_argument("sigma_from_ebn0: rate must be positive");
    return std::sqrt(1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0)));
}

ChannelParams ChannelParams::make(double ebn0_db, double rate, std::uint64_t seed) {
    if (!(rate > 0.0) || rate > 1.0)
        throw std::invalid_argument("ChannelParams: rate must be in (0,1]");
    ChannelParams p;
    p.ebn0_db = ebn0_db;
    p.rate = rate;
    p.sigma = sigma_from_ebn0(ebn0_db, rate);
    p.seed = seed;
    return p;
}

ReceivedFrame transmit(const CodewordBits& x, const ChannelParams& params,
                       std::uint64_t frame_index) {
    Rng rng(substream_seed(params.seed, frame_index));
    ReceivedFrame f;
    f.y.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        f.y[i] = (2.0 * x[i] - 1.0) + params.sigma * rng.gaussian();
    f.llr = llr_from_channel(f.y, params.sigma);
    f.truth = x;
    return f;
}

std::vector<double> llr_from_channel(std::span<const double> y, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("llr_from_channel: sigma must be positive");
    const double scale = 2.0 / (sigma * sigma);
    std::vector<double> a(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) a[i] = scale * y[i];
    return a;
}

} // namespace coopdec
