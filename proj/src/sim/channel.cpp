#include "vardislab/sim/channel.hpp"

#include <stdexcept>

namespace vardislab::sim {

Channel::Channel(LossMatrix loss) : loss_(std::move(loss)) {
    reachable_.reserve(loss_.size());
    for (std::size_t i = 0; i < loss_.size(); ++i) reachable_.push_back(loss_.reachable_from(i));
}

std::vector<Delivery> Channel::broadcast(std::size_t sender, std::size_t frame_bytes, double now,
                                         RandomStream& rng) const {
    if (sender >= loss_.size()) throw std::out_of_range("sender not in deployment");
    const double arrival = now + airtime(frame_bytes);
    std::vector<Delivery> out;
    for (std::size_t j : reachable_[sender]) {
        const double q = loss_(sender, j);
        if (q == 0.0 || !rng.bernoulli(q)) out.push_back({j, arrival});
    }
    return out;
}

}  // namespace vardislab::sim
