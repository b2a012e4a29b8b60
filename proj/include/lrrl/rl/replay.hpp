#pragma once

#include <cstddef>
#include <vector>

#include "lrrl/rl/network.hpp"
#include "lrrl/rng.hpp"

namespace lrrl::rl {

// Fixed-capacity ring of transitions with uniform sampling (with replacement).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition transition);

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t index) const { return storage_.at(index); }

    std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;
    std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> storage_;
};

}  // namespace lrrl::rl
