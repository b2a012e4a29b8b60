#include "lrrl/rl/replay.hpp"

#include <stdexcept>

namespace lrrl::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    storage_.reserve(capacity);
}

void ReplayBuffer::push(Transition transition) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(transition));
    } else {
        storage_[next_] = std::move(transition);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
    if (storage_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
    std::vector<std::size_t> out(batch_size);
    for (auto& i : out) i = uniform_index(rng, storage_.size());
    return out;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
    std::vector<const Transition*> out;
    out.reserve(batch_size);
    for (auto i : sample_indices(batch_size, rng)) out.push_back(&storage_[i]);
    return out;
}

}  // namespace lrrl::rl
