#pragma once

#include <vector>

#include "b3c/dataset.hpp"
#include "b3c/errors.hpp"
#include "b3c/rng.hpp"

namespace b3c {

// Bounded FIFO transition store for online training. Once full, each push
// evicts the oldest entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(long capacity) : capacity_(capacity) {
    if (capacity < 1) throw ConfigError("replay buffer capacity must be at least 1");
    ring_.reserve(static_cast<size_t>(capacity));
  }

  void push(Transition t) {
    if (size() < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[static_cast<size_t>(head_)] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  long size() const { return static_cast<long>(ring_.size()); }
  long capacity() const { return capacity_; }

  // i = 0 is the oldest stored transition.
  const Transition& at(long i) const { return ring_[static_cast<size_t>((head_ + i) % size())]; }

  std::vector<const Transition*> sample(int batch_size, Rng& rng) const {
    std::vector<const Transition*> batch(batch_size);
    for (int i = 0; i < batch_size; ++i)
      batch[i] = &ring_[static_cast<size_t>(rng.below(ring_.size()))];
    return batch;
  }

 private:
  std::vector<Transition> ring_;
  long head_ = 0;  // next eviction slot once full
  long capacity_;
};

}  // namespace b3c
