#pragma once

#include <cstddef>
#include <vector>

#include "tddr/numerics/matrix.hpp"
#include "tddr/numerics/rng.hpp"

namespace tddr {

struct Transition {
  Vec state;
  Vec action;
  double reward = 0.0;
  Vec next_state;
  bool done = false;  // true terminal only; horizon truncation is stored as false

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Column-stacked minibatch; row k is the k-th sampled transition.
struct Batch {
  Matrix states;
  Matrix actions;
  Vec rewards;
  Matrix next_states;
  Vec done;  // 1.0 for terminal transitions
  std::size_t size() const { return rewards.size(); }
};

// Fixed-capacity FIFO store with uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Throws std::invalid_argument on non-finite fields or inconsistent sizes.
  void push(Transition t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }
  bool empty() const { return size_ == 0; }

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  // Storage slots drawn uniformly; throws StateError when empty.
  std::vector<std::size_t> sample_indices(std::size_t n, SeededRng& rng) const;
  std::vector<Transition> sample(std::size_t n, SeededRng& rng) const;
  Batch sample_batch(std::size_t n, SeededRng& rng) const;

  const Transition& slot(std::size_t storage_index) const { return storage_[storage_index]; }

 private:
  std::vector<Transition> storage_;
  std::size_t size_ = 0;
  std::size_t write_head_ = 0;
};

Batch make_batch(const std::vector<const Transition*>& rows);

}  // namespace tddr
