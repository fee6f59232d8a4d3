#include "tddr/replay_buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace tddr {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (!all_finite(t.state) || !all_finite(t.action) || !std::isfinite(t.reward) || !all_finite(t.next_state))
    throw std::invalid_argument("ReplayBuffer::push: transition has non-finite fields");
  if (t.state.size() != t.next_state.size())
    throw std::invalid_argument("ReplayBuffer::push: state and next_state sizes differ");
  if (size_ > 0) {
    const Transition& ref = storage_[(write_head_ + capacity() - 1) % capacity()];
    if (ref.state.size() != t.state.size() || ref.action.size() != t.action.size())
      throw std::invalid_argument("ReplayBuffer::push: transition shape differs from stored ones");
  }
  storage_[write_head_] = std::move(t);
  write_head_ = (write_head_ + 1) % capacity();
  if (size_ < capacity()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
  const std::size_t oldest = size_ < capacity() ? 0 : write_head_;
  return storage_[(oldest + i) % capacity()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, SeededRng& rng) const {
  if (empty()) throw StateError("ReplayBuffer::sample: buffer is empty");
  if (n == 0) throw std::invalid_argument("ReplayBuffer::sample: batch size must be positive");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(size_);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, SeededRng& rng) const {
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) out.push_back(storage_[i]);
  return out;
}

Batch ReplayBuffer::sample_batch(std::size_t n, SeededRng& rng) const {
  std::vector<const Transition*> rows;
  rows.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) rows.push_back(&storage_[i]);
  return make_batch(rows);
}

Batch make_batch(const std::vector<const Transition*>& rows) {
  if (rows.empty()) throw std::invalid_argument("make_batch: no rows");
  const std::size_t n = rows.size();
  const std::size_t sd = rows[0]->state.size(), ad = rows[0]->action.size();
  Batch b{Matrix(n, sd), Matrix(n, ad), Vec(n), Matrix(n, sd), Vec(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const Transition& t = *rows[k];
    std::copy(t.state.begin(), t.state.end(), b.states.row(k).begin());
    std::copy(t.action.begin(), t.action.end(), b.actions.row(k).begin());
    std::copy(t.next_state.begin(), t.next_state.end(), b.next_states.row(k).begin());
    b.rewards[k] = t.reward;
    b.done[k] = t.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace tddr
