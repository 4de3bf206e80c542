#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hexq/board.hpp"
#include "hexq/error.hpp"

namespace hexq {

/// One transition of self-play. Both boards are White-to-move: `next_state`
/// is the position after `action`, seen from the opponent's seat.
struct Experience {
  Board state;
  Cell action;
  int reward = 0;  // 1 when the action ended the game, else 0
  Board next_state;
  bool terminal = false;
};

/// Fixed-capacity FIFO memory of the most recent records.
template <typename Record>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1u << 16));
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return storage_.size(); }
  bool empty() const noexcept { return storage_.empty(); }
  std::uint64_t insertions() const noexcept { return insertions_; }

  void add(Record record) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(record));
    } else {
      storage_[next_] = std::move(record);
    }
    next_ = (next_ + 1) % capacity_;
    ++insertions_;
  }

  /// i-th record by age, 0 being the oldest still stored.
  const Record& at(std::size_t i) const {
    if (i >= storage_.size()) throw UsageError("replay index out of range");
    const std::size_t start = storage_.size() < capacity_ ? 0 : next_;
    return storage_[(start + i) % capacity_];
  }

  /// `n` records drawn uniformly with replacement, or nullopt while the
  /// memory holds fewer than `n` records.
  template <typename Rng>
  std::optional<std::vector<Record>> sample_batch(std::size_t n, Rng& rng) const {
    if (n == 0 || storage_.size() < n) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
    std::vector<Record> batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) batch.push_back(storage_[pick(rng)]);
    return batch;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::uint64_t insertions_ = 0;
  std::vector<Record> storage_;
};

}  // namespace hexq
