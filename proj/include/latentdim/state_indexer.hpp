#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace latentdim {

/// Mixed-radix bijection between flat indices and joint configurations.
/// The first variable is most significant; the last varies fastest.
class StateIndexer {
 public:
  StateIndexer() = default;
  explicit StateIndexer(std::vector<int> cardinalities);

  std::uint64_t size() const { return size_; }
  std::size_t arity() const { return cards_.size(); }
  const std::vector<int>& cardinalities() const { return cards_; }

  std::uint64_t index(std::span<const int> config) const;
  std::vector<int> config(std::uint64_t index) const;
  void decode(std::uint64_t index, std::span<int> out) const;

 private:
  std::vector<int> cards_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t size_ = 1;
};

/// Advances an odometer over `cards` (last digit fastest). Returns false on wrap.
bool next_config(std::span<int> config, std::span<const int> cards);

}  // namespace latentdim
