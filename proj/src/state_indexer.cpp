#include "latentdim/state_indexer.hpp"

#include "latentdim/error.hpp"

namespace latentdim {

StateIndexer::StateIndexer(std::vector<int> cardinalities) : cards_(std::move(cardinalities)) {
  strides_.assign(cards_.size(), 1);
  size_ = 1;
  for (std::size_t i = cards_.size(); i-- > 0;) {
    if (cards_[i] < 1) throw InputError("state indexer needs positive cardinalities");
    strides_[i] = size_;
    size_ *= static_cast<std::uint64_t>(cards_[i]);
  }
}

std::uint64_t StateIndexer::index(std::span<const int> config) const {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < cards_.size(); ++i) out += strides_[i] * static_cast<std::uint64_t>(config[i]);
  return out;
}

std::vector<int> StateIndexer::config(std::uint64_t index) const {
  std::vector<int> out(cards_.size());
  decode(index, out);
  return out;
}

void StateIndexer::decode(std::uint64_t index, std::span<int> out) const {
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    out[i] = static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
}

bool next_config(std::span<int> config, std::span<const int> cards) {
  for (std::size_t i = config.size(); i-- > 0;) {
    if (++config[i] < cards[i]) return true;
    config[i] = 0;
  }
  return false;
}

}  // namespace latentdim
