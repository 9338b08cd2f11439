#include "latentdim/observable_map.hpp"

#include <cstdlib>
#include <limits>
#include <string>

namespace latentdim {

std::uint64_t default_state_cap() {
  constexpr std::uint64_t kCap = std::uint64_t{1} << 24;
  if (const char* env = std::getenv("LATENTDIM_STATE_CAP")) {
    try {
      std::size_t used = 0;
      unsigned long long value = std::stoull(env, &used);
      if (used == std::string(env).size() && value > 0) return value;
    } catch (const std::exception&) {
    }
    throw InputError(std::string("LATENTDIM_STATE_CAP is not a positive integer: '") + env + "'");
  }
  return kCap;
}

std::uint64_t checked_joint_size(const NetworkModel& model, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (const auto& v : model.variables()) {
    const auto states = static_cast<std::uint64_t>(v.states);
    if (states == 0) throw InputError("joint enumeration needs discrete variables");
    if (total > std::numeric_limits<std::uint64_t>::max() / states || total * states > cap) {
      throw StateCapExceeded("joint state space exceeds the cap of " + std::to_string(cap) + " states");
    }
    total *= states;
  }
  return total;
}

}  // namespace latentdim
