#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "latentdim/network.hpp"

namespace latentdim::models {

/// Hidden root H with `classes` states over `features` observed children of `states` states each.
NetworkModel naive_bayes(int features, int classes = 2, int states = 2, Family family = Family::Discrete);

/// A -> C <- H -> D <- B with H hidden.
NetworkModel w_structure(int hidden_states = 2);

NetworkModel gaussian_naive_bayes(int features = 4);
NetworkModel gaussian_w_structure();

/// Two hidden roots, each a parent of all four observed leaves.
NetworkModel sigmoid_two_level();

/// sigmoid_two_level plus a hidden top node parenting both middle nodes.
NetworkModel sigmoid_three_level();

/// Names accepted by builtin(): naive-bayes-N, w-structure-K, autoclass,
/// gaussian-naive-bayes, gaussian-w, sigmoid-two-level, sigmoid-three-level.
std::vector<std::string> builtin_names();

/// Embedded model spec for a named built-in model. Throws InputError on an unknown name.
std::string builtin_spec(std::string_view name);
NetworkModel builtin(std::string_view name);

}  // namespace latentdim::models
