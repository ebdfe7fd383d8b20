#pragma once

#include <string>
#include <vector>

#include "stormlet/model.hpp"
#include "stormlet/property.hpp"

namespace stormlet {

struct Partition {
  std::vector<std::size_t> block;  // block id per state
  std::size_t count = 0;
};

/// Groups states by the relevant labels they carry and their state reward
/// values (plus the Markovian flag of Markov automata).
template <typename N>
Partition initial_partition(const Model<N>& model, const std::vector<std::string>& labels,
                            const std::vector<std::string>& rewards);

/// Coarsest strong bisimulation finer than `initial`, by signature
/// refinement. The signature of a state is its block together with, per
/// row, the action label, the action rewards and the summed probability (or
/// rate) into every block; nondeterministic states use the set of row
/// signatures. Block ids are numbered by first occurrence in state order.
template <typename N>
Partition refine(const Model<N>& model, Partition initial);

/// One state per block, built from the first member of the block. Labels
/// constant on every block and the listed reward structures are kept.
template <typename N>
Model<N> quotient(const Model<N>& model, const Partition& partition, const std::vector<std::string>& rewards);

template <typename N>
struct Minimized {
  Model<N> model;
  Property property;
  Partition partition;
};

/// Quotient tailored to one property: its state formulas become the
/// labels "__left" and "__right" of the original model, only the reward
/// structure it uses is kept, and the returned property refers to those.
template <typename N>
Minimized<N> minimize_for(const Model<N>& model, const Property& property);

}  // namespace stormlet
