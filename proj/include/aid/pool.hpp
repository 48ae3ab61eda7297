#ifndef AID_POOL_HPP
#define AID_POOL_HPP

#include <optional>
#include <vector>

#include "aid/model.hpp"

namespace aid::detail {

// A potential tracked with the node that owns it, so reductions can drop it
// when the owner goes missing (slices of instantiated variables stay).
struct PoolEntry {
  VariableIndex owner;
  PartialTable table;
};

std::vector<PoolEntry> initial_pool(const Model& m);

bool instantiated_in(const Model& m, VariableIndex v);

// Slices every pool table at v := s and drops tables owned by nodes the
// reduction removed as missing.
std::vector<PoolEntry> transform_pool(const std::vector<PoolEntry>& pool,
                                      const Model& child, VariableIndex v,
                                      StateIndex s);

// Total probability mass of the pool's probability part: the product summed
// over chance dimensions, decision dimensions sliced (the mass is constant
// in them because every conditional row sums to one). nullopt when every
// completion is undefined.
std::optional<double> chance_mass(const Model& m,
                                  const std::vector<PoolEntry>& pool);

std::vector<char> legal_mask(const Model& m, VariableIndex v);

}  // namespace aid::detail

#endif  // AID_POOL_HPP
