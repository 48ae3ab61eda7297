#ifndef AID_TESTS_MODEL_GEN_HPP
#define AID_TESTS_MODEL_GEN_HPP

#include "aid/model.hpp"
#include "aid/rng.hpp"

namespace aid::testing {

struct GenOptions {
  std::size_t max_variables = 6;  // chance + decision
  std::size_t max_states = 3;
  std::size_t min_splits = 1;
  std::size_t max_splits = 3;
  bool with_restrictive = true;
  // Guarantees at least two unobserved chance variables so that several
  // admissible elimination orders exist.
  bool force_order_slack = false;
};

// A random well-defined AID with a fully defined realization. Variables sit
// on a temporal chain (observed chance variables feed the next decision and
// decisions are linked by no-forgetting arcs), so the conservative
// well-definedness check passes by construction; labels over early split
// variables prune branches.
Model random_model(Rng& rng, const GenOptions& options = {});

}  // namespace aid::testing

#endif  // AID_TESTS_MODEL_GEN_HPP
