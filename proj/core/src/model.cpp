#include "reloc/model.hpp"

#include "reloc/errors.hpp"

namespace reloc {

void ModelSpec::validate() const {
  if (markov.time_mode() == TimeMode::Discrete && !runs.is_integer_valued()) {
    throw ConfigError("A3", "a discrete-time " + to_string(markov.family()) +
                                " needs integer-valued run lengths (Deterministic with an "
                                "integer c), got " + to_string(runs.family()));
  }
}

}  // namespace reloc
