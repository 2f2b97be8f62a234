#pragma once

#include <optional>

#include "mdsampler/dag/dag.hpp"
#include "mdsampler/dag/score.hpp"

namespace md {

// One steepest-neighbor-ascent step: the best strictly improving move in the
// canonical neighbor order, or nothing when g is a local mode. The current
// graph precedes its neighbors, so ties keep g; among neighbors the first
// maximum wins.
std::optional<DagMove> sna_step(const Dag& g, const ScoreCache& score);

// Iterates sna_step to the local mode. Shared verbatim between the sampler
// and the enumeration oracle so both induce the same basin partition.
Dag sna_mode(const Dag& g, const ScoreCache& score);

}  // namespace md
