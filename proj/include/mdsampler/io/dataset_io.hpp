#pragma once

#include <string>

#include "mdsampler/dag/dataset.hpp"

namespace md {

// Dataset CSV: header Z1..Zm,I1..Im with an optional trailing `cond` column.
// Z columns hold 1-based integer states, I columns a 0/1 intervention mask.
// Arities come from `<path>.meta.json` when present, otherwise from the
// maximum observed state per column. Errors carry 1-based line numbers.
DiscreteDataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const DiscreteDataset& data);

}  // namespace md
