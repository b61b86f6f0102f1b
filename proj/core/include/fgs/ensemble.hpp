#pragma once

#include <span>

#include "fgs/tagscheme.hpp"

namespace fgs {

// Tags of other elements become O; the result is repaired.
TagSequence restrict_to(const TagSequence& tags, Element element);

// Per-token union of expression predictions: a token is O only when every
// member says O. Otherwise it takes the element/polarity of the first member
// with a non-O tag, positioned B when any member says B and I otherwise,
// and the sequence is repaired. Members must have equal length and only
// expression (or O) tags.
TagSequence ensemble_union(std::span<const TagSequence> predictions);

}  // namespace fgs
