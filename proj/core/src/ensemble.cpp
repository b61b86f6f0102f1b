#include "fgs/ensemble.hpp"

#include "fgs/error.hpp"

namespace fgs {

TagSequence restrict_to(const TagSequence& tags, Element element) {
  TagSequence out = tags;
  for (Tag& t : out) {
    if (!t.is_outside() && t.element != element) t = Tag::outside();
  }
  return repair(out);
}

TagSequence ensemble_union(std::span<const TagSequence> predictions) {
  if (predictions.empty()) return {};
  const std::size_t n = predictions.front().size();
  for (std::size_t m = 0; m < predictions.size(); ++m) {
    if (predictions[m].size() != n) {
      throw ValidationError("ensemble_union: member " + std::to_string(m) + " has " +
                            std::to_string(predictions[m].size()) + " tags, expected " +
                            std::to_string(n));
    }
    for (const Tag& t : predictions[m]) {
      if (!t.is_outside() && t.element != Element::Expression) {
        throw ValidationError("ensemble_union: member " + std::to_string(m) +
                              " has non-expression tag \"" + t.str() + "\"");
      }
    }
  }
  TagSequence out(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool any_b = false;
    const Tag* first = nullptr;
    for (const TagSequence& member : predictions) {
      const Tag& t = member[i];
      if (t.is_outside()) continue;
      if (!first) first = &t;
      any_b = any_b || t.position == Position::B;
    }
    if (first) out[i] = first->with_position(any_b ? Position::B : Position::I);
  }
  return repair(out);
}

}  // namespace fgs
