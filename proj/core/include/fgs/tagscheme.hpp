#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgs/corpus.hpp"

namespace fgs {

// Which elements an extraction model predicts, and whether tags carry
// polarity.
enum class Strategy { Target, Joint, JointPolarity };
// targeted: only targets are in scope; full: holders, targets, expressions.
enum class TaskMode { Targeted, Full };

std::string_view to_string(Strategy strategy);
std::string_view to_string(TaskMode mode);
std::optional<Strategy> strategy_from_string(std::string_view text);
std::optional<TaskMode> task_mode_from_string(std::string_view text);

enum class Position { O, B, I };
enum class Element { None, Holder, Target, Expression };

std::string_view to_string(Element element);
std::optional<Element> element_from_string(std::string_view text);

struct TagScheme {
  Strategy strategy = Strategy::Target;
  TaskMode mode = TaskMode::Targeted;

  bool includes(Element element) const;
  bool polar() const { return strategy == Strategy::JointPolarity; }
  std::string name() const;

  bool operator==(const TagScheme&) const = default;
};

// Surface forms: "O", "B-targ", "I-exp-negative", "B-holder-positive".
struct Tag {
  Position position = Position::O;
  Element element = Element::None;
  // Only positive, neutral or negative; set only under polar schemes.
  std::optional<Polarity> polarity;

  static Tag outside() { return {}; }
  bool is_outside() const { return position == Position::O; }
  // Same element and polarity; the position is ignored.
  bool same_chunk(const Tag& other) const {
    return element == other.element && polarity == other.polarity;
  }
  Tag with_position(Position p) const {
    Tag t = *this;
    t.position = p;
    return t;
  }

  std::string str() const;
  // Throws ValidationError on strings outside the tag grammar.
  static Tag parse(std::string_view text);

  bool operator==(const Tag&) const = default;
};

using TagSequence = std::vector<Tag>;

std::vector<std::string> to_strings(const TagSequence& tags);

// An I tag may only follow B or I of the same element and polarity.
bool is_valid_bio(const TagSequence& tags);
bool can_follow(const Tag& previous, const Tag& current);
bool can_start(const Tag& tag);

// O first, then all B tags, then all I tags; within a position elements are
// ordered holder, targ, exp and polarities positive, neutral, negative.
std::vector<Tag> label_inventory(const TagScheme& scheme);
bool in_inventory(const Tag& tag, const TagScheme& scheme);

struct LabeledSpan {
  Element element = Element::None;
  Span span;
  std::optional<Polarity> polarity;

  auto operator<=>(const LabeledSpan&) const = default;
};

enum class OverlapPolicy {
  // Earlier opinions win within an element type; across types the priority
  // is targ > exp > holder. A span that loses any token is dropped whole.
  Resolve,
  // Any competing claim is an error naming the token and both opinions.
  Strict,
};

// Spans the encoder consumes for this scheme after overlap resolution,
// sorted by (start, element).
std::vector<LabeledSpan> included_spans(
    const Sentence& sentence, const TagScheme& scheme,
    OverlapPolicy policy = OverlapPolicy::Resolve);

TagSequence encode(const Sentence& sentence, const TagScheme& scheme,
                   OverlapPolicy policy = OverlapPolicy::Resolve);

// Maximal B I* runs to spans, in order. Throws on invalid BIO or tags
// outside the scheme.
std::vector<LabeledSpan> decode(const TagSequence& tags,
                                const TagScheme& scheme);

// I tags that cannot continue the previous tag become B; everything else is
// untouched. Idempotent; output is always valid BIO.
TagSequence repair(const TagSequence& tags);
// Parses and checks every label against the scheme inventory before repairing.
TagSequence repair(const std::vector<std::string>& labels,
                   const TagScheme& scheme);

}  // namespace fgs
