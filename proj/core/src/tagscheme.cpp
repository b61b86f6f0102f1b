#include "fgs/tagscheme.hpp"

#include <algorithm>

#include "fgs/error.hpp"

namespace fgs {

namespace {

constexpr Element kElementOrder[] = {Element::Holder, Element::Target,
                                     Element::Expression};
constexpr Polarity kTagPolarities[] = {Polarity::Positive, Polarity::Neutral,
                                       Polarity::Negative};
// Claim priority across element types.
constexpr Element kPriority[] = {Element::Target, Element::Expression,
                                 Element::Holder};

const std::vector<Span>& spans_of(const Opinion& opinion, Element element) {
  switch (element) {
    case Element::Holder: return opinion.holder;
    case Element::Target: return opinion.target;
    default: return opinion.expression;
  }
}

std::vector<std::string_view> split_dashes(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dash = text.find('-', start);
    parts.push_back(text.substr(start, dash - start));
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  return parts;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Target: return "Target";
    case Strategy::Joint: return "Joint";
    case Strategy::JointPolarity: return "JointPolarity";
  }
  return "Target";
}

std::string_view to_string(TaskMode mode) {
  return mode == TaskMode::Targeted ? "targeted" : "full";
}

std::optional<Strategy> strategy_from_string(std::string_view text) {
  if (text == "Target") return Strategy::Target;
  if (text == "Joint") return Strategy::Joint;
  if (text == "JointPolarity") return Strategy::JointPolarity;
  return std::nullopt;
}

std::optional<TaskMode> task_mode_from_string(std::string_view text) {
  if (text == "targeted") return TaskMode::Targeted;
  if (text == "full") return TaskMode::Full;
  return std::nullopt;
}

std::string_view to_string(Element element) {
  switch (element) {
    case Element::Holder: return "holder";
    case Element::Target: return "targ";
    case Element::Expression: return "exp";
    case Element::None: return "none";
  }
  return "none";
}

std::optional<Element> element_from_string(std::string_view text) {
  if (text == "holder") return Element::Holder;
  if (text == "targ") return Element::Target;
  if (text == "exp") return Element::Expression;
  return std::nullopt;
}

bool TagScheme::includes(Element element) const {
  if (element == Element::Target) return true;
  if (element == Element::None) return false;
  return strategy != Strategy::Target && mode == TaskMode::Full;
}

std::string TagScheme::name() const {
  return std::string(to_string(strategy)) + "/" + std::string(to_string(mode));
}

std::string Tag::str() const {
  if (position == Position::O) return "O";
  std::string out = position == Position::B ? "B-" : "I-";
  out += to_string(element);
  if (polarity) {
    out += '-';
    out += to_string(*polarity);
  }
  return out;
}

Tag Tag::parse(std::string_view text) {
  if (text == "O") return Tag::outside();
  const auto parts = split_dashes(text);
  auto bad = [&]() {
    return ValidationError("invalid tag \"" + std::string(text) + "\"");
  };
  if (parts.size() < 2 || parts.size() > 3) throw bad();
  Tag tag;
  if (parts[0] == "B") {
    tag.position = Position::B;
  } else if (parts[0] == "I") {
    tag.position = Position::I;
  } else {
    throw bad();
  }
  const auto element = element_from_string(parts[1]);
  if (!element) throw bad();
  tag.element = *element;
  if (parts.size() == 3) {
    const auto polarity = polarity_from_string(parts[2]);
    if (!polarity || *polarity == Polarity::Conflict) throw bad();
    tag.polarity = polarity;
  }
  return tag;
}

std::vector<std::string> to_strings(const TagSequence& tags) {
  std::vector<std::string> out;
  out.reserve(tags.size());
  for (const Tag& t : tags) out.push_back(t.str());
  return out;
}

bool can_start(const Tag& tag) { return tag.position != Position::I; }

bool can_follow(const Tag& previous, const Tag& current) {
  if (current.position != Position::I) return true;
  return !previous.is_outside() && previous.same_chunk(current);
}

bool is_valid_bio(const TagSequence& tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i == 0 ? !can_start(tags[i]) : !can_follow(tags[i - 1], tags[i])) {
      return false;
    }
  }
  return true;
}

std::vector<Tag> label_inventory(const TagScheme& scheme) {
  std::vector<Tag> tags{Tag::outside()};
  for (const Position position : {Position::B, Position::I}) {
    for (const Element element : kElementOrder) {
      if (!scheme.includes(element)) continue;
      if (scheme.polar()) {
        for (const Polarity polarity : kTagPolarities) {
          tags.push_back({position, element, polarity});
        }
      } else {
        tags.push_back({position, element, std::nullopt});
      }
    }
  }
  return tags;
}

bool in_inventory(const Tag& tag, const TagScheme& scheme) {
  if (tag.is_outside()) return tag.element == Element::None && !tag.polarity;
  if (!scheme.includes(tag.element)) return false;
  return scheme.polar() == tag.polarity.has_value();
}

std::vector<LabeledSpan> included_spans(const Sentence& sentence,
                                        const TagScheme& scheme,
                                        OverlapPolicy policy) {
  struct Claim {
    LabeledSpan labeled;
    std::size_t opinion;
  };
  std::vector<Claim> accepted;
  std::vector<int> owner(sentence.tokens.size(), -1);

  for (const Element element : kPriority) {
    if (!scheme.includes(element)) continue;
    for (std::size_t oi = 0; oi < sentence.opinions.size(); ++oi) {
      const Opinion& opinion = sentence.opinions[oi];
      if (scheme.polar() && opinion.polarity == Polarity::Conflict) continue;
      std::optional<Polarity> polarity;
      if (scheme.polar()) polarity = opinion.polarity;
      for (const Span& span : spans_of(opinion, element)) {
        const LabeledSpan candidate{element, span, polarity};
        int clash = -1;
        for (int t = span.start; t < span.end && clash < 0; ++t) {
          if (owner[t] >= 0) clash = t;
        }
        if (clash < 0) {
          for (int t = span.start; t < span.end; ++t) {
            owner[t] = static_cast<int>(accepted.size());
          }
          accepted.push_back({candidate, oi});
          continue;
        }
        const Claim& holder = accepted[owner[clash]];
        if (holder.labeled == candidate) continue;  // same span claimed twice
        if (policy == OverlapPolicy::Strict) {
          throw ValidationError(
              "sent_id \"" + sentence.sent_id + "\": token " +
              std::to_string(clash) + " claimed by opinion " +
              std::to_string(holder.opinion) + " (" +
              std::string(to_string(holder.labeled.element)) + ") and opinion " +
              std::to_string(oi) + " (" + std::string(to_string(element)) + ")");
        }
      }
    }
  }

  std::vector<LabeledSpan> spans;
  spans.reserve(accepted.size());
  for (const Claim& c : accepted) spans.push_back(c.labeled);
  std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
    return a.span.start < b.span.start;
  });
  return spans;
}

TagSequence encode(const Sentence& sentence, const TagScheme& scheme,
                   OverlapPolicy policy) {
  TagSequence tags(sentence.tokens.size());
  for (const LabeledSpan& ls : included_spans(sentence, scheme, policy)) {
    const Tag inside{Position::I, ls.element, ls.polarity};
    tags[ls.span.start] = inside.with_position(Position::B);
    for (int t = ls.span.start + 1; t < ls.span.end; ++t) tags[t] = inside;
  }
  return tags;
}

std::vector<LabeledSpan> decode(const TagSequence& tags, const TagScheme& scheme) {
  std::vector<LabeledSpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag& tag = tags[i];
    if (!in_inventory(tag, scheme)) {
      throw ValidationError("tag \"" + tag.str() + "\" at position " +
                            std::to_string(i) + " is not in the " +
                            scheme.name() + " inventory");
    }
    if (i == 0 ? !can_start(tag) : !can_follow(tags[i - 1], tag)) {
      throw ValidationError("invalid BIO sequence at position " +
                            std::to_string(i) + " (\"" + tag.str() + "\")");
    }
    const int t = static_cast<int>(i);
    if (tag.position == Position::B) {
      spans.push_back({tag.element, {t, t + 1}, tag.polarity});
    } else if (tag.position == Position::I) {
      spans.back().span.end = t + 1;
    }
  }
  return spans;
}

TagSequence repair(const TagSequence& tags) {
  TagSequence out = tags;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].position != Position::I) continue;
    if (i == 0 || !can_follow(out[i - 1], out[i])) out[i].position = Position::B;
  }
  return out;
}

TagSequence repair(const std::vector<std::string>& labels,
                   const TagScheme& scheme) {
  TagSequence tags;
  tags.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Tag tag = Tag::parse(labels[i]);
    if (!in_inventory(tag, scheme)) {
      throw ValidationError("label \"" + labels[i] + "\" at position " +
                            std::to_string(i) + " is not in the " +
                            scheme.name() + " inventory");
    }
    tags.push_back(tag);
  }
  return repair(tags);
}

}  // namespace fgs
