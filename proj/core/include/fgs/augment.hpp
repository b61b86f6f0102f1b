#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgs/corpus.hpp"
#include "fgs/tagscheme.hpp"

namespace fgs {

// Which annotations get bracketed in the input text.
enum class AugmentMode { Original, Holders, Expressions, Full };

std::string_view to_string(AugmentMode mode);
std::optional<AugmentMode> augment_mode_from_string(std::string_view text);

inline constexpr std::string_view kHolderOpen = "[<H]";
inline constexpr std::string_view kHolderClose = "[H>]";
inline constexpr std::string_view kExpressionOpen = "[<E]";
inline constexpr std::string_view kExpressionClose = "[E>]";

bool is_bracket_token(std::string_view token);

struct Insertion {
  int position = 0;  // index in the augmented token list
  std::string token;

  bool operator==(const Insertion&) const = default;
};

struct AugmentedSentence {
  std::vector<std::string> tokens;
  // Original token index -> augmented token index.
  std::vector<int> span_map;
  // Bracket tokens in ascending position order.
  std::vector<Insertion> inserted;

  // Re-addresses original spans token by token; pieces split by inserted
  // brackets come back as separate spans, so the selected surface tokens are
  // exactly the original ones.
  std::vector<Span> map_spans(const std::vector<Span>& spans) const;
};

// Replacement expression spans (predicted, lexicon, ensemble). When present
// they replace the gold expressions entirely; non-expression entries are
// ignored.
using ExpressionSource = std::optional<std::vector<LabeledSpan>>;

// Brackets each distinct holder span (holders/full) and expression span
// (expressions/full). At a shared boundary closing brackets precede opening
// ones; among closers "[H>]" precedes "[E>]", among openers "[<H]" precedes
// "[<E]". Discontinuous annotations get one pair per contiguous piece.
// Throws when two distinct spans of the same type overlap or when the
// sentence already contains a bracket token.
AugmentedSentence insert_tags(const Sentence& sentence, AugmentMode mode,
                              const ExpressionSource& expression_source = {});

struct StrippedSentence {
  std::vector<std::string> tokens;
  // Augmented token index -> original token index, -1 for brackets.
  std::vector<int> original_index;
};

// Throws when a bracket token has no record in `inserted`.
StrippedSentence strip_tags(const AugmentedSentence& augmented);

// The sentence with augmented tokens and every opinion span re-addressed.
Sentence augment_sentence(const Sentence& sentence, AugmentMode mode,
                          const ExpressionSource& expression_source = {});

}  // namespace fgs
