#include "fgs/augment.hpp"

#include <algorithm>
#include <set>

#include "fgs/error.hpp"

namespace fgs {

namespace {

bool brackets_holders(AugmentMode mode) {
  return mode == AugmentMode::Holders || mode == AugmentMode::Full;
}

bool brackets_expressions(AugmentMode mode) {
  return mode == AugmentMode::Expressions || mode == AugmentMode::Full;
}

std::vector<Span> distinct_spans(std::set<Span> spans, const Sentence& sentence,
                                 std::string_view what) {
  std::vector<Span> out(spans.begin(), spans.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i - 1].overlaps(out[i])) {
      throw ValidationError(
          "sent_id \"" + sentence.sent_id + "\": overlapping " +
          std::string(what) + " spans [" + std::to_string(out[i - 1].start) +
          "," + std::to_string(out[i - 1].end) + ") and [" +
          std::to_string(out[i].start) + "," + std::to_string(out[i].end) + ")");
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(AugmentMode mode) {
  switch (mode) {
    case AugmentMode::Original: return "original";
    case AugmentMode::Holders: return "holders";
    case AugmentMode::Expressions: return "expressions";
    case AugmentMode::Full: return "full";
  }
  return "original";
}

std::optional<AugmentMode> augment_mode_from_string(std::string_view text) {
  if (text == "original") return AugmentMode::Original;
  if (text == "holders") return AugmentMode::Holders;
  if (text == "expressions") return AugmentMode::Expressions;
  if (text == "full") return AugmentMode::Full;
  return std::nullopt;
}

bool is_bracket_token(std::string_view token) {
  return token == kHolderOpen || token == kHolderClose ||
         token == kExpressionOpen || token == kExpressionClose;
}

std::vector<Span> AugmentedSentence::map_spans(const std::vector<Span>& spans) const {
  std::vector<Span> out;
  for (const Span& s : spans) {
    const std::size_t first_piece = out.size();
    for (int t = s.start; t < s.end; ++t) {
      const int a = span_map.at(t);
      if (out.size() > first_piece && out.back().end == a) {
        out.back().end = a + 1;
      } else {
        out.push_back({a, a + 1});
      }
    }
  }
  return out;
}

AugmentedSentence insert_tags(const Sentence& sentence, AugmentMode mode,
                              const ExpressionSource& expression_source) {
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (is_bracket_token(sentence.tokens[i])) {
      throw ValidationError("sent_id \"" + sentence.sent_id + "\": token " +
                            std::to_string(i) + " is a reserved bracket token");
    }
  }

  std::set<Span> holder_set;
  std::set<Span> expression_set;
  if (brackets_holders(mode)) {
    for (const Opinion& o : sentence.opinions) {
      holder_set.insert(o.holder.begin(), o.holder.end());
    }
  }
  if (brackets_expressions(mode)) {
    if (expression_source) {
      for (const LabeledSpan& ls : *expression_source) {
        if (ls.element != Element::Expression) continue;
        if (ls.span.start < 0 || ls.span.start >= ls.span.end ||
            ls.span.end > sentence.size()) {
          throw ValidationError("sent_id \"" + sentence.sent_id +
                                "\": expression source span out of range");
        }
        expression_set.insert(ls.span);
      }
    } else {
      for (const Opinion& o : sentence.opinions) {
        expression_set.insert(o.expression.begin(), o.expression.end());
      }
    }
  }
  const auto holders = distinct_spans(std::move(holder_set), sentence, "holder");
  const auto expressions =
      distinct_spans(std::move(expression_set), sentence, "expression");

  const int n = sentence.size();
  AugmentedSentence out;
  out.tokens.reserve(sentence.tokens.size() + 2 * (holders.size() + expressions.size()));
  out.span_map.reserve(sentence.tokens.size());
  auto emit = [&](std::string_view bracket) {
    out.inserted.push_back({static_cast<int>(out.tokens.size()), std::string(bracket)});
    out.tokens.emplace_back(bracket);
  };
  auto ends_at = [](const std::vector<Span>& spans, int p) {
    return std::any_of(spans.begin(), spans.end(),
                       [p](const Span& s) { return s.end == p; });
  };
  auto starts_at = [](const std::vector<Span>& spans, int p) {
    return std::any_of(spans.begin(), spans.end(),
                       [p](const Span& s) { return s.start == p; });
  };
  for (int p = 0; p <= n; ++p) {
    if (ends_at(holders, p)) emit(kHolderClose);
    if (ends_at(expressions, p)) emit(kExpressionClose);
    if (p == n) break;
    if (starts_at(holders, p)) emit(kHolderOpen);
    if (starts_at(expressions, p)) emit(kExpressionOpen);
    out.span_map.push_back(static_cast<int>(out.tokens.size()));
    out.tokens.push_back(sentence.tokens[p]);
  }
  return out;
}

StrippedSentence strip_tags(const AugmentedSentence& augmented) {
  StrippedSentence out;
  out.original_index.assign(augmented.tokens.size(), -1);
  std::size_t next_insertion = 0;
  for (std::size_t i = 0; i < augmented.tokens.size(); ++i) {
    const std::string& token = augmented.tokens[i];
    if (next_insertion < augmented.inserted.size() &&
        augmented.inserted[next_insertion].position == static_cast<int>(i)) {
      if (augmented.inserted[next_insertion].token != token) {
        throw ValidationError("bracket record at position " + std::to_string(i) +
                              " does not match token \"" + token + "\"");
      }
      ++next_insertion;
      continue;
    }
    if (is_bracket_token(token)) {
      throw ValidationError("bracket token \"" + token + "\" at position " +
                            std::to_string(i) + " has no insertion record");
    }
    out.original_index[i] = static_cast<int>(out.tokens.size());
    out.tokens.push_back(token);
  }
  if (next_insertion != augmented.inserted.size()) {
    throw ValidationError("insertion record beyond the augmented tokens");
  }
  return out;
}

Sentence augment_sentence(const Sentence& sentence, AugmentMode mode,
                          const ExpressionSource& expression_source) {
  const AugmentedSentence augmented = insert_tags(sentence, mode, expression_source);
  Sentence out;
  out.sent_id = sentence.sent_id;
  out.tokens = augmented.tokens;
  out.extra = sentence.extra;
  out.opinions.reserve(sentence.opinions.size());
  for (const Opinion& o : sentence.opinions) {
    Opinion mapped = o;
    mapped.holder = augmented.map_spans(o.holder);
    mapped.target = augmented.map_spans(o.target);
    mapped.expression = augmented.map_spans(o.expression);
    out.opinions.push_back(std::move(mapped));
  }
  return out;
}

}  // namespace fgs
