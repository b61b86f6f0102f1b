#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fgs/corpus.hpp"
#include "fgs/tagscheme.hpp"

namespace fgs {

struct ConllSentence {
  std::string sent_id;
  std::vector<std::string> tokens;
  TagSequence tags;

  bool operator==(const ConllSentence&) const = default;
};

// "# sent_id = <id>" header, one "token\ttag" line per token, blank line
// after each sentence. LF line endings.
std::string to_conll(const Corpus& corpus, const TagScheme& scheme);
std::string to_conll(const std::vector<ConllSentence>& sentences);

// Inverse of to_conll. Every tag must belong to the scheme inventory; lines
// need exactly one tab. Errors carry the line number.
std::vector<ConllSentence> from_conll(std::string_view text,
                                      const TagScheme& scheme);

}  // namespace fgs
