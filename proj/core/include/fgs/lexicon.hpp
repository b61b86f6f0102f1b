#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fgs/corpus.hpp"
#include "fgs/tagscheme.hpp"

namespace fgs {

enum class LexiconFormat { Plain, Tsv };

std::optional<LexiconFormat> lexicon_format_from_string(std::string_view text);

// Sentiment word list. Terms are stored lowercased (ASCII) with internal
// whitespace collapsed to single spaces.
struct Lexicon {
  std::string name;
  std::unordered_map<std::string, std::optional<Polarity>> entries;
  // Repeated terms seen at load time (first occurrence kept).
  std::vector<std::string> duplicates;

  std::size_t size() const { return entries.size(); }
  bool contains(std::string_view token) const;
};

std::string lowercase_ascii(std::string_view text);
// Trim and collapse whitespace runs; lowercase.
std::string normalize_term(std::string_view text);

// plain: one term per line; tsv: "term<TAB>positive|negative|neutral".
// Blank lines and lines starting with ';' are skipped. Several files may be
// merged into one lexicon (e.g. separate positive and negative word lists).
// Throws when no entry is read or a tsv line is malformed. Duplicates are
// recorded and reported through `warnings` when given.
Lexicon load_lexicon(std::span<const std::filesystem::path> paths,
                     LexiconFormat format,
                     std::vector<std::string>* warnings = nullptr);
Lexicon load_lexicon(const std::filesystem::path& path, LexiconFormat format,
                     std::vector<std::string>* warnings = nullptr);

// Every token whose lowercased form is a lexicon term becomes its own
// length-1 expression span, left to right.
std::vector<LabeledSpan> mark_expressions(const Sentence& sentence,
                                          const Lexicon& lexicon);

}  // namespace fgs
