#include "fgs/conll.hpp"

#include <algorithm>

#include "fgs/error.hpp"

namespace fgs {

namespace {

constexpr std::string_view kSentIdPrefix = "# sent_id = ";

}  // namespace

std::string to_conll(const std::vector<ConllSentence>& sentences) {
  std::string out;
  for (const ConllSentence& s : sentences) {
    out += kSentIdPrefix;
    out += s.sent_id;
    out += '\n';
    if (s.tags.size() != s.tokens.size()) {
      throw ValidationError("sent_id \"" + s.sent_id + "\": " +
                            std::to_string(s.tokens.size()) + " tokens but " +
                            std::to_string(s.tags.size()) + " tags");
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (s.tokens[i].find_first_of("\t\n") != std::string::npos) {
        throw ValidationError("sent_id \"" + s.sent_id + "\": token " +
                              std::to_string(i) +
                              " contains a tab or newline");
      }
      out += s.tokens[i];
      out += '\t';
      out += s.tags[i].str();
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string to_conll(const Corpus& corpus, const TagScheme& scheme) {
  std::vector<ConllSentence> sentences;
  sentences.reserve(corpus.sentences.size());
  for (const Sentence& s : corpus.sentences) {
    sentences.push_back({s.sent_id, s.tokens, encode(s, scheme)});
  }
  return to_conll(sentences);
}

std::vector<ConllSentence> from_conll(std::string_view text,
                                      const TagScheme& scheme) {
  std::vector<ConllSentence> sentences;
  bool open = false;
  int line_number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;

    if (line.empty()) {
      open = false;
      continue;
    }
    if (line.starts_with(kSentIdPrefix)) {
      sentences.push_back({std::string(line.substr(kSentIdPrefix.size())), {}, {}});
      open = true;
      continue;
    }
    if (line.starts_with("#") && line.find('\t') == std::string_view::npos) {
      continue;
    }
    if (!open) {
      // A token block without a header gets a positional id.
      sentences.push_back({std::to_string(sentences.size()), {}, {}});
      open = true;
    }
    if (std::count(line.begin(), line.end(), '\t') != 1) {
      throw ParseError("expected \"token<TAB>tag\"", line_number);
    }
    const std::size_t tab = line.find('\t');
    Tag tag;
    try {
      tag = Tag::parse(line.substr(tab + 1));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_number);
    }
    if (!in_inventory(tag, scheme)) {
      throw ParseError("tag \"" + tag.str() + "\" is not in the " +
                           scheme.name() + " inventory",
                       line_number);
    }
    sentences.back().tokens.emplace_back(line.substr(0, tab));
    sentences.back().tags.push_back(tag);
  }
  return sentences;
}

}  // namespace fgs
