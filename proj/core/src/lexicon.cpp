#include "fgs/lexicon.hpp"

#include <fstream>

#include "fgs/error.hpp"

namespace fgs {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

}  // namespace

std::optional<LexiconFormat> lexicon_format_from_string(std::string_view text) {
  if (text == "plain") return LexiconFormat::Plain;
  if (text == "tsv") return LexiconFormat::Tsv;
  return std::nullopt;
}

std::string lowercase_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string normalize_term(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (const char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return lowercase_ascii(out);
}

bool Lexicon::contains(std::string_view token) const {
  return entries.contains(lowercase_ascii(token));
}

Lexicon load_lexicon(std::span<const std::filesystem::path> paths,
                     LexiconFormat format, std::vector<std::string>* warnings) {
  Lexicon lexicon;
  for (const auto& path : paths) {
    if (!lexicon.name.empty()) lexicon.name += '+';
    lexicon.name += path.stem().string();
    std::ifstream in(path);
    if (!in) throw Error("cannot open lexicon " + path.string());
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.starts_with(';')) continue;
      std::string_view term = line;
      std::optional<Polarity> polarity;
      if (format == LexiconFormat::Tsv) {
        if (normalize_term(line).empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
          throw ParseError(path.string() + ": expected \"term<TAB>polarity\"",
                           line_number);
        }
        term = std::string_view(line).substr(0, tab);
        polarity = polarity_from_string(std::string_view(line).substr(tab + 1));
        if (!polarity || *polarity == Polarity::Conflict) {
          throw ParseError(path.string() + ": polarity must be positive, negative or neutral",
                           line_number);
        }
      }
      std::string key = normalize_term(term);
      if (key.empty()) {
        if (format == LexiconFormat::Tsv) {
          throw ParseError(path.string() + ": empty term", line_number);
        }
        continue;
      }
      if (!lexicon.entries.try_emplace(key, polarity).second) {
        if (warnings) {
          warnings->push_back(path.string() + ":" + std::to_string(line_number) +
                              ": duplicate term \"" + key + "\" ignored");
        }
        lexicon.duplicates.push_back(std::move(key));
      }
    }
  }
  if (lexicon.entries.empty()) {
    throw ValidationError("lexicon " + lexicon.name + " has no entries");
  }
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path, LexiconFormat format,
                     std::vector<std::string>* warnings) {
  return load_lexicon(std::span(&path, 1), format, warnings);
}

std::vector<LabeledSpan> mark_expressions(const Sentence& sentence,
                                          const Lexicon& lexicon) {
  std::vector<LabeledSpan> spans;
  for (int i = 0; i < sentence.size(); ++i) {
    if (lexicon.contains(sentence.tokens[i])) {
      spans.push_back({Element::Expression, {i, i + 1}, std::nullopt});
    }
  }
  return spans;
}

}  // namespace fgs
