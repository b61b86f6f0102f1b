#include "fgs_tools/adapters.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fgs/conll.hpp"
#include "fgs/error.hpp"

namespace fgs::tools {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool has_polarity_suffix(std::string_view text) {
  return text.find("-targ-") != std::string_view::npos;
}

}  // namespace

std::vector<std::string> adapter_names() { return {"json", "conll-targeted"}; }

bool has_adapter(std::string_view name) {
  const std::vector<std::string> names = adapter_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Corpus corpus_from_targeted_conll(std::string_view text, const std::string& name) {
  const TagScheme scheme = has_polarity_suffix(text)
                               ? TagScheme{Strategy::JointPolarity, TaskMode::Targeted}
                               : TagScheme{Strategy::Target, TaskMode::Targeted};
  Corpus corpus;
  corpus.name = name;
  for (ConllSentence& s : from_conll(text, scheme)) {
    Sentence sentence;
    sentence.sent_id = std::move(s.sent_id);
    sentence.tokens = std::move(s.tokens);
    for (const LabeledSpan& span : decode(s.tags, scheme)) {
      if (span.element != Element::Target) continue;
      Opinion o;
      o.target = {span.span};
      o.polarity = span.polarity.value_or(Polarity::Neutral);
      sentence.opinions.push_back(std::move(o));
    }
    corpus.sentences.push_back(std::move(sentence));
  }
  validate(corpus);
  return corpus;
}

Corpus convert_with(std::string_view adapter, const std::filesystem::path& input) {
  if (adapter == "json") return load_corpus(input);
  if (adapter == "conll-targeted") {
    return corpus_from_targeted_conll(read_text(input), input.stem().string());
  }
  std::string known;
  for (const std::string& n : adapter_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown adapter \"" + std::string(adapter) + "\" (known: " + known + ")");
}

}  // namespace fgs::tools
