#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgs/corpus.hpp"
#include "fgs/tagscheme.hpp"

namespace fgs::tools {

// Source-format readers producing canonical corpora.
//   json            canonical JSON (identity)
//   conll-targeted  CoNLL with Target or targeted JointPolarity tags; every
//                   targ span becomes a target-only opinion whose polarity
//                   comes from the tag suffix (neutral when absent)
std::vector<std::string> adapter_names();
bool has_adapter(std::string_view name);

Corpus convert_with(std::string_view adapter, const std::filesystem::path& input);

// Target-only opinions from decoded targeted tags.
Corpus corpus_from_targeted_conll(std::string_view text, const std::string& name);

}  // namespace fgs::tools
