#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace smot {

// Caption tokenization: lower-case, ASCII punctuation removed, split on
// whitespace.
std::vector<std::string> tokenize(std::string_view text);

// Porter (1980) suffix-stripping stemmer for lower-case English words.
std::string porter_stem(std::string_view word);

}  // namespace smot
