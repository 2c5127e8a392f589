#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace entail {

struct TokenizerOptions {
    bool remove_stopwords = false;
    bool stem = false;
};

/// Lowercases and splits on every non-alphanumeric codepoint. Digit-only
/// tokens are kept. Input is decoded as UTF-8; invalid bytes act as
/// separators. Non-ASCII codepoints count as alphanumeric unless they fall
/// in a Unicode punctuation or space block, and Latin-1 capitals are folded.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {});

/// Small English function-word list used by TokenizerOptions::remove_stopwords.
bool is_stopword(std::string_view token);

/// Harman's "S" stemmer: strips English plural suffixes only.
std::string s_stem(std::string token);

}  // namespace entail
