#include "entail/text.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

namespace entail {
namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one codepoint starting at text[pos] and advances pos. Malformed
// sequences consume one byte and yield kInvalid.
char32_t next_codepoint(std::string_view text, std::size_t& pos) {
    auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    unsigned char lead = byte(pos);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + len > text.size()) {
        ++pos;
        return kInvalid;
    }
    for (std::size_t i = 1; i < len; ++i) {
        unsigned char cont = byte(pos + i);
        if ((cont & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr std::array<char32_t, 5> min_for_len{0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kInvalid;
    }
    pos += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool in_range(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_alnum(char32_t cp) {
    if (cp == kInvalid) {
        return false;
    }
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    // Punctuation, symbol and space blocks.
    return !(in_range(cp, 0x80, 0xBF) || cp == 0xD7 || cp == 0xF7 || in_range(cp, 0x2000, 0x206F) ||
             in_range(cp, 0x20A0, 0x20CF) || in_range(cp, 0x2190, 0x2BFF) ||
             in_range(cp, 0x3000, 0x303F) || in_range(cp, 0xFE30, 0xFE4F) ||
             in_range(cp, 0xFF00, 0xFF0F) || in_range(cp, 0xFF1A, 0xFF20) ||
             in_range(cp, 0xFF3B, 0xFF40) || in_range(cp, 0xFF5B, 0xFF65) || cp == 0xFEFF);
}

char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') {
        return cp + 0x20;
    }
    if (in_range(cp, 0xC0, 0xDE) && cp != 0xD7) {
        return cp + 0x20;
    }
    if (in_range(cp, 0x391, 0x3A9) && cp != 0x3A2) {
        return cp + 0x20;
    }
    if (in_range(cp, 0x410, 0x42F)) {
        return cp + 0x20;
    }
    if (in_range(cp, 0x400, 0x40F)) {
        return cp + 0x50;
    }
    return cp;
}

constexpr auto kStopwords = std::to_array<std::string_view>({
    "a",    "about", "after", "all",   "also",  "an",    "and",   "any",   "are",   "as",
    "at",   "be",    "been",  "being", "but",   "by",    "can",   "could", "did",   "do",
    "does", "for",   "from",  "had",   "has",   "have",  "he",    "her",   "his",   "if",
    "in",   "into",  "is",    "it",    "its",   "may",   "no",    "not",   "of",    "on",
    "or",   "other", "our",   "she",   "should", "so",   "such",  "than",  "that",  "the",
    "their", "them", "there", "these", "they",  "this",  "to",    "was",   "were",  "which",
    "who",  "will",  "with",  "would"});

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

bool is_stopword(std::string_view token) {
    static const auto sorted = [] {
        auto words = kStopwords;
        std::sort(words.begin(), words.end());
        return words;
    }();
    return std::binary_search(sorted.begin(), sorted.end(), token);
}

std::string s_stem(std::string token) {
    if (token.size() <= 3) {
        return token;
    }
    if (ends_with(token, "ies") && !ends_with(token, "eies") && !ends_with(token, "aies")) {
        token.replace(token.size() - 3, 3, "y");
    } else if (ends_with(token, "es") && !ends_with(token, "aes") && !ends_with(token, "ees") &&
               !ends_with(token, "oes")) {
        token.pop_back();
    } else if (ends_with(token, "s") && !ends_with(token, "us") && !ends_with(token, "ss")) {
        token.pop_back();
    }
    return token;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.empty()) {
            return;
        }
        if (!(options.remove_stopwords && is_stopword(current))) {
            tokens.push_back(options.stem ? s_stem(std::move(current)) : std::move(current));
        }
        current.clear();
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = next_codepoint(text, pos);
        if (is_alnum(cp)) {
            append_utf8(current, to_lower(cp));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

}  // namespace entail
