#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace ratekit {

// Shared word segmentation: lowercase, punctuation to spaces, split on
// whitespace. Used by the tokenizer and by the synthetic generator so both
// sides agree on what a "word" is.
inline std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        const auto uc = static_cast<unsigned char>(ch);
        if (std::isalnum(uc)) {
            cur.push_back(static_cast<char>(std::tolower(uc)));
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

} // namespace ratekit
