#include "rankone/word.hpp"

#include <algorithm>

#include "rankone/errors.hpp"

namespace rankone {

Word parse_word(const std::string& text) {
    Word w;
    w.reserve(text.size());
    for (char c : text) {
        if (c < '0' || c > '9')
            throw ConfigError("word literal must consist of digits 0-9, got '" +
                              std::string(1, c) + "'");
        w.push_back(static_cast<Symbol>(c - '0'));
    }
    return w;
}

std::string format_word(const Word& w) {
    bool digits = std::all_of(w.begin(), w.end(), [](Symbol s) { return s < 10; });
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (digits) {
            out.push_back(static_cast<char>('0' + w[i]));
        } else {
            if (i) out.push_back('.');
            out += std::to_string(w[i]);
        }
    }
    return out;
}

bool contains_symbol(std::span<const Symbol> w, Symbol s) {
    return std::find(w.begin(), w.end(), s) != w.end();
}

std::size_t subword_count(const Word& needle, std::span<const Symbol> hay) {
    if (needle.empty() || needle.size() > hay.size()) return 0;
    std::size_t count = 0;
    for (std::size_t j = 0; j + needle.size() <= hay.size(); ++j) {
        if (std::equal(needle.begin(), needle.end(), hay.begin() + j)) ++count;
    }
    return count;
}

bool is_proper_subword(const Word& needle, const Word& hay) {
    return needle.size() < hay.size() && subword_count(needle, hay) > 0;
}

} // namespace rankone
