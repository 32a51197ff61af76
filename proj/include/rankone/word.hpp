#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rankone {

// A letter of the alphabet {0, 1, ..., m-1}.
using Symbol = std::uint32_t;

// A finite word over the alphabet. Words are plain vectors; all indexing
// starts at 0.
using Word = std::vector<Symbol>;

inline Word word_of(std::initializer_list<Symbol> syms) { return Word(syms); }

// Parses "0110" into {0,1,1,0}. Only digit alphabets (size <= 10).
Word parse_word(const std::string& text);

// Renders a word as a digit string when every symbol is < 10, otherwise as
// dot-separated indices ("3.12.0").
std::string format_word(const Word& w);

bool contains_symbol(std::span<const Symbol> w, Symbol s);

// Number of occurrences of `needle` in `hay` when reading left to right,
// counting every start position (occurrences may overlap).
std::size_t subword_count(const Word& needle, std::span<const Symbol> hay);

// True when `needle` occurs in `hay` as a proper subword (occurs and is
// strictly shorter).
bool is_proper_subword(const Word& needle, const Word& hay);

} // namespace rankone
