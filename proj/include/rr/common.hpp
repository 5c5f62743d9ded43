#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rr {

/// Symbols are opaque ASCII tokens such as "a1", "abar1" or "#".
using Symbol = std::string;
using Word = std::vector<Symbol>;

/// Malformed user input: unknown symbols, unknown states, unparsable files.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation precondition (non-CNF grammar, alphabet mismatch).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline std::string join_word(const Word& w, std::string_view sep = " ")
{
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += sep;
        out += w[i];
    }
    return out;
}

/// Splits a whitespace-separated token list into a word.
inline Word split_word(std::string_view text)
{
    Word w;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < text.size() && !(text[j] == ' ' || text[j] == '\t' || text[j] == '\n' || text[j] == '\r')) ++j;
        if (j > i) w.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return w;
}

inline Word concat(Word lhs, const Word& rhs)
{
    lhs.insert(lhs.end(), rhs.begin(), rhs.end());
    return lhs;
}

} // namespace rr
