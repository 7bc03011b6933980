#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace clh {

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string join(const std::vector<std::string>& toks, std::string_view sep = " ") {
    std::string out;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) out += sep;
        out += toks[i];
    }
    return out;
}

inline std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline bool is_terminal_punct(char c) {
    switch (c) {
        case '.': case ',': case '!': case '?': case ';': case ':':
        case '"': case '\'': case ')': case ']':
            return true;
        default:
            return false;
    }
}

// Strips terminal punctuation characters from the end of a token.
inline std::string strip_terminal_punct(std::string_view tok) {
    size_t b = tok.size();
    while (b > 0 && is_terminal_punct(tok[b - 1])) --b;
    return std::string(tok.substr(0, b));
}

// Case- and whitespace-normalized form: lowercased, runs of whitespace
// collapsed to single spaces, leading/trailing whitespace removed.
inline std::string normalize_for_match(std::string_view s) {
    return lower(join(split_ws(s)));
}

} // namespace clh
