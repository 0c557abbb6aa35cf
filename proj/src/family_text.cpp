#include <cctype>

#include "ergolab/family.hpp"

namespace ergolab::reduction {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// split on `sep` at bracket depth 0
std::vector<std::string_view> split_top(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') {
            if (--depth < 0) throw ParseError("parse_family", "unbalanced '" + std::string(1, c) + "' at column " + std::to_string(i + 1));
        }
        if (c == sep && depth == 0) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    if (depth != 0) throw ParseError("parse_family", "unbalanced brackets");
    out.push_back(s.substr(start));
    return out;
}

Tuple parse_tuple(std::string_view s) {
    s = trim(s);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw ParseError("parse_family", "expected a parenthesised tuple, got '" + std::string(s) + "'");
    Tuple t;
    for (auto part : split_top(s.substr(1, s.size() - 2), ',')) {
        part = trim(part);
        if (part.empty()) throw ParseError("parse_family", "empty tuple coordinate");
        t.push_back(HardyExpr::parse(part));
    }
    return t;
}

// Row i gets the first unshifted h-free nonzero entry as base when every entry is a shift combination of it.
std::vector<HardyExpr> infer_bases(const TupleFamily& f) {
    std::vector<HardyExpr> bases;
    for (std::size_t i = 0; i < f.ell; ++i) {
        const HardyExpr* cand = nullptr;
        for (auto& t : f.tuples)
            if (!t[i].is_zero() && !t[i].has_shifted_atoms() && t[i].symbols().empty()) {
                cand = &t[i];
                break;
            }
        if (!cand) return {};
        for (auto& t : f.tuples)
            if (!hardy::in_shift_family(t[i], *cand)) return {};
        bases.push_back(*cand);
    }
    return bases;
}

}  // namespace

TupleFamily parse_family(std::string_view text) {
    // drop comment lines
    std::string clean;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = trim(text.substr(pos, nl - pos));
        if (!line.empty() && line.front() != '#') {
            clean += line;
            clean += ' ';
        }
        pos = nl + 1;
    }
    std::string_view s = trim(clean);
    std::string_view bases_part;
    if (auto b = s.find("bases:"); b != std::string_view::npos) {
        bases_part = trim(s.substr(b + 6));
        s = trim(s.substr(0, b));
    }
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ParseError("parse_family", "a family is written [(a, b); (c, d)]");
    TupleFamily f;
    auto body = trim(s.substr(1, s.size() - 2));
    if (!body.empty())
        for (auto part : split_top(body, ';')) f.tuples.push_back(parse_tuple(part));
    if (f.tuples.empty()) throw ParseError("parse_family", "family has no tuples");
    f.ell = f.tuples[0].size();
    if (!bases_part.empty()) {
        f.bases = parse_tuple(bases_part);
    } else {
        f.validate();
        f.bases = infer_bases(f);
    }
    std::uint32_t top = 0;
    for (auto& t : f.tuples)
        for (auto& x : t)
            for (auto v : x.symbols()) top = std::max(top, v);
    f.next_symbol = top + 1;
    f.validate();
    return f;
}

}  // namespace ergolab::reduction
