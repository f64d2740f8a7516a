#ifndef SIGDEX_SLP_HPP
#define SIGDEX_SLP_HPP

// Straight-line programs and LZ77 factorizations: types, validation, file IO
// and the greedy LZ77 parser.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace sigdex {

struct SlpRule {
    bool chr = true;
    unsigned char c = 0;
    std::uint32_t l = 0, r = 0;  // 1-based, below the rule's own index

    static SlpRule character(unsigned char c) { return {true, c, 0, 0}; }
    static SlpRule pair(std::uint32_t l, std::uint32_t r) { return {false, 0, l, r}; }
    bool operator==(const SlpRule&) const = default;
};

/// Rules X_1..X_n (stored 0-based); the start symbol is X_n.
struct Slp {
    std::vector<SlpRule> rules;

    std::size_t n() const { return rules.size(); }
    const SlpRule& rule(std::uint32_t i) const { return rules.at(i - 1); }

    /// |val(X_i)| for every i (index 0 unused), saturating at UINT64_MAX.
    std::vector<std::uint64_t> lengths() const {
        std::vector<std::uint64_t> len(n() + 1, 0);
        for (std::uint32_t i = 1; i <= n(); ++i) {
            const SlpRule& x = rule(i);
            if (x.chr) {
                len[i] = 1;
            } else {
                std::uint64_t a = len[x.l], b = len[x.r];
                len[i] = a > UINT64_MAX - b ? UINT64_MAX : a + b;
            }
        }
        return len;
    }

    /// Acyclic by index order, no duplicate rules, every rule reachable.
    void validate() const {
        if (rules.empty()) fail(Errc::invalid_input, "SLP without rules");
        std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
        std::set<unsigned char> chars;
        for (std::uint32_t i = 1; i <= n(); ++i) {
            const SlpRule& x = rule(i);
            if (x.chr) {
                if (!chars.insert(x.c).second) fail(Errc::invalid_input, "redundant character rule " + std::to_string(i));
            } else {
                if (x.l < 1 || x.r < 1 || x.l >= i || x.r >= i)
                    fail(Errc::invalid_input, "rule " + std::to_string(i) + " must refer to lower indices");
                if (!pairs.insert({x.l, x.r}).second) fail(Errc::invalid_input, "redundant rule " + std::to_string(i));
            }
        }
        std::vector<char> used(n() + 1, 0);
        used[n()] = 1;
        for (std::uint32_t i = static_cast<std::uint32_t>(n()); i >= 1; --i)
            if (used[i] && !rule(i).chr) used[rule(i).l] = used[rule(i).r] = 1;
        for (std::uint32_t i = 1; i <= n(); ++i)
            if (!used[i]) fail(Errc::invalid_input, "useless rule " + std::to_string(i));
    }

    /// Reversed program: Y_i -> Y_r Y_l, so val(Y_i) is val(X_i) reversed.
    Slp reversed() const {
        Slp s;
        for (const SlpRule& x : rules) s.rules.push_back(x.chr ? x : SlpRule::pair(x.r, x.l));
        return s;
    }

    /// Full expansion of X_i; only for small programs.
    std::string expand(std::uint32_t i, std::uint64_t limit = std::uint64_t{1} << 26) const {
        if (i < 1 || i > n()) fail(Errc::invalid_input, "variable out of range");
        if (lengths()[i] > limit) fail(Errc::capacity_exhausted, "expansion too long");
        std::string out;
        std::vector<std::uint32_t> st{i};
        while (!st.empty()) {
            std::uint32_t v = st.back();
            st.pop_back();
            const SlpRule& x = rule(v);
            if (x.chr) {
                out += static_cast<char>(x.c);
            } else {
                st.push_back(x.r);
                st.push_back(x.l);
            }
        }
        return out;
    }
};

inline void write_slp(std::ostream& out, const Slp& s) {
    out << "SLP " << s.n() << '\n';
    for (std::uint32_t i = 1; i <= s.n(); ++i) {
        const SlpRule& x = s.rule(i);
        if (x.chr)
            out << i << " C " << static_cast<unsigned>(x.c) << '\n';
        else
            out << i << " P " << x.l << ' ' << x.r << '\n';
    }
}

namespace detail {

inline bool only_space_left(std::istream& is) {
    std::string rest;
    return !(is >> rest);
}

}  // namespace detail

inline Slp read_slp(std::istream& in) {
    std::string line, magic;
    if (!std::getline(in, line)) fail(Errc::format_error, "empty SLP file");
    std::istringstream hs(line);
    std::uint64_t n = 0;
    if (!(hs >> magic >> n) || magic != "SLP" || n == 0 || !detail::only_space_left(hs))
        fail(Errc::format_error, "bad SLP header");
    Slp s;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::uint64_t i = 0, a = 0, b = 0;
        std::string tag;
        auto bad = [&] { fail(Errc::format_error, "bad SLP line " + std::to_string(lineno)); };
        if (!(ls >> i >> tag) || i != s.n() + 1) bad();
        if (tag == "C") {
            if (!(ls >> a) || a > 255) bad();
            s.rules.push_back(SlpRule::character(static_cast<unsigned char>(a)));
        } else if (tag == "P") {
            if (!(ls >> a >> b) || a < 1 || b < 1 || a >= i || b >= i) bad();
            s.rules.push_back(SlpRule::pair(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)));
        } else {
            bad();
        }
        if (!detail::only_space_left(ls)) bad();
    }
    if (s.n() != n) fail(Errc::format_error, "SLP rule count does not match the header");
    try {
        s.validate();
    } catch (const Error& e) {
        fail(Errc::format_error, e.what());
    }
    return s;
}

// ---- LZ77 ----------------------------------------------------------------

struct Lz77Factor {
    bool literal = true;
    unsigned char c = 0;
    std::uint64_t src = 0, len = 1;  // 1-based source start for copies

    static Lz77Factor lit(unsigned char c) { return {true, c, 0, 1}; }
    static Lz77Factor copy(std::uint64_t src, std::uint64_t len) { return {false, 0, src, len}; }
    bool operator==(const Lz77Factor&) const = default;
};
using Lz77Factorization = std::vector<Lz77Factor>;

/// Greedy factorization without self-references; copies point at the
/// leftmost earlier occurrence. Suffix automaton over the parsed prefix.
inline Lz77Factorization lz77_parse(std::string_view t) {
    if (t.empty()) fail(Errc::invalid_input, "lz77_parse of an empty text");
    struct State {
        std::int64_t link = -1;
        std::uint64_t len = 0, firstpos = 0;
        std::vector<std::pair<unsigned char, std::uint32_t>> next;
        std::int64_t go(unsigned char c) const {
            for (auto [k, v] : next)
                if (k == c) return v;
            return -1;
        }
        void set(unsigned char c, std::uint32_t v) {
            for (auto& kv : next)
                if (kv.first == c) {
                    kv.second = v;
                    return;
                }
            next.push_back({c, v});
        }
    };
    std::vector<State> st(1);
    st.reserve(2 * t.size() + 1);
    std::uint32_t last = 0;
    auto extend = [&](unsigned char c, std::uint64_t pos) {
        std::uint32_t cur = static_cast<std::uint32_t>(st.size());
        st.push_back({});
        st[cur].len = st[last].len + 1;
        st[cur].firstpos = pos;
        std::int64_t p = last;
        while (p != -1 && st[p].go(c) == -1) {
            st[p].set(c, cur);
            p = st[p].link;
        }
        if (p == -1) {
            st[cur].link = 0;
        } else {
            std::uint32_t q = static_cast<std::uint32_t>(st[p].go(c));
            if (st[p].len + 1 == st[q].len) {
                st[cur].link = q;
            } else {
                std::uint32_t cl = static_cast<std::uint32_t>(st.size());
                State copy = st[q];
                copy.len = st[p].len + 1;
                st.push_back(std::move(copy));
                while (p != -1 && st[p].go(c) == static_cast<std::int64_t>(q)) {
                    st[p].set(c, cl);
                    p = st[p].link;
                }
                st[q].link = cl;
                st[cur].link = cl;
            }
        }
        last = cur;
    };
    Lz77Factorization out;
    std::uint64_t p = 0;
    while (p < t.size()) {
        std::uint64_t state = 0, l = 0;
        while (p + l < t.size()) {
            std::int64_t nx = st[state].go(static_cast<unsigned char>(t[p + l]));
            if (nx < 0) break;
            state = static_cast<std::uint64_t>(nx);
            ++l;
        }
        if (l == 0) {
            out.push_back(Lz77Factor::lit(static_cast<unsigned char>(t[p])));
            extend(static_cast<unsigned char>(t[p]), p);
            ++p;
        } else {
            out.push_back(Lz77Factor::copy(st[state].firstpos - l + 2, l));
            for (std::uint64_t k = 0; k < l; ++k) extend(static_cast<unsigned char>(t[p + k]), p + k);
            p += l;
        }
    }
    return out;
}

/// Decoded length, validating that every copy lies in the produced prefix.
inline std::uint64_t lz77_length(const Lz77Factorization& z) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const Lz77Factor& f = z[i];
        if (f.literal) {
            ++n;
            continue;
        }
        if (i == 0 || f.len == 0 || f.src < 1 || f.src - 1 + f.len > n)
            fail(Errc::invalid_input, "factor " + std::to_string(i + 1) + " does not copy from the earlier text");
        n += f.len;
    }
    return n;
}

inline void write_lz77(std::ostream& out, const Lz77Factorization& z) {
    out << "LZ77\n";
    for (const Lz77Factor& f : z) {
        if (f.literal)
            out << "L " << static_cast<unsigned>(f.c) << '\n';
        else
            out << "C " << f.src << ' ' << f.len << '\n';
    }
}

inline Lz77Factorization read_lz77(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "LZ77") fail(Errc::format_error, "bad LZ77 header");
    Lz77Factorization z;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        std::uint64_t a = 0, b = 0;
        auto bad = [&] { fail(Errc::format_error, "bad LZ77 line " + std::to_string(lineno)); };
        if (!(ls >> tag)) bad();
        if (tag == "L") {
            if (!(ls >> a) || a > 255) bad();
            z.push_back(Lz77Factor::lit(static_cast<unsigned char>(a)));
        } else if (tag == "C") {
            if (!(ls >> a >> b)) bad();
            z.push_back(Lz77Factor::copy(a, b));
        } else {
            bad();
        }
        if (!detail::only_space_left(ls)) bad();
    }
    if (z.empty()) fail(Errc::format_error, "empty factorization");
    try {
        lz77_length(z);
    } catch (const Error& e) {
        fail(Errc::format_error, e.what());
    }
    return z;
}

}  // namespace sigdex

#endif
