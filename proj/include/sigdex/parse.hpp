#ifndef SIGDEX_PARSE_HPP
#define SIGDEX_PARSE_HPP

// Locally consistent block parsing: boundary bits via iterated alphabet
// reduction, block decomposition and run-length grouping.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"

namespace sigdex {

using Symbol = std::uint64_t;

struct Run {
    Symbol sym = 0;
    std::uint64_t exp = 0;
    bool operator==(const Run&) const = default;
};
using PowerSeq = std::vector<Run>;

/// Iterated logarithm: how many times log2 is applied before the value is <= 1.
inline int log_star(std::uint64_t w) {
    double x = static_cast<double>(w);
    int k = 0;
    while (x > 1.0) {
        x = std::log2(x);
        ++k;
    }
    return k;
}

struct ParseParams {
    std::uint64_t W = 0;
    int log_star_w = 0;
    int rounds = 0;  // alphabet reduction passes
    int delta_l = 0;
    int delta_r = 0;

    static ParseParams for_universe(std::uint64_t W) {
        if (W < 2) fail(Errc::invalid_input, "universe bound must be at least 2");
        ParseParams p;
        p.W = W;
        p.log_star_w = log_star(W);
        p.rounds = p.log_star_w + 2;
        // The reduction must bring every value down to at most 5.
        auto enough = [W](int r) {
            std::uint64_t b = W;
            for (int i = 0; i < r; ++i) b = 2 * (std::bit_width(b) - 1) + 1;
            return b <= 5;
        };
        while (!enough(p.rounds)) ++p.rounds;
        // Colours at i depend on p[i-rounds..i]; three recolour passes, the
        // maxima test and the gap-four rule add 3 + 1 + 2 on both sides.
        p.delta_l = p.rounds + 6;
        p.delta_r = 6;
        return p;
    }

    /// Length of the border windows used for L/R extraction.
    std::size_t window() const { return static_cast<std::size_t>(delta_l + delta_r + 4); }
    /// Run-count threshold below which a common sequence stops growing.
    std::size_t core_limit() const { return static_cast<std::size_t>(delta_l + delta_r + 9); }
};

namespace detail {

// d from a proper colouring over {0,1,2}. Separate so the block-length
// rule can be checked exhaustively on its own.
inline void bits_from_colors(std::span<const std::uint8_t> c, std::vector<std::uint8_t>& d) {
    const std::size_t n = c.size();
    d.assign(n, 0);
    std::vector<std::uint8_t> m(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        m[i] = (i == 0 || c[i] > c[i - 1]) && (i + 1 == n || c[i] > c[i + 1]);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = m[i];
        // maxima four apart (pattern 2,1,0,1,2): split in the middle
        if (!m[i] && i >= 2 && i + 2 < n && m[i - 2] && m[i + 2]) d[i] = 1;
    }
    d[0] = 1;
    if (n > 1) d[1] = 0;
    if (n > 1) d[n - 1] = 0;
    if (n == 5 && !d[2] && !d[3]) d[2] = 1;
}

inline void reduce_colors(std::span<const Symbol> p, int rounds, std::vector<std::uint8_t>& out) {
    const std::size_t n = p.size();
    thread_local std::vector<Symbol> c, nc;
    c.assign(p.begin(), p.end());
    nc.resize(n);
    for (int r = 0; r < rounds; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            Symbol prev = i ? c[i - 1] : (c[0] == 0 ? 1 : 0);
            Symbol diff = c[i] ^ prev;
            int l = std::countr_zero(diff);
            nc[i] = 2 * static_cast<Symbol>(l) + ((c[i] >> l) & 1);
        }
        c.swap(nc);
    }
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        check(c[i] <= 5, "alphabet reduction did not reach six colours");
        out[i] = static_cast<std::uint8_t>(c[i]);
    }
    for (std::uint8_t x : {5, 4, 3}) {
        for (std::size_t i = 0; i < n; ++i) {
            if (out[i] != x) continue;
            std::uint8_t y = 0;
            while ((i > 0 && out[i - 1] == y) || (i + 1 < n && out[i + 1] == y)) ++y;
            out[i] = y;
        }
    }
}

inline void validate(std::span<const Symbol> p, const ParseParams& params) {
    if (p.size() < 2) fail(Errc::invalid_input, "boundary_bits needs at least two symbols");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 1 || p[i] > params.W) fail(Errc::invalid_input, "symbol outside [1..W]");
        if (i && p[i] == p[i - 1]) fail(Errc::invalid_input, "adjacent symbols are equal");
    }
}

}  // namespace detail

/// Boundary bits d for p. d[i] depends only on p[i-delta_l .. i+delta_r]
/// with out-of-range entries read as 0.
inline std::vector<std::uint8_t> boundary_bits(std::span<const Symbol> p, const ParseParams& params) {
    detail::validate(p, params);
    thread_local std::vector<std::uint8_t> colors;
    std::vector<std::uint8_t> d;
    detail::reduce_colors(p, params.rounds, colors);
    detail::bits_from_colors(colors, d);
    return d;
}

/// Start offsets of the blocks described by d.
inline std::vector<std::size_t> block_starts(std::span<const std::uint8_t> d) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i]) s.push_back(i);
    return s;
}

inline std::vector<std::vector<Symbol>> eblock(std::span<const Symbol> p, std::span<const std::uint8_t> d) {
    if (p.size() != d.size()) fail(Errc::invalid_input, "eblock: length mismatch");
    if (p.empty() || !d[0]) fail(Errc::invalid_input, "eblock: first bit must be set");
    std::vector<std::vector<Symbol>> blocks;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (d[i]) blocks.emplace_back();
        blocks.back().push_back(p[i]);
    }
    for (auto& b : blocks)
        if (b.size() < 2 || b.size() > 4) fail(Errc::invalid_input, "eblock: block length outside [2..4]");
    return blocks;
}

template <class Seq>
PowerSeq epow(const Seq& s) {
    if (s.empty()) fail(Errc::invalid_input, "epow of an empty sequence");
    PowerSeq runs;
    for (const auto& x : s) {
        if (!runs.empty() && runs.back().sym == static_cast<Symbol>(x))
            ++runs.back().exp;
        else
            runs.push_back({static_cast<Symbol>(x), 1});
    }
    return runs;
}

/// Appends r to runs, merging with the last run when the symbols agree.
inline void push_run(PowerSeq& runs, Run r) {
    if (!runs.empty() && runs.back().sym == r.sym)
        runs.back().exp += r.exp;
    else
        runs.push_back(r);
}

}  // namespace sigdex

#endif
