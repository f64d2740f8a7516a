#ifndef SIGDEX_LCE_HPP
#define SIGDEX_LCE_HPP

// Common sequences Uniq(P) and longest-common-extension queries.

#include <algorithm>
#include <string_view>
#include <vector>

#include "dag.hpp"
#include "parse.hpp"
#include "walk.hpp"

namespace sigdex {

/// One level of a common sequence: the first/last run of XShrink_t and the
/// border pieces L_{t+1}, R_{t+1} cut from XPow_t.
struct UniqLevel {
    Run lhat;
    std::vector<Signature> L;
    std::vector<Signature> R;
    Run rhat;
    bool operator==(const UniqLevel&) const = default;
};

struct CommonSequence {
    PowerSeq pow_runs;  // Epow(Uniq(P)), left to right
    std::vector<UniqLevel> levels;
    PowerSeq core;  // Epow(XShrink_h)
    std::uint32_t h = 0;
    std::uint64_t length = 0;

    bool operator==(const CommonSequence&) const = default;
};

namespace detail {

inline void finish_common(CommonSequence& cs) {
    cs.pow_runs.clear();
    for (const UniqLevel& lv : cs.levels) {
        cs.pow_runs.push_back(lv.lhat);
        for (Signature s : lv.L) cs.pow_runs.push_back({s, 1});
    }
    cs.pow_runs.insert(cs.pow_runs.end(), cs.core.begin(), cs.core.end());
    for (auto it = cs.levels.rbegin(); it != cs.levels.rend(); ++it) {
        for (Signature s : it->R) cs.pow_runs.push_back({s, 1});
        cs.pow_runs.push_back(it->rhat);
    }
}

// Length of L: first set bit at index delta_l .. delta_l+3 of a window that
// starts at the sequence start.
inline std::size_t left_cut(const std::vector<std::uint8_t>& bits, const ParseParams& pp) {
    for (std::size_t i = pp.delta_l; i < pp.delta_l + 4u && i < bits.size(); ++i)
        if (bits[i]) return i;
    fail(Errc::internal_error, "no block start in the left border window");
}

// Start of R within a window that ends at the sequence end.
inline std::size_t right_cut(const std::vector<std::uint8_t>& bits, const ParseParams& pp) {
    const std::size_t n = bits.size();
    for (std::size_t i = n - 1 - pp.delta_r; i + 4 > n - 1 - pp.delta_r; --i)
        if (bits[i]) return i;
    fail(Errc::internal_error, "no block start in the right border window");
}

}  // namespace detail

/// Uniq(P) computed directly on P, allocating signatures as needed.
inline CommonSequence uniq_of_string(SignatureDag& d, std::string_view P) {
    if (P.empty()) fail(Errc::invalid_input, "uniq_of_string of an empty string");
    const ParseParams& pp = d.params();
    CommonSequence cs;
    cs.length = P.size();
    std::vector<Signature> xs;
    xs.reserve(P.size());
    for (unsigned char c : P) xs.push_back(d.char_sig(c));
    for (std::uint32_t t = 0;; ++t) {
        PowerSeq runs = epow(xs);
        if (runs.size() <= pp.core_limit()) {
            cs.core = std::move(runs);
            cs.h = t;
            break;
        }
        UniqLevel lv;
        lv.lhat = runs.front();
        lv.rhat = runs.back();
        std::vector<Signature> pow;
        pow.reserve(runs.size() - 2);
        for (std::size_t i = 1; i + 1 < runs.size(); ++i)
            pow.push_back(d.sig_of(Assignment::run(static_cast<Signature>(runs[i].sym), runs[i].exp)));
        std::vector<Symbol> p(pow.begin(), pow.end());
        auto bits = boundary_bits(p, pp);
        std::size_t lc = detail::left_cut(bits, pp);
        std::size_t rc = detail::right_cut(bits, pp);
        check(lc < rc, "empty XShrink above a long level");
        lv.L.assign(pow.begin(), pow.begin() + lc);
        lv.R.assign(pow.begin() + rc, pow.end());
        std::vector<Signature> next;
        std::size_t b = lc;
        while (b < rc) {
            std::size_t e = b + 1;
            while (e < rc && !bits[e]) ++e;
            next.push_back(d.sig_plus(std::span<const Signature>(pow.data() + b, e - b)));
            b = e;
        }
        cs.levels.push_back(std::move(lv));
        xs.swap(next);
    }
    detail::finish_common(cs);
    return cs;
}

/// Uniq(val(e)[j..j+y-1]) read off the existing tree of e. Never allocates.
inline CommonSequence uniq_of_substring(const SignatureDag& d, Signature e, std::uint64_t j, std::uint64_t y,
                                        QueryStats* stats = nullptr) {
    if (y == 0 || j < 1 || j - 1 + y > d.length(e)) fail(Errc::invalid_input, "uniq_of_substring: range out of bounds");
    const ParseParams& pp = d.params();
    const std::size_t K0 = pp.core_limit(), C = pp.window();
    CommonSequence cs;
    cs.length = y;
    StageWalker wl(d, e, 1, stats), wr(d, e, 1, stats);
    std::uint64_t a = j - 1, b = j - 1 + y;  // half-open char range of XShrink_t
    auto clip = [&](const StageWalker& w) {
        const Assignment& as = d.assignment(w.node());
        check(as.kind == Kind::Run, "pow stage node is not a run");
        std::uint64_t bl = d.length(as.a);
        std::uint64_t s = std::max(w.start(), a), en = std::min(w.end(), b);
        check((s - w.start()) % bl == 0 && (en - s) % bl == 0, "substring not aligned to shrink blocks");
        return Run{as.a, (en - s) / bl};
    };
    for (std::uint32_t t = 0;; ++t) {
        const std::uint32_t pow_stage = 2 * t + 1;
        PowerSeq runs;
        wl.seek(a, pow_stage);
        for (;;) {
            runs.push_back(clip(wl));
            if (wl.end() >= b || runs.size() > K0) break;
            wl.next();
        }
        if (runs.size() <= K0 && wl.end() >= b) {
            cs.core = std::move(runs);
            cs.h = t;
            break;
        }
        UniqLevel lv;
        lv.lhat = runs.front();
        wr.seek(b - 1, pow_stage);
        lv.rhat = clip(wr);
        a += lv.lhat.exp * d.length(static_cast<Signature>(lv.lhat.sym));
        b -= lv.rhat.exp * d.length(static_cast<Signature>(lv.rhat.sym));
        // XPow_t occupies [a, b) as whole pow-stage nodes
        std::vector<Signature> win;
        wl.seek(a, pow_stage);
        check(wl.start() == a, "XPow not aligned on the left");
        win.push_back(wl.node());
        while (win.size() < C) {
            check(wl.next() && wl.end() <= b, "XPow shorter than the border window");
            win.push_back(wl.node());
        }
        std::vector<Symbol> p(win.begin(), win.end());
        std::size_t lc = detail::left_cut(boundary_bits(p, pp), pp);
        lv.L.assign(win.begin(), win.begin() + lc);
        std::vector<Signature> rwin;
        wr.seek(b - 1, pow_stage);
        check(wr.end() == b, "XPow not aligned on the right");
        rwin.push_back(wr.node());
        while (rwin.size() < C) {
            check(wr.prev() && wr.start() >= a, "XPow shorter than the border window");
            rwin.push_back(wr.node());
        }
        std::reverse(rwin.begin(), rwin.end());
        p.assign(rwin.begin(), rwin.end());
        std::size_t rc = detail::right_cut(boundary_bits(p, pp), pp);
        lv.R.assign(rwin.begin() + rc, rwin.end());
        for (Signature s : lv.L) a += d.length(s);
        for (Signature s : lv.R) b -= d.length(s);
        check(a < b, "empty XShrink above a long level");
        cs.levels.push_back(std::move(lv));
    }
    detail::finish_common(cs);
    return cs;
}

namespace detail {

template <bool Back>
std::uint64_t lce_walk(const SignatureDag& d, Signature e1, std::uint64_t c1, std::uint64_t off1, Signature e2,
                       std::uint64_t c2, std::uint64_t off2, QueryStats* stats) {
    ItemWalker<Back> x(d, e1, c1, stats), y(d, e2, c2, stats);
    x.seek(off1);
    y.seek(off2);
    std::uint64_t l = 0;
    while (!x.at_end() && !y.at_end()) {
        Signature bx = x.base(), by = y.base();
        if (bx == by) {
            std::uint64_t m = std::min(x.count(), y.count());
            l += m * d.length(bx);
            x.consume(m);
            y.consume(m);
            continue;
        }
        std::uint32_t sx = d.stage(bx), sy = d.stage(by);
        if (sx > sy) {
            x.descend();
        } else if (sy > sx) {
            y.descend();
        } else {
            bool dx = x.descend();
            bool dy = y.descend();
            if (!dx && !dy) break;  // two different characters
        }
    }
    return l;
}

}  // namespace detail

/// Longest common prefix of val(e1)[i..] and val(e2)[j..].
inline std::uint64_t lce(const SignatureDag& d, Signature e1, Signature e2, std::uint64_t i, std::uint64_t j,
                         QueryStats* stats = nullptr) {
    if (i < 1 || j < 1 || i > d.length(e1) || j > d.length(e2)) fail(Errc::invalid_input, "lce: position out of range");
    return detail::lce_walk<false>(d, e1, 1, i - 1, e2, 1, j - 1, stats);
}

/// Longest common suffix of val(e1)[..i] and val(e2)[..j].
inline std::uint64_t lce_backward(const SignatureDag& d, Signature e1, Signature e2, std::uint64_t i, std::uint64_t j,
                                  QueryStats* stats = nullptr) {
    if (i < 1 || j < 1 || i > d.length(e1) || j > d.length(e2))
        fail(Errc::invalid_input, "lce_backward: position out of range");
    return detail::lce_walk<true>(d, e1, 1, d.length(e1) - i, e2, 1, d.length(e2) - j, stats);
}

inline std::uint64_t lcp_sig(const SignatureDag& d, Signature e1, Signature e2, QueryStats* stats = nullptr) {
    return lce(d, e1, e2, 1, 1, stats);
}

inline std::uint64_t lcs_sig(const SignatureDag& d, Signature e1, Signature e2, QueryStats* stats = nullptr) {
    return lce_backward(d, e1, e2, d.length(e1), d.length(e2), stats);
}

/// Three-way comparison of val(e1)^c1 and val(e2)^c2 (reversed strings if Back).
template <bool Back>
int compare_powers(const SignatureDag& d, Signature e1, std::uint64_t c1, Signature e2, std::uint64_t c2,
                   QueryStats* stats = nullptr) {
    std::uint64_t n1 = c1 ? d.length(e1) * c1 : 0, n2 = c2 ? d.length(e2) * c2 : 0;
    if (n1 == 0 || n2 == 0) return n1 == n2 ? 0 : (n1 < n2 ? -1 : 1);
    std::uint64_t l = detail::lce_walk<Back>(d, e1, c1, 0, e2, c2, 0, stats);
    if (l == std::min(n1, n2)) return n1 == n2 ? 0 : (n1 < n2 ? -1 : 1);
    auto at = [&](Signature e, std::uint64_t c) {
        ItemWalker<Back> w(d, e, c, stats);
        w.seek(l);
        return w.next_char();
    };
    unsigned char a = at(e1, c1), b = at(e2, c2);
    return a < b ? -1 : 1;
}

}  // namespace sigdex

#endif
