#ifndef SIGDEX_IMPORTERS_HPP
#define SIGDEX_IMPORTERS_HPP

// Builders from LZ77 and SLPs, per-variable signatures, SLP export and the
// variable-level LCP/LCS/LCE applications.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "engine.hpp"
#include "slp.hpp"

namespace sigdex {

namespace detail {

/// Factors up to this length are spelled out rather than copied. Runs of
/// short factors then cost one insert instead of one edit each.
inline constexpr std::uint64_t kShortFactor = 32;

/// Appends edits at the end of the text, holding spelled-out text back until
/// the next copy or the end.
class TailWriter {
public:
    explicit TailWriter(Engine& e) : e_(e) {}

    std::uint64_t size() const { return flushed_ + pending_.size(); }

    void spell(std::string_view t) { pending_ += t; }

    /// Copy of text[src .. src+len-1], all of it already written.
    void copy(std::uint64_t src, std::uint64_t len) {
        if (len > kShortFactor) {
            flush();
            e_.insert_copy(src, len, flushed_ + 1);
            flushed_ += len;
            return;
        }
        std::uint64_t last = src + len - 1;
        if (src <= flushed_) pending_ += expand(e_.dag(), e_.root(), src, std::min(last, flushed_));
        if (last > flushed_) {
            std::uint64_t from = std::max(src, flushed_ + 1) - flushed_ - 1;
            pending_ += pending_.substr(from, last - flushed_ - from);
        }
    }

    void flush() {
        if (pending_.empty()) return;
        e_.insert(pending_, flushed_ + 1);
        flushed_ += pending_.size();
        pending_.clear();
    }

private:
    Engine& e_;
    std::uint64_t flushed_ = 0;
    std::string pending_;
};

}  // namespace detail

/// Replays Z: long copies through insert_copy, literals and short copies
/// batched into inserts.
inline Signature build_from_lz77(Engine& e, const Lz77Factorization& z) {
    const std::uint64_t n = lz77_length(z);
    if (n > e.config().max_text_len) fail(Errc::capacity_exhausted, "decoded text exceeds max_text_len");
    e.clear();
    detail::TailWriter w(e);
    for (const Lz77Factor& f : z) {
        if (f.literal)
            w.spell(std::string(1, static_cast<char>(f.c)));
        else
            w.copy(f.src, f.len);
    }
    w.flush();
    return e.root();
}

/// DFS over the derivation tree: the first visit of a variable spells it
/// through its children, later visits copy its first occurrence. Short
/// variables are spelled out directly.
inline Signature build_from_slp_gfact(Engine& e, const Slp& s) {
    s.validate();
    auto len = s.lengths();
    if (len[s.n()] > e.config().max_text_len) fail(Errc::capacity_exhausted, "SLP text exceeds max_text_len");
    e.clear();
    detail::TailWriter w(e);
    std::vector<std::uint64_t> first(s.n() + 1, 0);
    struct Frame {
        std::uint32_t v;
        int step;
        std::uint64_t start;
    };
    std::vector<Frame> st{{static_cast<std::uint32_t>(s.n()), 0, 0}};
    while (!st.empty()) {
        Frame& f = st.back();
        const SlpRule& x = s.rule(f.v);
        if (f.step == 0) {
            if (first[f.v]) {
                w.copy(first[f.v], len[f.v]);
                st.pop_back();
                continue;
            }
            f.start = w.size() + 1;
            if (len[f.v] <= detail::kShortFactor) {
                w.spell(s.expand(f.v));
                first[f.v] = f.start;
                st.pop_back();
                continue;
            }
            f.step = 1;
            st.push_back({x.l, 0, 0});
        } else if (f.step == 1) {
            f.step = 2;
            st.push_back({x.r, 0, 0});
        } else {
            first[f.v] = f.start;
            st.pop_back();
        }
    }
    w.flush();
    return e.root();
}

// ---- level-wise SLP encoding ------------------------------------------------

struct LevelwiseResult {
    std::vector<Signature> roots;  // index i -> id(val(X_i)); 0 when not requested
    std::uint32_t levels = 0;
    std::uint64_t peak_state = 0;  // largest number of state entries held for one level
};

namespace detail {

inline void append_runs(PowerSeq& out, const PowerSeq& in) {
    for (const Run& r : in) push_run(out, r);
}

inline std::vector<Signature> pow_of(SignatureDag& d, const PowerSeq& runs) {
    std::vector<Signature> out;
    out.reserve(runs.size());
    for (const Run& r : runs) out.push_back(d.sig_of(Assignment::run(static_cast<Signature>(r.sym), r.exp)));
    return out;
}

// Blocks of syms[from..to) under bits (a block start at `from` and at `to` is checked).
inline PowerSeq blocks_between(SignatureDag& d, const std::vector<Signature>& syms, const std::vector<std::uint8_t>& bits,
                               std::size_t from, std::size_t to) {
    PowerSeq out;
    if (from == to) return out;
    check(from < to && bits[from] == 1, "block range does not start at a block");
    check(to == syms.size() || bits[to] == 1, "block range does not end at a block");
    std::size_t b = from;
    while (b < to) {
        std::size_t e = b + 1;
        while (e < to && !bits[e]) ++e;
        push_run(out, {d.sig_plus(std::span<const Signature>(syms.data() + b, e - b)), 1});
        b = e;
    }
    return out;
}

}  // namespace detail

/// Level-by-level signature encoding of every variable of s, bottom-up, with
/// per-variable states of bounded size. With `all`, returns id(val(X_i)) for
/// every i, otherwise only for the start symbol. Returned roots are pinned.
inline LevelwiseResult encode_slp_levelwise(SignatureDag& d, const Slp& s, bool all) {
    s.validate();
    const ParseParams& pp = d.params();
    const std::size_t K0 = pp.core_limit(), C = pp.window();
    const std::uint32_t n = static_cast<std::uint32_t>(s.n());
    auto lens = s.lengths();
    if (lens[n] > d.M() / 4) fail(Errc::capacity_exhausted, "SLP text exceeds max_text_len");

    constexpr std::uint32_t kOpen = std::numeric_limits<std::uint32_t>::max();
    struct Carry {  // handed from Pow_{t-1} to Shrink_t
        PowerSeq zhat, ahat, bhat;
    };
    struct Cur {  // Shrink_t and Pow_t of one variable
        bool is_short = false;
        PowerSeq xs;
        Run first, last;
        std::size_t count = 0;
        std::vector<Signature> pw, sw;
        std::size_t llen = 0, rlen = 0;
    };
    std::vector<std::uint32_t> h(n + 1, kOpen);
    std::vector<Carry> carry(n + 1), next(n + 1);
    std::vector<Cur> cur(n + 1);
    LevelwiseResult res;
    res.roots.assign(n + 1, kNone);

    auto finish = [&](std::uint32_t x, const Carry& c, const PowerSeq& xs) {
        if (!all && x != n) return;
        PowerSeq full = c.ahat;
        detail::append_runs(full, xs);
        detail::append_runs(full, c.bhat);
        Signature r = tower_from_runs(d, full);
        d.pin(r);
        res.roots[x] = r;
    };

    for (std::uint32_t t = 0; h[n] == kOpen; ++t) {
        std::uint64_t entries = 0;
        for (std::uint32_t x = 1; x <= n; ++x) {
            if (h[x] < t) continue;
            const SlpRule& rule = s.rule(x);
            Cur& c = cur[x];
            c = Cur{};
            if (rule.chr) {
                c.is_short = true;
                c.xs = {{d.char_sig(rule.c), 1}};
                h[x] = t;
                finish(x, carry[x], c.xs);
                entries += 1;
                continue;
            }
            const std::uint32_t l = rule.l, r = rule.r;
            // present at Shrink_t: h >= t; long: h > t
            const bool ll = h[l] > t, rl = h[r] > t;
            const bool ls = h[l] == t, rs = h[r] == t;
            PowerSeq E;
            if (ll) push_run(E, cur[l].last);
            if (ls) detail::append_runs(E, cur[l].xs);
            detail::append_runs(E, carry[x].zhat);
            if (rl) push_run(E, cur[r].first);
            if (rs) detail::append_runs(E, cur[r].xs);
            std::size_t count = (ll ? cur[l].count - 1 : 0) + E.size() + (rl ? cur[r].count - 1 : 0);
            c.count = std::min(count, K0 + 1);
            entries += E.size() + carry[x].zhat.size() + carry[x].ahat.size() + carry[x].bhat.size();
            if (count <= K0) {
                check(!ll && !rl, "short variable with a long child");
                c.is_short = true;
                c.xs = std::move(E);
                h[x] = t;
                finish(x, carry[x], c.xs);
                continue;
            }
            c.first = ll ? cur[l].first : E.front();
            c.last = rl ? cur[r].last : E.back();
            PowerSeq Ep(E.begin() + (ll ? 0 : 1), E.end() - (rl ? 0 : 1));
            std::vector<Signature> z = detail::pow_of(d, Ep);
            // window around the seam of XPow_t
            std::vector<Signature> W;
            if (ll) W = cur[l].sw;
            W.insert(W.end(), z.begin(), z.end());
            if (rl) W.insert(W.end(), cur[r].pw.begin(), cur[r].pw.end());
            check(W.size() >= 2, "seam window too short");
            std::vector<Symbol> Wv(W.begin(), W.end());
            auto bits = boundary_bits(Wv, pp);
            c.llen = ll ? cur[l].llen : detail::left_cut(bits, pp);
            c.rlen = rl ? cur[r].rlen : W.size() - detail::right_cut(bits, pp);
            c.pw = ll ? cur[l].pw : std::vector<Signature>(W.begin(), W.begin() + static_cast<std::ptrdiff_t>(C));
            c.sw = rl ? cur[r].sw : std::vector<Signature>(W.end() - static_cast<std::ptrdiff_t>(C), W.end());
            const std::size_t gs = ll ? C - cur[l].rlen : c.llen;
            const std::size_t ge = rl ? W.size() - C + cur[r].llen : W.size() - c.rlen;
            check(gs <= ge, "negative seam");
            Carry& nx = next[x];
            nx.zhat = detail::blocks_between(d, W, bits, gs, ge);
            if (ll) {
                nx.ahat = next[l].ahat;
            } else {
                PowerSeq a = carry[x].ahat;
                push_run(a, c.first);
                std::vector<Signature> A = detail::pow_of(d, a);
                const std::size_t end = A.size() + c.llen;
                A.insert(A.end(), c.pw.begin(), c.pw.end());
                std::vector<Symbol> Av(A.begin(), A.end());
                nx.ahat = detail::blocks_between(d, A, boundary_bits(Av, pp), 0, end);
            }
            if (rl) {
                nx.bhat = next[r].bhat;
            } else {
                PowerSeq b{c.last};
                detail::append_runs(b, carry[x].bhat);
                std::vector<Signature> B = c.sw;
                auto bp = detail::pow_of(d, b);
                B.insert(B.end(), bp.begin(), bp.end());
                std::vector<Symbol> Bv(B.begin(), B.end());
                nx.bhat = detail::blocks_between(d, B, boundary_bits(Bv, pp), C - c.rlen, B.size());
            }
            entries += z.size() + c.pw.size() + c.sw.size() + nx.zhat.size() + nx.ahat.size() + nx.bhat.size() + 2;
        }
        res.peak_state = std::max(res.peak_state, entries);
        res.levels = t + 1;
        carry.swap(next);
        for (auto& c : next) c = Carry{};
    }
    return res;
}

/// Encodes val(X_n) level-wise and makes it the engine's text.
inline Signature build_from_slp_levelwise(Engine& e, const Slp& s, LevelwiseResult* info = nullptr) {
    if (s.lengths()[s.n()] > e.config().max_text_len) fail(Errc::capacity_exhausted, "SLP text exceeds max_text_len");
    e.clear();
    LevelwiseResult res = encode_slp_levelwise(e.dag(), s, false);
    Signature root = res.roots[s.n()];
    e.dag().set_root(root);
    e.dag().unpin(root);
    e.dag().collect();
    if (info) *info = std::move(res);
    return root;
}

/// id(val(X_i)) for every variable, pinned for the lifetime of this object.
class VariableSignatures {
public:
    VariableSignatures(SignatureDag& d, const Slp& s) : d_(d), lens_(s.lengths()) {
        sigs_ = encode_slp_levelwise(d, s, true).roots;
    }
    ~VariableSignatures() {
        for (std::size_t i = 1; i < sigs_.size(); ++i) d_.unpin(sigs_[i]);
        d_.collect();
    }
    VariableSignatures(const VariableSignatures&) = delete;
    VariableSignatures& operator=(const VariableSignatures&) = delete;

    std::size_t n() const { return sigs_.size() - 1; }
    Signature operator[](std::uint32_t i) const { return sigs_.at(i); }
    std::uint64_t length(std::uint32_t i) const { return lens_.at(i); }
    const SignatureDag& dag() const { return d_; }

private:
    SignatureDag& d_;
    std::vector<std::uint64_t> lens_;
    std::vector<Signature> sigs_;
};

/// Variables in lexicographic order of their values (ties by index).
inline std::vector<std::uint32_t> sort_variables(const VariableSignatures& v, QueryStats* stats = nullptr) {
    std::vector<std::uint32_t> order(v.n());
    std::iota(order.begin(), order.end(), 1u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return compare_powers<false>(v.dag(), v[a], 1, v[b], 1, stats) < 0;
    });
    return order;
}

/// LCP (or, on the reversed program, LCS) of variable values. Sorted order
/// plus a sparse table over adjacent LCPs answers a pair by one range minimum.
class VariableLcp {
public:
    VariableLcp(SignatureDag& d, const Slp& s, bool suffix = false)
        : suffix_(suffix), prog_(suffix ? s.reversed() : s), sigs_(d, prog_) {
        order_ = sort_variables(sigs_);
        rank_.assign(sigs_.n() + 1, 0);
        for (std::size_t k = 0; k < order_.size(); ++k) rank_[order_[k]] = k;
        std::vector<std::uint64_t> adj(order_.size(), 0);
        for (std::size_t k = 1; k < order_.size(); ++k) adj[k] = lcp_sig(d, sigs_[order_[k - 1]], sigs_[order_[k]]);
        table_.push_back(std::move(adj));
        for (std::size_t w = 1; 2 * w <= order_.size(); w *= 2) {
            const auto& prev = table_.back();
            std::vector<std::uint64_t> row(order_.size() - 2 * w + 1);
            for (std::size_t i = 0; i < row.size(); ++i) row[i] = std::min(prev[i], prev[i + w]);
            table_.push_back(std::move(row));
        }
    }

    std::uint64_t query(std::uint32_t i, std::uint32_t j) const {
        if (i < 1 || j < 1 || i > sigs_.n() || j > sigs_.n()) fail(Errc::invalid_input, "variable out of range");
        if (i == j) return sigs_.length(i);
        std::size_t a = std::min(rank_[i], rank_[j]) + 1, b = std::max(rank_[i], rank_[j]) + 1;  // [a, b)
        std::size_t k = std::bit_width(b - a) - 1;
        return std::min(table_[k][a], table_[k][b - (std::size_t{1} << k)]);
    }

    /// Direct descent without the table.
    std::uint64_t direct(std::uint32_t i, std::uint32_t j, QueryStats* stats = nullptr) const {
        if (i < 1 || j < 1 || i > sigs_.n() || j > sigs_.n()) fail(Errc::invalid_input, "variable out of range");
        return lcp_sig(sigs_.dag(), sigs_[i], sigs_[j], stats);
    }

    const std::vector<std::uint32_t>& order() const { return order_; }
    bool suffix() const { return suffix_; }

private:
    bool suffix_;
    Slp prog_;
    VariableSignatures sigs_;
    std::vector<std::uint32_t> order_;
    std::vector<std::size_t> rank_;
    std::vector<std::vector<std::uint64_t>> table_;
};

inline std::uint64_t variable_lcp(SignatureDag& d, const Slp& s, std::uint32_t i, std::uint32_t j) {
    VariableSignatures v(d, s);
    if (i < 1 || j < 1 || i > v.n() || j > v.n()) fail(Errc::invalid_input, "variable out of range");
    return lcp_sig(d, v[i], v[j]);
}

inline std::uint64_t variable_lcs(SignatureDag& d, const Slp& s, std::uint32_t i, std::uint32_t j) {
    Slp rev = s.reversed();
    VariableSignatures v(d, rev);
    if (i < 1 || j < 1 || i > v.n() || j > v.n()) fail(Errc::invalid_input, "variable out of range");
    return lcp_sig(d, v[i], v[j]);
}

/// LCE between val(X_i)[a..] and val(X_j)[b..] answered on the encoding of
/// val(X_n) through the leftmost occurrence of each variable.
class VariableLce {
public:
    VariableLce(Engine& e, const Slp& s) : e_(e), lens_(s.lengths()) {
        build_from_slp_levelwise(e, s);
        const std::uint32_t n = static_cast<std::uint32_t>(s.n());
        const std::uint64_t none = std::numeric_limits<std::uint64_t>::max();
        occ_.assign(n + 1, none);
        occ_[n] = 1;
        for (std::uint32_t x = n; x >= 1; --x) {
            const SlpRule& r = s.rule(x);
            if (r.chr || occ_[x] == none) continue;
            occ_[r.l] = std::min(occ_[r.l], occ_[x]);
            occ_[r.r] = std::min(occ_[r.r], occ_[x] + lens_[r.l]);
        }
    }

    std::uint64_t occurrence(std::uint32_t i) const { return occ_.at(i); }

    std::uint64_t query(std::uint32_t i, std::uint32_t j, std::uint64_t a, std::uint64_t b,
                        QueryStats* stats = nullptr) const {
        if (i < 1 || j < 1 || i >= occ_.size() || j >= occ_.size()) fail(Errc::invalid_input, "variable out of range");
        if (a < 1 || b < 1 || a > lens_[i] || b > lens_[j]) fail(Errc::invalid_input, "position out of range");
        Signature r = e_.root();
        std::uint64_t l = lce(e_.dag(), r, r, occ_[i] + a - 1, occ_[j] + b - 1, stats);
        return std::min({l, lens_[i] - a + 1, lens_[j] - b + 1});
    }

private:
    Engine& e_;
    std::vector<std::uint64_t> lens_;
    std::vector<std::uint64_t> occ_;
};

/// SLP for val(root): pairs map one to one, Run(b,k) becomes binary powering
/// of b, Run(b,1) is b itself. Identical pairs are shared.
inline Slp export_to_slp(const SignatureDag& d, Signature root) {
    if (root == kNone) fail(Errc::invalid_input, "export of an empty text");
    Slp s;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> pairs;
    std::map<unsigned char, std::uint32_t> chars;
    auto mk_pair = [&](std::uint32_t l, std::uint32_t r) {
        auto [it, fresh] = pairs.try_emplace({l, r}, 0);
        if (fresh) {
            s.rules.push_back(SlpRule::pair(l, r));
            it->second = static_cast<std::uint32_t>(s.n());
        }
        return it->second;
    };
    std::unordered_map<Signature, std::uint32_t> var;
    std::vector<std::pair<Signature, bool>> st{{root, false}};
    while (!st.empty()) {
        auto [e, ready] = st.back();
        st.pop_back();
        if (var.count(e)) continue;
        const Assignment& a = d.assignment(e);
        if (!ready) {
            st.push_back({e, true});
            for (Signature c : SignatureDag::children(a))
                if (!var.count(c)) st.push_back({c, false});
            continue;
        }
        std::uint32_t v = 0;
        if (a.kind == Kind::Char) {
            auto [it, fresh] = chars.try_emplace(static_cast<unsigned char>(a.a), 0);
            if (fresh) {
                s.rules.push_back(SlpRule::character(static_cast<unsigned char>(a.a)));
                it->second = static_cast<std::uint32_t>(s.n());
            }
            v = it->second;
        } else if (a.kind == Kind::Pair) {
            v = mk_pair(var.at(a.left()), var.at(a.right()));
        } else {
            const std::uint32_t p = var.at(a.a);
            std::uint32_t acc = p;
            // binary powering from the top bit down
            for (int bit = std::bit_width(a.b) - 2; bit >= 0; --bit) {
                acc = mk_pair(acc, acc);
                if ((a.b >> bit) & 1) acc = mk_pair(acc, p);
            }
            v = acc;
        }
        var[e] = v;
    }
    check(var.at(root) == s.n(), "exported start symbol is not the last rule");
    return s;
}

}  // namespace sigdex

#endif
