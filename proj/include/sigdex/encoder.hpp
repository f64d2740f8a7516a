#ifndef SIGDEX_ENCODER_HPP
#define SIGDEX_ENCODER_HPP

// The Shrink/Pow tower over an explicit sequence.

#include <algorithm>
#include <numeric>
#include <string_view>
#include <vector>

#include "dag.hpp"
#include "parse.hpp"

namespace sigdex {

struct LevelSeq {
    Level level;
    PowerSeq seq;  // at shrink levels every exponent is 1
};

namespace detail {

// Stable reorder of `order` by key(i); counting sort when the key range is
// small, otherwise a stable comparison sort (same resulting order).
template <class KeyFn>
void stable_bucket_pass(std::vector<std::size_t>& order, KeyFn key) {
    if (order.empty()) return;
    std::uint64_t lo = key(order[0]), hi = lo;
    for (std::size_t i : order) {
        lo = std::min(lo, key(i));
        hi = std::max(hi, key(i));
    }
    if (hi - lo <= 4 * order.size() + 1024) {
        std::vector<std::size_t> cnt(hi - lo + 2, 0);
        for (std::size_t i : order) ++cnt[key(i) - lo + 1];
        for (std::size_t b = 1; b < cnt.size(); ++b) cnt[b] += cnt[b - 1];
        std::vector<std::size_t> out(order.size());
        for (std::size_t i : order) out[cnt[key(i) - lo]++] = i;
        order.swap(out);
    } else {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
    }
}

}  // namespace detail

/// Pow_t from Shrink_t: one run signature per maximal run.
inline std::vector<Signature> pow_symbols(SignatureDag& d, const PowerSeq& runs, bool sorted) {
    std::vector<Signature> out(runs.size());
    if (!sorted) {
        for (std::size_t i = 0; i < runs.size(); ++i)
            out[i] = d.sig_of(Assignment::run(static_cast<Signature>(runs[i].sym), runs[i].exp));
        return out;
    }
    std::vector<std::size_t> order(runs.size());
    std::iota(order.begin(), order.end(), 0);
    detail::stable_bucket_pass(order, [&](std::size_t i) { return runs[i].exp; });
    detail::stable_bucket_pass(order, [&](std::size_t i) { return runs[i].sym; });
    for (std::size_t i : order)
        out[i] = d.sig_of(Assignment::run(static_cast<Signature>(runs[i].sym), runs[i].exp));
    return out;
}

/// Shrink_{t+1} from Pow_t: boundary bits, blocks, one nested pair per block.
inline std::vector<Signature> shrink_symbols(SignatureDag& d, const std::vector<Signature>& pow, bool sorted) {
    std::vector<Symbol> p(pow.begin(), pow.end());
    auto bits = boundary_bits(p, d.params());
    auto starts = block_starts(bits);
    starts.push_back(pow.size());
    const std::size_t nb = starts.size() - 1;
    std::vector<Signature> out(nb);
    auto block = [&](std::size_t b) {
        return std::span<const Signature>(pow.data() + starts[b], starts[b + 1] - starts[b]);
    };
    if (!sorted) {
        for (std::size_t b = 0; b < nb; ++b) out[b] = d.sig_plus(block(b));
        return out;
    }
    std::vector<std::size_t> order(nb);
    std::iota(order.begin(), order.end(), 0);
    for (int pos = 3; pos >= 0; --pos)
        detail::stable_bucket_pass(order, [&](std::size_t b) -> std::uint64_t {
            auto x = block(b);
            return pos < static_cast<int>(x.size()) ? x[pos] : 0;
        });
    detail::stable_bucket_pass(order, [&](std::size_t b) { return block(b).size(); });
    for (std::size_t b : order) out[b] = d.sig_plus(block(b));
    return out;
}

inline LevelSeq pow_level(SignatureDag& d, const LevelSeq& prev, bool sorted = false) {
    if (prev.level.pow) fail(Errc::invalid_input, "pow_level expects a shrink level");
    auto sy = pow_symbols(d, prev.seq, sorted);
    LevelSeq out{{prev.level.t, true}, {}};
    for (Signature s : sy) out.seq.push_back({s, 1});
    return out;
}

inline LevelSeq shrink_level(SignatureDag& d, const LevelSeq& prev, bool sorted = false) {
    if (!prev.level.pow) fail(Errc::invalid_input, "shrink_level expects a pow level");
    std::vector<Signature> p;
    for (const Run& r : prev.seq)
        for (std::uint64_t k = 0; k < r.exp; ++k) p.push_back(static_cast<Signature>(r.sym));
    if (p.size() < 2) fail(Errc::invalid_input, "shrink_level on a converged tower");
    auto sy = shrink_symbols(d, p, sorted);
    return {{prev.level.t + 1, false}, epow(sy)};
}

/// Finishes the tower from an explicit Shrink_t run sequence; returns the root.
/// `height`, if given, receives the number of shrink levels above the input.
inline Signature tower_from_runs(SignatureDag& d, PowerSeq runs, bool sorted = false, std::uint32_t* height = nullptr) {
    std::uint32_t h = 0;
    for (;;) {
        auto pow = pow_symbols(d, runs, sorted);
        if (pow.size() == 1) {
            if (height) *height = h;
            return pow[0];
        }
        runs = epow(shrink_symbols(d, pow, sorted));
        ++h;
    }
}

/// Level-by-level build with bucket-sorted allocation. Does not touch the root.
inline Signature encode_text_linear(SignatureDag& d, std::string_view text, std::uint32_t* height = nullptr) {
    if (text.empty()) fail(Errc::invalid_input, "cannot encode an empty text");
    if (4 * text.size() > d.M()) fail(Errc::capacity_exhausted, "text longer than max_text_len");
    std::vector<Signature> chars(256, kNone);
    std::vector<bool> seen(256, false);
    for (unsigned char c : text) seen[c] = true;
    for (int c = 0; c < 256; ++c)
        if (seen[c]) chars[c] = d.char_sig(static_cast<unsigned char>(c));
    std::vector<Signature> s;
    s.reserve(text.size());
    for (unsigned char c : text) s.push_back(chars[c]);
    return tower_from_runs(d, epow(s), true, height);
}

}  // namespace sigdex

#endif
