#ifndef SIGDEX_INDEX_HPP
#define SIGDEX_INDEX_HPP

// Grammar-compressed pattern matching over a signature store: primary
// occurrences from 2D range reporting on (reversed left value, right value),
// vOcc by reverse parent traversal, and run arithmetic. The index follows
// the store as a DagObserver, so edits keep it current.

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <tuple>
#include <vector>

#include "encoder.hpp"
#include "lce.hpp"
#include "range_tree.hpp"
#include "slp.hpp"

namespace sigdex {

/// val(sig)^count; count is 1 except for run tails on the y axis.
struct AxisKey {
    Signature sig = kNone;
    std::uint64_t count = 1;
    auto operator<=>(const AxisKey&) const = default;
};

struct PrimaryOcc {
    Signature sig = kNone;
    std::uint64_t offset = 0;  // 1-based start of the pattern within val(sig)
    auto operator<=>(const PrimaryOcc&) const = default;
};

/// Order-maintained sequence of strings val(sig)^count (reversed when Back).
/// Each element carries a 64-bit label whose order matches string order;
/// ties between equal strings are broken by the key.
template <bool Back>
class Axis {
public:
    struct Elem {
        AxisKey key;
        std::uint64_t label = 0;
        std::uint32_t refs = 0;
    };

    Axis(const SignatureDag& d, QueryStats* stats) : d_(&d), stats_(stats), set_(Less{this}) {}
    Axis(const Axis&) = delete;
    Axis& operator=(const Axis&) = delete;

    std::size_t size() const { return set_.size(); }

    Elem* acquire(AxisKey k) {
        auto it = by_key_.find(k);
        if (it != by_key_.end()) {
            ++it->second->refs;
            return it->second.get();
        }
        auto owned = std::make_unique<Elem>(Elem{k, 0, 1});
        Elem* e = owned.get();
        by_key_.emplace(k, std::move(owned));
        auto pos = set_.insert(e).first;
        place(pos);
        return e;
    }

    void release(Elem* e) {
        if (e->refs == 0) fail(Errc::internal_error, "axis: release below zero");
        if (--e->refs) return;
        set_.erase(e);
        by_key_.erase(e->key);
    }

    const Elem* find(AxisKey k) const {
        auto it = by_key_.find(k);
        return it == by_key_.end() ? nullptr : it->second.get();
    }

    /// Elements e with cmp(e) == 0, where cmp is -1/0/+1 and monotone along the axis.
    template <class Cmp>
    std::optional<std::pair<const Elem*, const Elem*>> range(Cmp cmp) const {
        Probe<Cmp> probe{cmp};
        auto lo = set_.lower_bound(probe);
        auto hi = set_.upper_bound(probe);
        if (lo == hi) return std::nullopt;
        return std::make_pair(*lo, *std::prev(hi));
    }

    std::vector<AxisKey> keys() const {
        std::vector<AxisKey> out;
        for (const Elem* e : set_) out.push_back(e->key);
        return out;
    }

    int compare(AxisKey a, AxisKey b) const {
        int c = compare_powers<Back>(*d_, a.sig, a.count, b.sig, b.count, stats_);
        if (c) return c;
        return a == b ? 0 : (a < b ? -1 : 1);
    }

    /// Adjacent elements in strict order with increasing labels; refcounts as given.
    void audit(const std::map<AxisKey, std::uint32_t>& refs) const {
        if (refs.size() != set_.size() || by_key_.size() != set_.size()) fail(Errc::internal_error, "axis: size mismatch");
        const Elem* prev = nullptr;
        for (const Elem* e : set_) {
            auto it = refs.find(e->key);
            if (it == refs.end() || it->second != e->refs) fail(Errc::internal_error, "axis: refcount mismatch");
            if (prev && (prev->label >= e->label || compare(prev->key, e->key) >= 0))
                fail(Errc::internal_error, "axis: order violated");
            prev = e;
        }
    }

private:
    template <class Cmp>
    struct Probe {
        Cmp cmp;
    };
    struct Less {
        using is_transparent = void;
        const Axis* ax;
        bool operator()(const Elem* a, const Elem* b) const { return ax->compare(a->key, b->key) < 0; }
        template <class Cmp>
        bool operator()(const Elem* a, const Probe<Cmp>& p) const {
            return p.cmp(*a) < 0;
        }
        template <class Cmp>
        bool operator()(const Probe<Cmp>& p, const Elem* a) const {
            return p.cmp(*a) > 0;
        }
    };
    using Set = std::set<Elem*, Less>;

    static constexpr std::uint64_t kTop = std::numeric_limits<std::uint64_t>::max();

    // Midpoint label, or an even relabel of the smallest surrounding window
    // whose label span leaves gaps of at least its own element count.
    void place(typename Set::iterator pos) {
        auto lab_before = [&](typename Set::iterator it) { return it == set_.begin() ? 0 : (*std::prev(it))->label; };
        auto lab_after = [&](typename Set::iterator it) {
            auto nx = std::next(it);
            return nx == set_.end() ? kTop : (*nx)->label;
        };
        std::uint64_t a = lab_before(pos), b = lab_after(pos);
        if (b - a >= 2) {
            (*pos)->label = a + (b - a) / 2;
            return;
        }
        auto lo = pos, hi = pos;
        std::uint64_t m = 1;
        for (std::uint64_t want = 2;; want *= 2) {
            while (m < want && (lo != set_.begin() || std::next(hi) != set_.end())) {
                if (lo != set_.begin()) {
                    --lo;
                    ++m;
                }
                if (m < want && std::next(hi) != set_.end()) {
                    ++hi;
                    ++m;
                }
            }
            std::uint64_t L = lab_before(lo), H = lab_after(hi);
            std::uint64_t gap = (H - L) / (m + 1);
            bool whole = lo == set_.begin() && std::next(hi) == set_.end();
            if (gap >= std::max<std::uint64_t>(2, m) || (whole && gap >= 1)) {
                std::uint64_t lab = L;
                for (auto it = lo;; ++it) {
                    lab += gap;
                    (*it)->label = lab;
                    if (it == hi) break;
                }
                return;
            }
            if (whole) fail(Errc::capacity_exhausted, "axis: label space exhausted");
        }
    }

    const SignatureDag* d_;
    QueryStats* stats_;
    Set set_;
    std::map<AxisKey, std::unique_ptr<Elem>> by_key_;
};

struct IndexOptions {
    /// Query every split 1..|P|-1 instead of the common-sequence splits.
    /// Needed when the store holds a grammar that is not a signature encoding.
    bool all_splits = false;
    /// Follow the store's additions and removals.
    bool attach = true;
};

/// Pattern-matching index over every Pair and Run node of a store.
class PatternIndex : public DagObserver {
public:
    using XAxis = Axis<true>;
    using YAxis = Axis<false>;

    struct Ranges {
        const XAxis::Elem* x1;
        const XAxis::Elem* x2;
        const YAxis::Elem* y1;
        const YAxis::Elem* y2;
    };

    explicit PatternIndex(SignatureDag& d, IndexOptions opt = {}) : d_(d), opt_(opt), xs_(d, &maint_), ys_(d, &maint_) {
        if (opt_.attach) {
            if (d_.observer()) fail(Errc::invalid_input, "store already has an observer");
            d_.set_observer(this);
        }
        d_.for_each([&](Signature e) { on_signature_added(e); });
    }
    ~PatternIndex() override {
        if (d_.observer() == this) d_.set_observer(nullptr);
    }
    PatternIndex(const PatternIndex&) = delete;
    PatternIndex& operator=(const PatternIndex&) = delete;

    const SignatureDag& dag() const { return d_; }
    std::size_t points() const { return plane_.size(); }
    const XAxis& x_axis() const { return xs_; }
    const YAxis& y_axis() const { return ys_; }
    /// Splits queried by the last primary_occurrences call.
    std::size_t last_split_count() const { return last_splits_; }

    void on_signature_added(Signature e) override {
        Entry& en = entries_[e];
        en.own_x = xs_.acquire({e, 1});
        en.own_y = ys_.acquire({e, 1});
        auto pk = point_keys(e);
        if (!pk) return;
        en.px = xs_.acquire(pk->first);
        en.py = ys_.acquire(pk->second);
        plane_.insert(e, &en.px->label, &en.py->label);
    }

    void on_signature_removed(Signature e) override {
        auto it = entries_.find(e);
        if (it == entries_.end()) fail(Errc::internal_error, "index: removal of an unknown signature");
        Entry& en = it->second;
        if (en.px) {
            plane_.erase(e);
            xs_.release(en.px);
            ys_.release(en.py);
        }
        xs_.release(en.own_x);
        ys_.release(en.own_y);
        entries_.erase(it);
    }

    /// Points inside the rectangle spanned by axis elements (inclusive).
    std::vector<Signature> report(const XAxis::Elem* x1, const XAxis::Elem* x2, const YAxis::Elem* y1,
                                  const YAxis::Elem* y2) const {
        std::vector<Signature> out;
        if (!x1 || !x2 || !y1 || !y2) return out;
        for (auto id : plane_.report(x1->label, x2->label, y1->label, y2->label)) out.push_back(static_cast<Signature>(id));
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Axis ranges for split j of P (1 <= j < |P|); nullopt when an axis has none.
    std::optional<Ranges> pattern_ranges(std::string_view P, std::uint64_t j, QueryStats* stats = nullptr) {
        if (j < 1 || j >= P.size()) fail(Errc::invalid_input, "pattern_ranges: split out of range");
        TempPattern tp(d_, P);
        return ranges_for(tp.sig, P, j, stats);
    }

    std::vector<PrimaryOcc> primary_occurrences(std::string_view P, QueryStats* stats = nullptr) {
        std::vector<PrimaryOcc> out;
        last_splits_ = 0;
        if (P.size() < 2 || d_.empty() || P.size() > d_.length(d_.root())) return out;
        TempPattern tp(d_, P);
        for (std::uint64_t j : splits(P)) {
            ++last_splits_;
            auto r = ranges_for(tp.sig, P, j, stats);
            if (!r) continue;
            for (Signature e : report(r->x1, r->x2, r->y1, r->y2)) out.push_back({e, d_.length(left_of(e)) - j + 1});
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Calls f(k) for every 1-based k in vOcc(e): the starts of e's nodes in the derivation tree of the root.
    template <class F>
    void for_each_vocc(Signature e, F&& f, QueryStats* stats = nullptr) const {
        const Signature root = d_.root();
        if (root == kNone) return;
        std::vector<std::pair<Signature, std::uint64_t>> st{{e, 0}};
        while (!st.empty()) {
            auto [s, off] = st.back();
            st.pop_back();
            if (stats) ++stats->nodes_visited;
            if (s == root) {
                f(off + 1);
                continue;
            }
            for (Signature p : d_.parents(s)) {
                const Assignment& a = d_.assignment(p);
                if (a.kind == Kind::Pair) {
                    if (a.left() == s) st.push_back({p, off});
                    if (a.right() == s) st.push_back({p, off + d_.length(a.left())});
                } else {
                    const std::uint64_t step = d_.length(s);
                    for (std::uint64_t c = a.b; c-- > 0;) st.push_back({p, off + c * step});
                }
            }
        }
    }

    /// Calls f(pos) for every occurrence of P in the text, unordered.
    template <class F>
    void for_each_occurrence(std::string_view P, F&& f, QueryStats* stats = nullptr) {
        if (P.empty() || d_.empty() || P.size() > d_.length(d_.root())) return;
        if (P.size() == 1) {
            auto c = d_.find(Assignment::chr(static_cast<unsigned char>(P[0])));
            if (c) for_each_vocc(*c, f, stats);
            return;
        }
        const std::uint64_t m = P.size();
        for (const PrimaryOcc& o : primary_occurrences(P, stats)) {
            const Assignment& a = d_.assignment(o.sig);
            std::uint64_t copies = 1, step = 0;
            if (a.kind == Kind::Run) {
                // the pattern also starts at o.offset + c*|val(base)| while it fits
                step = d_.length(a.a);
                copies = (d_.length(o.sig) - (o.offset + m - 1)) / step + 1;
            }
            for_each_vocc(
                o.sig,
                [&](std::uint64_t k) {
                    for (std::uint64_t c = 0; c < copies; ++c) f(o.offset + k - 1 + c * step);
                },
                stats);
        }
    }

    std::vector<std::uint64_t> occurrences(std::string_view P, QueryStats* stats = nullptr) {
        std::vector<std::uint64_t> out;
        for_each_occurrence(P, [&](std::uint64_t k) { out.push_back(k); }, stats);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Bijection with the Pair/Run nodes, axis orders and refcounts, and the plane.
    void audit() const {
        std::map<AxisKey, std::uint32_t> xr, yr;
        std::size_t pts = 0;
        d_.for_each([&](Signature e) {
            auto it = entries_.find(e);
            if (it == entries_.end()) fail(Errc::internal_error, "index: node without an entry");
            ++xr[{e, 1}];
            ++yr[{e, 1}];
            auto pk = point_keys(e);
            if (pk) {
                ++pts;
                ++xr[pk->first];
                ++yr[pk->second];
                if (!it->second.px || it->second.px->key != pk->first || it->second.py->key != pk->second)
                    fail(Errc::internal_error, "index: point keys disagree with the assignment");
                if (!plane_.contains(e)) fail(Errc::internal_error, "index: point missing from the plane");
            } else if (it->second.px) {
                fail(Errc::internal_error, "index: point for a node without a split");
            }
        });
        if (entries_.size() != d_.size()) fail(Errc::internal_error, "index: entry count mismatch");
        if (pts != plane_.size()) fail(Errc::internal_error, "index: plane size mismatch");
        xs_.audit(xr);
        ys_.audit(yr);
        plane_.audit();
    }

    /// Axis sequences and point set, for comparison against a fresh build.
    struct Snapshot {
        std::vector<AxisKey> xs, ys;
        std::vector<std::tuple<Signature, AxisKey, AxisKey>> points;
        bool operator==(const Snapshot&) const = default;
    };
    Snapshot snapshot() const {
        Snapshot s{xs_.keys(), ys_.keys(), {}};
        for (const auto& [e, en] : entries_)
            if (en.px) s.points.emplace_back(e, en.px->key, en.py->key);
        return s;
    }

private:
    struct Entry {
        XAxis::Elem* own_x = nullptr;
        YAxis::Elem* own_y = nullptr;
        XAxis::Elem* px = nullptr;
        YAxis::Elem* py = nullptr;
    };

    // P encoded into the store without notifying the index; removed again on exit.
    struct TempPattern {
        SignatureDag& d;
        SignatureDag::MuteGuard mute;
        Signature sig;
        TempPattern(SignatureDag& dd, std::string_view P) : d(dd), mute(dd), sig(encode_text_linear(dd, P)) {
            d.pin(sig);
        }
        ~TempPattern() {
            d.unpin(sig);
            d.collect();
        }
    };

    Signature left_of(Signature e) const {
        const Assignment& a = d_.assignment(e);
        return a.kind == Kind::Pair ? a.left() : a.a;
    }

    // (left, right) of the point owned by e, if e has a split
    std::optional<std::pair<AxisKey, AxisKey>> point_keys(Signature e) const {
        const Assignment& a = d_.assignment(e);
        if (a.kind == Kind::Pair) return std::make_pair(AxisKey{a.left(), 1}, AxisKey{a.right(), 1});
        if (a.kind == Kind::Run && a.b >= 2) return std::make_pair(AxisKey{a.a, 1}, AxisKey{a.a, a.b - 1});
        return std::nullopt;
    }

    std::vector<std::uint64_t> splits(std::string_view P) {
        std::vector<std::uint64_t> out;
        if (opt_.all_splits) {
            for (std::uint64_t j = 1; j < P.size(); ++j) out.push_back(j);
            return out;
        }
        if (std::all_of(P.begin(), P.end(), [&](char c) { return c == P[0]; })) return {1};
        // boundaries between different symbols of Uniq(P)
        CommonSequence cs = uniq_of_string(d_, P);
        std::uint64_t pos = 0;
        for (std::size_t i = 0; i < cs.pow_runs.size(); ++i) {
            const Run& r = cs.pow_runs[i];
            pos += d_.length(static_cast<Signature>(r.sym)) * r.exp;
            if (i + 1 < cs.pow_runs.size() && cs.pow_runs[i + 1].sym != r.sym) out.push_back(pos);
        }
        check(pos == P.size(), "common sequence does not spell the pattern");
        return out;
    }

    std::optional<Ranges> ranges_for(Signature p, std::string_view P, std::uint64_t j, QueryStats* stats) const {
        const std::uint64_t m = P.size();
        // val(s)^R against P[..j]^R
        auto cx = [&](const XAxis::Elem& el) {
            const Signature s = el.key.sig;
            std::uint64_t l = detail::lce_walk<true>(d_, s, 1, 0, p, 1, m - j, stats);
            if (l >= j) return 0;
            if (l >= d_.length(s)) return -1;
            ItemWalker<true> w(d_, s, 1, stats);
            w.seek(l);
            return w.next_char() < static_cast<unsigned char>(P[j - 1 - l]) ? -1 : 1;
        };
        // val(s)^c against P[j+1..]
        auto cy = [&](const YAxis::Elem& el) {
            const Signature s = el.key.sig;
            const std::uint64_t c = el.key.count;
            std::uint64_t l = detail::lce_walk<false>(d_, s, c, 0, p, 1, j, stats);
            if (l >= m - j) return 0;
            if (l >= d_.length(s) * c) return -1;
            ItemWalker<false> w(d_, s, c, stats);
            w.seek(l);
            return w.next_char() < static_cast<unsigned char>(P[j + l]) ? -1 : 1;
        };
        auto xr = xs_.range(cx);
        if (!xr) return std::nullopt;
        auto yr = ys_.range(cy);
        if (!yr) return std::nullopt;
        return Ranges{xr->first, xr->second, yr->first, yr->second};
    }

    SignatureDag& d_;
    IndexOptions opt_;
    QueryStats maint_;
    XAxis xs_;
    YAxis ys_;
    RangeTree plane_;
    std::map<Signature, Entry> entries_;
    std::size_t last_splits_ = 0;
};

/// Loads an SLP into an empty store as it is (one Pair node per rule) and
/// makes X_n the root. Returns the signature of every variable (index 0 unused).
inline std::vector<Signature> load_slp_grammar(SignatureDag& d, const Slp& s) {
    s.validate();
    if (!d.empty() || d.size() != 0) fail(Errc::invalid_input, "load_slp_grammar needs an empty store");
    std::vector<Signature> v(s.n() + 1, kNone);
    for (std::uint32_t i = 1; i <= s.n(); ++i) {
        const SlpRule& x = s.rule(i);
        v[i] = x.chr ? d.char_sig(x.c) : d.sig_of(Assignment::pair(v[x.l], v[x.r]));
    }
    d.set_root(v[s.n()]);
    d.collect();
    return v;
}

}  // namespace sigdex

#endif
