#ifndef SIGDEX_DAG_HPP
#define SIGDEX_DAG_HPP

// The signature store: assignments, reverse dictionary, minimum-free-id
// allocation, lengths, level tags, reference counts and parent lists.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "parse.hpp"

namespace sigdex {

using Signature = std::uint32_t;
inline constexpr Signature kNone = 0;

enum class Kind : std::uint8_t { Char, Pair, Run };

struct Assignment {
    Kind kind = Kind::Char;
    Signature a = 0;      // byte value, left child or run base
    std::uint64_t b = 0;  // right child or exponent

    static Assignment chr(unsigned char c) { return {Kind::Char, c, 0}; }
    static Assignment pair(Signature l, Signature r) { return {Kind::Pair, l, r}; }
    static Assignment run(Signature base, std::uint64_t k) { return {Kind::Run, base, k}; }

    Signature left() const { return a; }
    Signature right() const { return static_cast<Signature>(b); }
    bool operator==(const Assignment&) const = default;
};

/// Level tag (t, shrink|pow). stage() linearises Shrink_0 < Pow_0 < Shrink_1 < ...
struct Level {
    std::uint32_t t = 0;
    bool pow = false;
    std::uint32_t stage() const { return 2 * t + (pow ? 1 : 0); }
    bool operator==(const Level&) const = default;
};

struct EngineConfig {
    std::uint64_t max_text_len = std::uint64_t{1} << 20;
    /// Empty means every byte is allowed.
    std::set<unsigned char> alphabet;
    double c_u = 16, c_a = 64, c_e = 64, c_z = 32, c_s = 64;

    std::uint64_t M() const { return 4 * max_text_len; }
    bool allows(unsigned char c) const { return alphabet.empty() || alphabet.count(c); }
};

struct QueryStats {
    std::uint64_t nodes_visited = 0;
    std::uint64_t dict_lookups = 0;
    std::uint64_t signatures_created = 0;
    std::uint64_t signatures_removed = 0;
};

class DagObserver {
public:
    virtual ~DagObserver() = default;
    virtual void on_signature_added(Signature e) = 0;
    virtual void on_signature_removed(Signature e) = 0;
};

class SignatureDag {
public:
    explicit SignatureDag(std::uint64_t M) : M_(M), params_(ParseParams::for_universe(M)) {
        if (M > 0xFFFFFFFEull) fail(Errc::invalid_input, "universe bound exceeds 32-bit signatures");
        free_[1] = M_;
        nodes_.resize(1);
    }

    SignatureDag(const SignatureDag&) = delete;
    SignatureDag& operator=(const SignatureDag&) = delete;
    SignatureDag(SignatureDag&&) = default;
    SignatureDag& operator=(SignatureDag&&) = default;

    std::uint64_t M() const { return M_; }
    const ParseParams& params() const { return params_; }

    // ---- dictionary -------------------------------------------------------

    std::optional<Signature> find(const Assignment& x) const {
        ++lookups_;
        auto it = reverse_.find(key(x));
        if (it == reverse_.end()) return std::nullopt;
        return it->second;
    }

    Signature sig_of(const Assignment& x) {
        if (auto hit = find(x)) return *hit;
        return create(x);
    }

    /// Left fold of 2..4 signatures into nested pairs.
    Signature sig_plus(std::span<const Signature> xs) {
        if (xs.size() < 2 || xs.size() > 4) fail(Errc::invalid_input, "sig_plus takes 2..4 signatures");
        Signature acc = sig_of(Assignment::pair(xs[0], xs[1]));
        for (std::size_t i = 2; i < xs.size(); ++i) acc = sig_of(Assignment::pair(acc, xs[i]));
        return acc;
    }
    std::optional<Signature> find_plus(std::span<const Signature> xs) const {
        auto acc = find(Assignment::pair(xs[0], xs[1]));
        for (std::size_t i = 2; acc && i < xs.size(); ++i) acc = find(Assignment::pair(*acc, xs[i]));
        return acc;
    }

    Signature char_sig(unsigned char c) { return sig_of(Assignment::chr(c)); }

    // ---- node access ------------------------------------------------------

    bool contains(Signature e) const { return e > 0 && e < nodes_.size() && nodes_[e].live; }
    const Assignment& assignment(Signature e) const { return node(e).asg; }
    Kind kind(Signature e) const { return node(e).asg.kind; }
    std::uint64_t length(Signature e) const { return node(e).len; }
    Level level(Signature e) const { return node(e).lvl; }
    std::uint32_t stage(Signature e) const { return node(e).lvl.stage(); }
    std::uint32_t refcount(Signature e) const { return node(e).refs; }
    const std::vector<Signature>& parents(Signature e) const { return node(e).parents; }
    std::size_t size() const { return live_; }
    /// One past the largest id ever used.
    std::size_t id_bound() const { return nodes_.size(); }

    template <class F>
    void for_each(F&& f) const {
        for (Signature e = 1; e < nodes_.size(); ++e)
            if (nodes_[e].live) f(e);
    }

    // ---- root and reference counts ---------------------------------------

    Signature root() const { return root_; }
    bool empty() const { return root_ == kNone; }

    void set_root(Signature e) {
        if (e != kNone) retain(e);
        Signature old = root_;
        root_ = e;
        if (old != kNone) release(old);
    }

    std::uint32_t retain(Signature e) { return ++mut(e).refs; }

    std::uint32_t release(Signature e) {
        Node& n = mut(e);
        if (n.refs == 0) fail(Errc::internal_error, "release below zero");
        if (--n.refs == 0) pending_.push_back(e);
        return n.refs;
    }

    /// External handle that keeps e (and its subtree) alive.
    void pin(Signature e) {
        retain(e);
        ++pins_[e];
    }
    void unpin(Signature e) {
        auto it = pins_.find(e);
        if (it == pins_.end()) fail(Errc::internal_error, "unpin of an unpinned signature");
        if (--it->second == 0) pins_.erase(it);
        release(e);
    }

    /// Deletes every pending node whose count is zero, cascading to children.
    std::size_t collect() {
        std::size_t removed = 0;
        std::vector<Signature> stack;
        stack.swap(pending_);
        while (!stack.empty()) {
            Signature e = stack.back();
            stack.pop_back();
            if (!contains(e) || nodes_[e].refs > 0 || e == root_) continue;
            remove_node(e, stack);
            ++removed;
        }
        return removed;
    }

    std::size_t remove_useless(Signature from) {
        pending_.push_back(from);
        return collect();
    }

    // ---- observers --------------------------------------------------------

    void set_observer(DagObserver* o) { observer_ = o; }
    DagObserver* observer() const { return observer_; }

    /// Silences the observer while alive (temporary query signatures).
    class MuteGuard {
    public:
        explicit MuteGuard(SignatureDag& d) : d_(d) { ++d_.muted_; }
        ~MuteGuard() { --d_.muted_; }
        MuteGuard(const MuteGuard&) = delete;
        MuteGuard& operator=(const MuteGuard&) = delete;

    private:
        SignatureDag& d_;
    };

    // ---- counters ---------------------------------------------------------

    std::uint64_t created_total() const { return created_; }
    std::uint64_t removed_total() const { return removed_; }
    std::uint64_t lookups_total() const { return lookups_; }

    // ---- audit ------------------------------------------------------------

    /// Full recount of lengths, levels, refcounts, parents and the bijection.
    void audit() const {
        std::vector<std::uint64_t> refs(nodes_.size(), 0);
        std::vector<std::vector<Signature>> par(nodes_.size());
        std::size_t live = 0;
        for_each([&](Signature e) {
            ++live;
            const Node& n = nodes_[e];
            auto it = reverse_.find(key(n.asg));
            if (it == reverse_.end() || it->second != e) fail(Errc::internal_error, "reverse map mismatch");
            for (Signature c : children(n.asg)) {
                if (!contains(c)) fail(Errc::internal_error, "dangling child reference");
                ++refs[c];
            }
            for (Signature c : distinct_children(n.asg)) par[c].push_back(e);
            if (n.len != compute_length(n.asg)) fail(Errc::internal_error, "length mismatch");
            if (!(n.lvl == compute_level(n.asg))) fail(Errc::internal_error, "level tag mismatch");
            if (n.asg.kind == Kind::Run && n.asg.b < 1) fail(Errc::internal_error, "run exponent below one");
        });
        if (live != live_ || reverse_.size() != live_) fail(Errc::internal_error, "node count mismatch");
        if (root_ != kNone) {
            if (!contains(root_)) fail(Errc::internal_error, "root missing");
            ++refs[root_];
        }
        for (auto [e, k] : pins_) refs[e] += k;
        for_each([&](Signature e) {
            const Node& n = nodes_[e];
            if (n.refs != refs[e]) fail(Errc::internal_error, "refcount mismatch");
            if (n.refs == 0) fail(Errc::internal_error, "useless node");
            auto a = n.parents, b = par[e];
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b) fail(Errc::internal_error, "parent list mismatch");
        });
        // free intervals must be the exact complement of the live ids
        std::uint64_t expect = 1;
        for (auto [s, t] : free_) {
            for (std::uint64_t e = expect; e < s; ++e)
                if (!contains(static_cast<Signature>(e))) fail(Errc::internal_error, "id neither live nor free");
            for (std::uint64_t e = s; e <= t && e < nodes_.size(); ++e)
                if (contains(static_cast<Signature>(e))) fail(Errc::internal_error, "live id marked free");
            expect = t + 1;
        }
        for (std::uint64_t e = expect; e <= M_ && e < nodes_.size(); ++e)
            if (!contains(static_cast<Signature>(e))) fail(Errc::internal_error, "id neither live nor free");
        // acyclicity: every child must finish before its parent in a DFS
        std::vector<std::uint8_t> state(nodes_.size(), 0);
        for_each([&](Signature s) {
            if (state[s]) return;
            std::vector<std::pair<Signature, int>> st{{s, 0}};
            state[s] = 1;
            while (!st.empty()) {
                auto& [e, i] = st.back();
                auto ch = children(nodes_[e].asg);
                if (i < static_cast<int>(ch.size())) {
                    Signature c = ch[i++];
                    if (state[c] == 1) fail(Errc::internal_error, "cycle");
                    if (state[c] == 0) {
                        state[c] = 1;
                        st.push_back({c, 0});
                    }
                } else {
                    state[e] = 2;
                    st.pop_back();
                }
            }
        });
    }

    // ---- serialization ----------------------------------------------------

    void serialize(std::ostream& out) const {
        out << "SIGDEX 1 " << M_ << ' ' << root_ << '\n';
        for_each([&](Signature e) {
            const Node& n = nodes_[e];
            out << e << ' ';
            switch (n.asg.kind) {
                case Kind::Char: out << "C " << n.asg.a; break;
                case Kind::Pair: out << "P " << n.asg.a << ' ' << n.asg.b; break;
                case Kind::Run: out << "R " << n.asg.a << ' ' << n.asg.b; break;
            }
            out << " L" << n.lvl.t << ' ' << (n.lvl.pow ? 'W' : 'S') << '\n';
        });
    }

    std::string serialize() const {
        std::ostringstream os;
        serialize(os);
        return os.str();
    }

    static SignatureDag deserialize(std::istream& in) {
        std::string line;
        if (!std::getline(in, line)) fail(Errc::format_error, "missing header");
        std::istringstream hs(line);
        std::string magic;
        int version = 0;
        std::uint64_t M = 0, root = 0;
        if (!(hs >> magic >> version >> M >> root) || magic != "SIGDEX" || version != 1 || !at_end(hs))
            fail(Errc::format_error, "bad header");
        if (M < 2 || M > 0xFFFFFFFEull) fail(Errc::format_error, "bad universe bound");
        struct Raw {
            Assignment asg;
            Level lvl;
        };
        std::map<Signature, Raw> raw;
        Signature last = 0;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::uint64_t id = 0, a = 0, b = 0;
            std::string tag, ltag, sw;
            if (!(ls >> id >> tag)) fail(Errc::format_error, "line " + std::to_string(lineno));
            Assignment asg;
            if (tag == "C") {
                if (!(ls >> a) || a > 255) fail(Errc::format_error, "bad char line " + std::to_string(lineno));
                asg = Assignment::chr(static_cast<unsigned char>(a));
            } else if (tag == "P" || tag == "R") {
                if (!(ls >> a >> b)) fail(Errc::format_error, "bad line " + std::to_string(lineno));
                if (a == 0 || a > M || (tag == "P" && (b == 0 || b > M)) || (tag == "R" && b == 0))
                    fail(Errc::format_error, "bad reference on line " + std::to_string(lineno));
                asg = tag == "P" ? Assignment::pair(static_cast<Signature>(a), static_cast<Signature>(b))
                                 : Assignment::run(static_cast<Signature>(a), b);
            } else {
                fail(Errc::format_error, "unknown tag on line " + std::to_string(lineno));
            }
            if (!(ls >> ltag >> sw) || ltag.size() < 2 || ltag[0] != 'L' || (sw != "S" && sw != "W") || !at_end(ls))
                fail(Errc::format_error, "bad level tag on line " + std::to_string(lineno));
            Level lvl;
            try {
                std::size_t used = 0;
                lvl.t = static_cast<std::uint32_t>(std::stoul(ltag.substr(1), &used));
                if (used + 1 != ltag.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                fail(Errc::format_error, "bad level on line " + std::to_string(lineno));
            }
            lvl.pow = sw == "W";
            if (id == 0 || id > M || id <= last) fail(Errc::format_error, "ids must ascend within [1..M]");
            last = static_cast<Signature>(id);
            raw[last] = {asg, lvl};
        }
        SignatureDag d(M);
        // create children first; ids are recycled so file order is not topological
        std::map<Signature, std::uint8_t> state;
        for (auto& [id0, r0] : raw) {
            if (state[id0]) continue;
            std::vector<std::pair<Signature, int>> st{{id0, 0}};
            state[id0] = 1;
            while (!st.empty()) {
                auto& [e, i] = st.back();
                const Raw& r = raw.at(e);
                auto ch = children(r.asg);
                if (i < static_cast<int>(ch.size())) {
                    Signature c = ch[i++];
                    if (!raw.count(c)) fail(Errc::format_error, "dangling reference to " + std::to_string(c));
                    if (state[c] == 1) fail(Errc::format_error, "cycle through " + std::to_string(c));
                    if (state[c] == 0) {
                        state[c] = 1;
                        st.push_back({c, 0});
                    }
                } else {
                    if (d.reverse_.count(key(r.asg))) fail(Errc::format_error, "duplicate assignment");
                    d.create_at(e, r.asg);
                    if (!(d.nodes_[e].lvl == r.lvl)) fail(Errc::format_error, "level tag mismatch at " + std::to_string(e));
                    state[e] = 2;
                    st.pop_back();
                }
            }
        }
        d.pending_.clear();
        if (root != 0) {
            if (!d.contains(static_cast<Signature>(root))) fail(Errc::format_error, "root not defined");
            d.set_root(static_cast<Signature>(root));
        }
        bool useless = false;
        d.for_each([&](Signature e) { useless |= d.nodes_[e].refs == 0; });
        if (useless) fail(Errc::format_error, "unreferenced node");
        return d;
    }

    static SignatureDag deserialize(const std::string& s) {
        std::istringstream is(s);
        return deserialize(is);
    }

    static std::vector<Signature> children(const Assignment& a) {
        switch (a.kind) {
            case Kind::Char: return {};
            case Kind::Pair: return {a.left(), a.right()};
            case Kind::Run: return {a.a};
        }
        return {};
    }

private:
    struct Node {
        Assignment asg;
        std::uint64_t len = 0;
        Level lvl;
        std::uint32_t refs = 0;
        bool live = false;
        std::vector<Signature> parents;
    };

    using Key = std::pair<std::uint64_t, std::uint64_t>;
    static Key key(const Assignment& x) {
        return {(static_cast<std::uint64_t>(x.kind) << 32) | x.a, x.b};
    }

    static bool at_end(std::istream& is) {
        std::string rest;
        return !(is >> rest);
    }

    static std::vector<Signature> distinct_children(const Assignment& a) {
        auto c = children(a);
        if (c.size() == 2 && c[0] == c[1]) c.pop_back();
        return c;
    }

    [[noreturn, gnu::noinline, gnu::cold]] static void unknown(Signature e) {
        fail(Errc::invalid_input, "unknown signature " + std::to_string(e));
    }
    const Node& node(Signature e) const {
        if (!contains(e)) [[unlikely]]
            unknown(e);
        return nodes_[e];
    }
    Node& mut(Signature e) {
        if (!contains(e)) [[unlikely]]
            unknown(e);
        return nodes_[e];
    }

    std::uint64_t compute_length(const Assignment& x) const {
        switch (x.kind) {
            case Kind::Char: return 1;
            case Kind::Pair: return nodes_[x.left()].len + nodes_[x.right()].len;
            case Kind::Run: return nodes_[x.a].len * x.b;
        }
        return 0;
    }

    Level compute_level(const Assignment& x) const {
        switch (x.kind) {
            case Kind::Char: return {0, false};
            case Kind::Run: return {nodes_[x.a].lvl.t, true};
            case Kind::Pair: {
                Level r = nodes_[x.right()].lvl;
                if (r.pow) return {r.t + 1, false};
                return {std::max(nodes_[x.left()].lvl.t, r.t) + 1, false};
            }
        }
        return {};
    }

    Signature create(const Assignment& x) {
        if (free_.empty()) fail(Errc::capacity_exhausted, "no free signature below M");
        auto it = free_.begin();
        Signature e = static_cast<Signature>(it->first);
        create_at(e, x);
        return e;
    }

    void create_at(Signature e, const Assignment& x) {
        for (Signature c : children(x))
            if (!contains(c)) fail(Errc::invalid_input, "assignment refers to an unknown signature");
        if (x.kind == Kind::Run && x.b < 1) fail(Errc::invalid_input, "run exponent must be positive");
        take_id(e);
        if (nodes_.size() <= e) nodes_.resize(static_cast<std::size_t>(e) + 1);
        Node& n = nodes_[e];
        n.asg = x;
        n.len = compute_length(x);
        n.lvl = compute_level(x);
        n.refs = 0;
        n.live = true;
        n.parents.clear();
        for (Signature c : children(x)) ++nodes_[c].refs;
        for (Signature c : distinct_children(x)) nodes_[c].parents.push_back(e);
        reverse_[key(x)] = e;
        ++live_;
        ++created_;
        pending_.push_back(e);
        if (observer_ && !muted_) observer_->on_signature_added(e);
    }

    void remove_node(Signature e, std::vector<Signature>& stack) {
        if (observer_ && !muted_) observer_->on_signature_removed(e);
        Node& n = nodes_[e];
        reverse_.erase(key(n.asg));
        for (Signature c : distinct_children(n.asg)) {
            auto& p = nodes_[c].parents;
            p.erase(std::find(p.begin(), p.end(), e));
        }
        for (Signature c : children(n.asg)) {
            if (--nodes_[c].refs == 0) stack.push_back(c);
        }
        n.live = false;
        n.parents.clear();
        n.parents.shrink_to_fit();
        --live_;
        ++removed_;
        give_id(e);
    }

    void take_id(Signature e) {
        auto it = free_.upper_bound(e);
        if (it == free_.begin()) fail(Errc::internal_error, "id not free");
        --it;
        auto [s, t] = *it;
        if (e > t) fail(Errc::internal_error, "id not free");
        free_.erase(it);
        if (s < e) free_[s] = e - 1;
        if (e < t) free_[static_cast<std::uint64_t>(e) + 1] = t;
    }

    void give_id(Signature e) {
        std::uint64_t s = e, t = e;
        auto next = free_.find(static_cast<std::uint64_t>(e) + 1);
        if (next != free_.end()) {
            t = next->second;
            free_.erase(next);
        }
        auto it = free_.lower_bound(e);
        if (it != free_.begin()) {
            auto prev = std::prev(it);
            if (prev->second + 1 == e) {
                s = prev->first;
                free_.erase(prev);
            }
        }
        free_[s] = t;
    }

    std::uint64_t M_;
    ParseParams params_;
    std::vector<Node> nodes_;
    std::map<Key, Signature> reverse_;
    std::map<std::uint64_t, std::uint64_t> free_;  // start -> end of maximal free intervals
    std::map<Signature, std::uint32_t> pins_;
    std::vector<Signature> pending_;
    Signature root_ = kNone;
    std::size_t live_ = 0;
    std::uint64_t created_ = 0, removed_ = 0;
    mutable std::uint64_t lookups_ = 0;
    DagObserver* observer_ = nullptr;
    int muted_ = 0;
};

/// Structure of the dag below root with ids renumbered in DFS post-order.
inline std::vector<std::string> canonical_form(const SignatureDag& d, Signature root) {
    std::vector<std::string> out;
    if (root == kNone) return out;
    std::unordered_map<Signature, std::size_t> id;
    std::vector<std::pair<Signature, int>> st{{root, 0}};
    while (!st.empty()) {
        auto& [e, i] = st.back();
        if (id.count(e)) {
            st.pop_back();
            continue;
        }
        auto ch = SignatureDag::children(d.assignment(e));
        if (i < static_cast<int>(ch.size())) {
            Signature c = ch[i++];
            if (!id.count(c)) st.push_back({c, 0});
            continue;
        }
        const Assignment& a = d.assignment(e);
        std::string s;
        switch (a.kind) {
            case Kind::Char: s = "C " + std::to_string(a.a); break;
            case Kind::Pair: s = "P " + std::to_string(id.at(a.left())) + ' ' + std::to_string(id.at(a.right())); break;
            case Kind::Run: s = "R " + std::to_string(id.at(a.a)) + ' ' + std::to_string(a.b); break;
        }
        id[e] = out.size() + 1;
        out.push_back(std::move(s));
        st.pop_back();
    }
    return out;
}

}  // namespace sigdex

#endif
