#ifndef SIGDEX_ENGINE_HPP
#define SIGDEX_ENGINE_HPP

// Dynamic text over a signature encoding: insert, copy-insert, delete.

#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dag.hpp"
#include "encoder.hpp"
#include "lce.hpp"
#include "walk.hpp"

namespace sigdex {

/// A symbol of some stage, possibly repeated (runs at shrink stages).
struct Item {
    Signature sym = kNone;
    std::uint64_t exp = 1;
    std::uint32_t stage = 0;
};

namespace detail {

inline void append_items(const SignatureDag& d, const CommonSequence& cs, std::vector<Item>& out) {
    for (const Run& r : cs.pow_runs) {
        auto s = static_cast<Signature>(r.sym);
        out.push_back({s, r.exp, d.stage(s)});
    }
}

// Stage-s symbols next to items[from] walking away from it (leftwards when
// !fwd); stops after `need` symbols or at the text end.
inline std::vector<Signature> stage_context(const SignatureDag& d, const std::vector<Item>& items, std::size_t from,
                                            bool fwd, std::uint32_t s, std::size_t need, QueryStats* stats) {
    std::vector<Signature> out;
    std::size_t k = from;
    while (out.size() < need) {
        if (fwd ? k >= items.size() : k == 0) break;
        const Item& it = fwd ? items[k++] : items[--k];
        if (it.stage == s) {
            out.push_back(it.sym);
            continue;
        }
        check(it.stage > s, "item below the current stage");
        StageWalker w(d, it.sym, it.exp, stats);
        w.seek(fwd ? 0 : d.length(it.sym) * it.exp - 1, s);
        out.push_back(w.node());
        while (out.size() < need && (fwd ? w.next() : w.prev())) out.push_back(w.node());
    }
    if (!fwd) std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Builds the tower of the text spelled by `items` (each a whole subtree of
/// the final encoding or an explicit symbol) and returns its root.
inline Signature assemble(SignatureDag& d, std::vector<Item> items, QueryStats* stats = nullptr) {
    check(!items.empty(), "assemble of nothing");
    const ParseParams& pp = d.params();
    for (std::uint32_t s = 0;; ++s) {
        std::vector<Item> out;
        out.reserve(items.size());
        if (s % 2 == 0) {
            for (const Item& it : items) {
                check(it.stage >= s, "item below the current stage");
                if (it.stage == s && !out.empty() && out.back().stage == s && out.back().sym == it.sym)
                    out.back().exp += it.exp;
                else
                    out.push_back(it);
            }
            for (Item& it : out)
                if (it.stage == s) it = {d.sig_of(Assignment::run(it.sym, it.exp)), 1, s + 1};
            items.swap(out);
            continue;
        }
        if (items.size() == 1 && items[0].stage == s) return items[0].sym;
        for (std::size_t i = 0; i < items.size();) {
            if (items[i].stage != s) {
                check(items[i].stage > s, "item below the current stage");
                out.push_back(items[i++]);
                continue;
            }
            std::size_t g0 = i;
            while (i < items.size() && items[i].stage == s) ++i;
            auto left = detail::stage_context(d, items, g0, false, s, pp.delta_l, stats);
            auto right = detail::stage_context(d, items, i, true, s, 2 * pp.delta_r + 1, stats);
            std::vector<Symbol> arr(left.begin(), left.end());
            for (std::size_t k = g0; k < i; ++k) {
                check(items[k].exp == 1, "exponent at a pow stage");
                arr.push_back(items[k].sym);
            }
            arr.insert(arr.end(), right.begin(), right.end());
            auto bits = boundary_bits(arr, pp);
            const std::size_t off = left.size(), end = off + (i - g0);
            check(bits[off] == 1, "explicit group does not start a block");
            if (!right.empty()) check(bits[end] == 1, "explicit group does not end a block");
            std::vector<Signature> syms(arr.begin() + off, arr.begin() + end);
            std::size_t b = 0;
            while (b < syms.size()) {
                std::size_t e = b + 1;
                while (e < syms.size() && !bits[off + e]) ++e;
                out.push_back({d.sig_plus(std::span<const Signature>(syms.data() + b, e - b)), 1, s + 1});
                b = e;
            }
        }
        items.swap(out);
    }
}

struct InsertOp {
    std::string text;
    std::uint64_t pos;
};
struct CopyOp {
    std::uint64_t src, len, pos;
};
struct DeleteOp {
    std::uint64_t pos, len;
};
using EditOp = std::variant<InsertOp, CopyOp, DeleteOp>;

class Engine {
public:
    explicit Engine(EngineConfig cfg = {}) : cfg_(std::move(cfg)), dag_(cfg_.M()) {}
    Engine(EngineConfig cfg, SignatureDag dag) : cfg_(std::move(cfg)), dag_(std::move(dag)) {
        if (cfg_.M() != dag_.M()) fail(Errc::invalid_input, "config and dag disagree on M");
    }

    const EngineConfig& config() const { return cfg_; }
    SignatureDag& dag() { return dag_; }
    const SignatureDag& dag() const { return dag_; }
    Signature root() const { return dag_.root(); }
    bool empty() const { return dag_.empty(); }
    std::uint64_t size() const { return empty() ? 0 : dag_.length(dag_.root()); }
    std::string text() const { return empty() ? std::string() : expand(dag_, root()); }

    /// Statistics of the last edit (visits plus created/removed signatures).
    const QueryStats& last_stats() const { return last_; }

    void insert(std::string_view y, std::uint64_t i) {
        const std::uint64_t n = size();
        if (i < 1 || i > n + 1) fail(Errc::invalid_input, "insert: position out of range");
        if (y.empty()) return;
        check_capacity(n + y.size());
        for (unsigned char c : y)
            if (!cfg_.allows(c)) fail(Errc::invalid_input, "character outside the alphabet");
        Op op(*this);
        std::vector<Item> items;
        if (i > 1) detail::append_items(dag_, uniq_of_substring(dag_, root(), 1, i - 1, &last_), items);
        detail::append_items(dag_, uniq_of_string(dag_, y), items);
        if (i <= n) detail::append_items(dag_, uniq_of_substring(dag_, root(), i, n - i + 1, &last_), items);
        op.finish(assemble(dag_, std::move(items), &last_));
    }

    void insert_copy(std::uint64_t j, std::uint64_t y, std::uint64_t i) {
        const std::uint64_t n = size();
        if (y == 0) return;
        if (j < 1 || j - 1 + y > n) fail(Errc::invalid_input, "insert_copy: source out of range");
        if (i < 1 || i > n + 1) fail(Errc::invalid_input, "insert_copy: position out of range");
        check_capacity(n + y);
        Op op(*this);
        std::vector<Item> items;
        if (i > 1) detail::append_items(dag_, uniq_of_substring(dag_, root(), 1, i - 1, &last_), items);
        detail::append_items(dag_, uniq_of_substring(dag_, root(), j, y, &last_), items);
        if (i <= n) detail::append_items(dag_, uniq_of_substring(dag_, root(), i, n - i + 1, &last_), items);
        op.finish(assemble(dag_, std::move(items), &last_));
    }

    void erase(std::uint64_t j, std::uint64_t y) {
        const std::uint64_t n = size();
        if (y == 0) return;
        if (j < 1 || j - 1 + y > n) fail(Errc::invalid_input, "delete: range out of bounds");
        Op op(*this);
        std::vector<Item> items;
        if (j > 1) detail::append_items(dag_, uniq_of_substring(dag_, root(), 1, j - 1, &last_), items);
        if (j + y <= n) detail::append_items(dag_, uniq_of_substring(dag_, root(), j + y, n - j - y + 1, &last_), items);
        op.finish(items.empty() ? kNone : assemble(dag_, std::move(items), &last_));
    }

    void apply(const EditOp& op) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, InsertOp>)
                    insert(o.text, o.pos);
                else if constexpr (std::is_same_v<T, CopyOp>)
                    insert_copy(o.src, o.len, o.pos);
                else
                    erase(o.pos, o.len);
            },
            op);
    }

    /// Replaces the content by T with chunked inserts.
    void build_naive(std::string_view t) {
        clear();
        check_capacity(t.size());
        const std::uint64_t B = chunk_size(t.size());
        for (std::uint64_t p = 0; p < t.size(); p += B) insert(t.substr(p, B), p + 1);
    }

    /// Replaces the content by T with the level-wise bucket-sorted build.
    void build_linear(std::string_view t) {
        clear();
        if (t.empty()) return;
        Op op(*this);
        op.finish(encode_text_linear(dag_, t));
    }

    void clear() {
        dag_.set_root(kNone);
        dag_.collect();
    }

    std::uint64_t chunk_size(std::uint64_t n) const {
        double v = std::ceil(std::log2(static_cast<double>(std::max<std::uint64_t>(n, 2))) * dag_.params().log_star_w);
        return std::max<std::uint64_t>(64, static_cast<std::uint64_t>(v));
    }

private:
    // Per-edit bookkeeping: counters, new root, collection.
    class Op {
    public:
        explicit Op(Engine& e) : e_(e), c0_(e.dag_.created_total()), r0_(e.dag_.removed_total()) { e_.last_ = {}; }
        void finish(Signature root) {
            e_.dag_.set_root(root);
            e_.dag_.collect();
            e_.last_.signatures_created = e_.dag_.created_total() - c0_;
            e_.last_.signatures_removed = e_.dag_.removed_total() - r0_;
        }

    private:
        Engine& e_;
        std::uint64_t c0_, r0_;
    };

    void check_capacity(std::uint64_t n) const {
        if (n > cfg_.max_text_len) fail(Errc::capacity_exhausted, "text would exceed max_text_len");
    }

    EngineConfig cfg_;
    SignatureDag dag_;
    QueryStats last_;
};

/// Root of T built by chunked inserts into `e`.
inline Signature encode_text(Engine& e, std::string_view t) {
    if (t.empty()) fail(Errc::invalid_input, "cannot encode an empty text");
    e.build_naive(t);
    return e.root();
}

// ---- edit scripts ------------------------------------------------------

inline std::string escape(std::string_view s) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned char c : s) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c > 32 && c < 127) {
            out += static_cast<char>(c);
        } else {
            out += "\\x";
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

inline std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (i + 1 < s.size() && s[i + 1] == '\\') {
            out += '\\';
            ++i;
        } else if (i + 3 < s.size() && s[i + 1] == 'x' && std::isxdigit(static_cast<unsigned char>(s[i + 2])) &&
                   std::isxdigit(static_cast<unsigned char>(s[i + 3]))) {
            out += static_cast<char>(std::stoi(std::string(s.substr(i + 2, 2)), nullptr, 16));
            i += 3;
        } else {
            fail(Errc::format_error, "bad escape sequence");
        }
    }
    return out;
}

inline std::string format_op(const EditOp& op) {
    return std::visit(
        [](const auto& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, InsertOp>)
                return "I " + std::to_string(o.pos) + ' ' + escape(o.text);
            else if constexpr (std::is_same_v<T, CopyOp>)
                return "C " + std::to_string(o.src) + ' ' + std::to_string(o.len) + ' ' + std::to_string(o.pos);
            else
                return "D " + std::to_string(o.pos) + ' ' + std::to_string(o.len);
        },
        op);
}

inline EditOp parse_op(const std::string& line) {
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    auto num = [&]() {
        std::uint64_t v = 0;
        if (!(is >> v)) fail(Errc::format_error, "bad edit line: " + line);
        return v;
    };
    EditOp op;
    if (tag == "I") {
        std::uint64_t p = num();
        std::string rest;
        if (!(is >> rest)) fail(Errc::format_error, "bad edit line: " + line);
        op = InsertOp{unescape(rest), p};
    } else if (tag == "C") {
        std::uint64_t j = num(), y = num(), i = num();
        op = CopyOp{j, y, i};
    } else if (tag == "D") {
        std::uint64_t j = num(), y = num();
        op = DeleteOp{j, y};
    } else {
        fail(Errc::format_error, "unknown edit tag: " + line);
    }
    std::string extra;
    if (is >> extra) fail(Errc::format_error, "trailing data: " + line);
    return op;
}

inline std::vector<EditOp> parse_script(std::istream& in) {
    std::vector<EditOp> ops;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ops.push_back(parse_op(line));
    return ops;
}

}  // namespace sigdex

#endif
