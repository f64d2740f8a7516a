#ifndef SIGDEX_WALK_HPP
#define SIGDEX_WALK_HPP

// Root-to-position cursors over a signature dag.
//
// ItemWalker walks a string as a sequence of (base, count) items, the form
// used by LCE descent and character streaming. StageWalker enumerates the
// nodes of one stage (Shrink_t or Pow_t) of an encoding.

#include <string>
#include <vector>

#include "dag.hpp"

namespace sigdex {

template <bool Backward>
class ItemWalker {
public:
    /// Walks val(root)^count; `stats` may be null.
    ItemWalker(const SignatureDag& d, Signature root, std::uint64_t count, QueryStats* stats)
        : d_(d), stats_(stats) {
        frames_.push_back({root, count, 0, true, 0});
        visit();
    }

    bool at_end() const { return frames_.empty(); }

    Signature base() const {
        const Frame& f = frames_.back();
        return f.run ? f.node : child(f);
    }
    std::uint64_t count() const {
        const Frame& f = frames_.back();
        return f.run ? f.k - f.c : 1;
    }

    /// Consumes m copies of the current item.
    void consume(std::uint64_t m) {
        Frame& f = frames_.back();
        if (f.run) {
            f.c += m;
            if (f.c < f.k) return;
            frames_.pop_back();
        }
        finish_child();
    }

    /// Replaces the current item's first copy by its expansion.
    bool descend() {
        Signature b = base();
        const Assignment& a = d_.assignment(b);
        if (a.kind == Kind::Char) return false;
        if (a.kind == Kind::Run) {
            frames_.push_back({a.a, a.b, 0, true, 0});
            visit();
        } else {
            frames_.push_back({b, 0, 0, false, 0});
            visit();
            normalize();
        }
        return true;
    }

    /// Positions the walker `off` characters after (or, backward, before) the start.
    void seek(std::uint64_t off) {
        while (off > 0) {
            if (at_end()) fail(Errc::invalid_input, "position out of range");
            std::uint64_t len = d_.length(base()), cnt = count();
            if (off >= len * cnt) {
                off -= len * cnt;
                consume(cnt);
                continue;
            }
            std::uint64_t skip = off / len;
            if (skip) consume(skip);
            off -= skip * len;
            if (off) descend();
        }
    }

    /// Next character; the walker must not be at the end.
    unsigned char next_char() {
        while (d_.kind(base()) != Kind::Char) descend();
        auto c = static_cast<unsigned char>(d_.assignment(base()).a);
        consume(1);
        return c;
    }

    /// Appends up to `limit` characters; returns how many were appended.
    std::uint64_t take(std::string& out, std::uint64_t limit) {
        std::uint64_t got = 0;
        while (got < limit && !at_end()) {
            Signature b = base();
            if (d_.kind(b) == Kind::Char) {
                std::uint64_t m = std::min(count(), limit - got);
                out.append(m, static_cast<char>(d_.assignment(b).a));
                got += m;
                consume(m);
            } else {
                descend();
            }
        }
        return got;
    }

private:
    struct Frame {
        Signature node;  // run base for run frames, the pair otherwise
        std::uint64_t k;
        std::uint64_t c;
        bool run;
        int side;
    };

    Signature child(const Frame& f) const {
        const Assignment& a = d_.assignment(f.node);
        bool first = f.side == 0;
        return (first != Backward) ? a.left() : a.right();
    }

    // A pair child that is a run becomes a run frame so items stay (base, count).
    void normalize() {
        Frame& f = frames_.back();
        if (f.run) return;
        Signature c = child(f);
        const Assignment& a = d_.assignment(c);
        if (a.kind == Kind::Run) {
            frames_.push_back({a.a, a.b, 0, true, 0});
            visit();
        }
    }

    void finish_child() {
        while (!frames_.empty()) {
            Frame& f = frames_.back();
            if (f.run) {
                if (++f.c < f.k) return;
                frames_.pop_back();
            } else if (f.side == 0) {
                f.side = 1;
                normalize();
                return;
            } else {
                frames_.pop_back();
            }
        }
    }

    void visit() {
        if (stats_) ++stats_->nodes_visited;
    }

    const SignatureDag& d_;
    QueryStats* stats_;
    std::vector<Frame> frames_;
};

/// val(e)[i..j], 1-based inclusive.
inline std::string expand(const SignatureDag& d, Signature e, std::uint64_t i, std::uint64_t j,
                          QueryStats* stats = nullptr) {
    if (i < 1 || i > j || j > d.length(e)) fail(Errc::invalid_input, "expand: range out of bounds");
    ItemWalker<false> w(d, e, 1, stats);
    w.seek(i - 1);
    std::string out;
    out.reserve(j - i + 1);
    w.take(out, j - i + 1);
    return out;
}

inline std::string expand(const SignatureDag& d, Signature e) { return expand(d, e, 1, d.length(e)); }

/// Character at 1-based position i of val(e)^count.
inline unsigned char char_at(const SignatureDag& d, Signature e, std::uint64_t count, std::uint64_t i,
                             QueryStats* stats = nullptr) {
    ItemWalker<false> w(d, e, count, stats);
    w.seek(i - 1);
    return w.next_char();
}

class StageWalker {
public:
    StageWalker(const SignatureDag& d, Signature base, std::uint64_t count, QueryStats* stats)
        : d_(d), base_(base), count_(count), blen_(d.length(base)), stats_(stats) {
        path_.reserve(64);
    }

    /// Moves to the stage-s node containing 0-based offset pos.
    void seek(std::uint64_t pos, std::uint32_t s) {
        if (pos >= blen_ * count_) fail(Errc::invalid_input, "stage seek out of range");
        stage_ = s;
        while (!path_.empty()) {
            const Frame& top = path_.back();
            bool in = pos >= top.start && pos < top.start + d_.length(top.sig);
            if (in && d_.stage(top.sig) > s) break;
            if (in && (path_.size() == 1 || d_.stage(path_[path_.size() - 2].sig) > s)) return;
            path_.pop_back();
        }
        if (path_.empty()) push(base_, pos / blen_ * blen_);
        while (d_.stage(path_.back().sig) > s) {
            const Frame f = path_.back();
            const Assignment& a = d_.assignment(f.sig);
            if (a.kind == Kind::Pair) {
                std::uint64_t ll = d_.length(a.left());
                if (pos < f.start + ll)
                    push(a.left(), f.start);
                else
                    push(a.right(), f.start + ll);
            } else if (a.kind == Kind::Run) {
                std::uint64_t bl = d_.length(a.a);
                push(a.a, f.start + (pos - f.start) / bl * bl);
            } else {
                break;
            }
        }
    }

    Signature node() const { return path_.back().sig; }
    /// 0-based start offset of node().
    std::uint64_t start() const { return path_.back().start; }
    std::uint64_t end() const { return start() + d_.length(node()); }

    /// Moves to the next node of the current stage; false at the end.
    bool next() { return step(true); }
    bool prev() { return step(false); }

private:
    struct Frame {
        Signature sig;
        std::uint64_t start;
    };

    void push(Signature s, std::uint64_t start) {
        path_.push_back({s, start});
        if (stats_) ++stats_->nodes_visited;
    }

    bool step(bool fwd) {
        Frame cur = path_.back();
        path_.pop_back();
        for (;;) {
            if (path_.empty()) {
                std::uint64_t c = cur.start / blen_;
                if (fwd ? c + 1 >= count_ : c == 0) {
                    path_.push_back(cur);
                    return false;
                }
                push(base_, fwd ? cur.start + blen_ : cur.start - blen_);
                break;
            }
            const Frame parent = path_.back();
            const Assignment& a = d_.assignment(parent.sig);
            if (a.kind == Kind::Pair) {
                bool is_left = cur.start == parent.start;
                if (fwd && is_left) {
                    push(a.right(), parent.start + d_.length(a.left()));
                    break;
                }
                if (!fwd && !is_left) {
                    push(a.left(), parent.start);
                    break;
                }
            } else {
                std::uint64_t bl = d_.length(a.a);
                std::uint64_t c = (cur.start - parent.start) / bl;
                if (fwd ? c + 1 < a.b : c > 0) {
                    push(a.a, fwd ? cur.start + bl : cur.start - bl);
                    break;
                }
            }
            cur = parent;
            path_.pop_back();
        }
        // restore the path and descend to the first (or last) node of the stage
        while (d_.stage(path_.back().sig) > stage_) {
            const Frame f = path_.back();
            const Assignment& a = d_.assignment(f.sig);
            if (a.kind == Kind::Pair) {
                if (fwd)
                    push(a.left(), f.start);
                else
                    push(a.right(), f.start + d_.length(a.left()));
            } else if (a.kind == Kind::Run) {
                std::uint64_t bl = d_.length(a.a);
                push(a.a, fwd ? f.start : f.start + (a.b - 1) * bl);
            } else {
                break;
            }
        }
        return true;
    }

    const SignatureDag& d_;
    Signature base_;
    std::uint64_t count_;
    std::uint64_t blen_;
    QueryStats* stats_;
    std::uint32_t stage_ = 0;
    std::vector<Frame> path_;
};

}  // namespace sigdex

#endif
