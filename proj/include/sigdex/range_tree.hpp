#ifndef SIGDEX_RANGE_TREE_HPP
#define SIGDEX_RANGE_TREE_HPP

// Dynamic 2D orthogonal range reporting over order-maintained labels.
//
// Points carry pointers to their x and y labels. Labels may be rewritten by
// the owner as long as relative order never changes, so the structure never
// has to be told about relabelling. The tree is a scapegoat tree over
// (x label, id) whose nodes keep the y-sorted set of their subtree.

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"

namespace sigdex {

class RangeTree {
public:
    using Id = std::uint64_t;

    RangeTree() = default;
    RangeTree(const RangeTree&) = delete;
    RangeTree& operator=(const RangeTree&) = delete;

    std::size_t size() const { return pts_.size(); }
    bool contains(Id id) const { return pts_.count(id) != 0; }

    void insert(Id id, const std::uint64_t* xl, const std::uint64_t* yl) {
        if (pts_.count(id)) fail(Errc::internal_error, "range tree: duplicate point");
        auto owned = std::make_unique<Point>(Point{id, xl, yl});
        Point* p = owned.get();
        pts_.emplace(id, std::move(owned));

        std::vector<Node*> path;
        Node** slot = &root_;
        while (*slot) {
            Node* n = *slot;
            path.push_back(n);
            n->ys.insert(p);
            ++n->size;
            slot = x_less(p, n->p) ? &n->l : &n->r;
        }
        *slot = new_node(p);
        max_size_ = std::max(max_size_, size());
        if (path.size() + 1 > depth_limit(size())) {
            // scapegoat: deepest ancestor whose heavier child is too heavy
            std::size_t child = 1;
            for (std::size_t i = path.size(); i-- > 0;) {
                Node* n = path[i];
                if (static_cast<double>(child) > kAlpha * static_cast<double>(n->size)) {
                    Node** at = i == 0 ? &root_ : (path[i - 1]->l == n ? &path[i - 1]->l : &path[i - 1]->r);
                    *at = rebuild(n);
                    break;
                }
                child = n->size;
            }
        }
    }

    void erase(Id id) {
        auto it = pts_.find(id);
        if (it == pts_.end()) fail(Errc::internal_error, "range tree: erase of a missing point");
        Point* p = it->second.get();
        Node** slot = &root_;
        while (*slot && (*slot)->p != p) {
            Node* n = *slot;
            n->ys.erase(p);
            --n->size;
            slot = x_less(p, n->p) ? &n->l : &n->r;
        }
        if (!*slot) fail(Errc::internal_error, "range tree: point not found on its search path");
        Node* n = *slot;
        n->ys.erase(p);
        --n->size;
        if (!n->l || !n->r) {
            *slot = n->l ? n->l : n->r;
            delete n;
        } else {
            // pull the successor's point up into n
            Node** s = &n->r;
            while ((*s)->l) s = &(*s)->l;
            Point* q = (*s)->p;
            for (Node* m = n->r; m != *s; m = m->l) {
                m->ys.erase(q);
                --m->size;
            }
            Node* gone = *s;
            *s = gone->r;
            delete gone;
            n->p = q;
        }
        pts_.erase(it);
        if (static_cast<double>(size()) < kAlpha * static_cast<double>(max_size_)) {
            if (root_) root_ = rebuild(root_);
            max_size_ = size();
        }
    }

    /// Ids of points with x in [x1, x2] and y in [y1, y2] (labels, inclusive).
    std::vector<Id> report(std::uint64_t x1, std::uint64_t x2, std::uint64_t y1, std::uint64_t y2) const {
        std::vector<Id> out;
        if (x1 > x2 || y1 > y2) return out;
        Query q{x1, x2, y1, y2, &out};
        walk(root_, false, false, q);
        return out;
    }

    /// Checks ordering, sizes and the per-node y sets.
    void audit() const {
        std::size_t n = check(root_, nullptr, nullptr);
        if (n != pts_.size()) fail(Errc::internal_error, "range tree: size mismatch");
    }

    ~RangeTree() { destroy(root_); }

private:
    struct Point {
        Id id;
        const std::uint64_t* xl;
        const std::uint64_t* yl;
    };
    struct YLess {
        using is_transparent = void;
        bool operator()(const Point* a, const Point* b) const {
            return *a->yl != *b->yl ? *a->yl < *b->yl : a->id < b->id;
        }
        bool operator()(const Point* a, std::uint64_t y) const { return *a->yl < y; }
        bool operator()(std::uint64_t y, const Point* a) const { return y < *a->yl; }
    };
    struct Node {
        Point* p;
        Node* l = nullptr;
        Node* r = nullptr;
        std::size_t size = 1;
        std::set<Point*, YLess> ys;
    };
    struct Query {
        std::uint64_t x1, x2, y1, y2;
        std::vector<Id>* out;
    };

    static constexpr double kAlpha = 0.7;

    static bool x_less(const Point* a, const Point* b) {
        return *a->xl != *b->xl ? *a->xl < *b->xl : a->id < b->id;
    }

    static std::size_t depth_limit(std::size_t n) {
        return static_cast<std::size_t>(std::log(static_cast<double>(n) + 1) / std::log(1 / kAlpha)) + 2;
    }

    static Node* new_node(Point* p) {
        Node* n = new Node{p, nullptr, nullptr, 1, {}};
        n->ys.insert(p);
        return n;
    }

    static void flatten(Node* n, std::vector<Node*>& out) {
        std::vector<Node*> st;
        while (n || !st.empty()) {
            while (n) {
                st.push_back(n);
                n = n->l;
            }
            n = st.back();
            st.pop_back();
            out.push_back(n);
            n = n->r;
        }
    }

    static Node* build(std::vector<Node*>& v, std::size_t lo, std::size_t hi) {
        if (lo >= hi) return nullptr;
        std::size_t mid = lo + (hi - lo) / 2;
        Node* n = v[mid];
        n->l = build(v, lo, mid);
        n->r = build(v, mid + 1, hi);
        n->size = hi - lo;
        n->ys.clear();
        n->ys.insert(n->p);
        for (Node* c : {n->l, n->r})
            if (c) n->ys.insert(c->ys.begin(), c->ys.end());
        return n;
    }

    static Node* rebuild(Node* n) {
        std::vector<Node*> v;
        flatten(n, v);
        return build(v, 0, v.size());
    }

    static void emit_range(const Node* n, const Query& q) {
        for (auto it = n->ys.lower_bound(q.y1); it != n->ys.end() && *(*it)->yl <= q.y2; ++it)
            q.out->push_back((*it)->id);
    }

    // lo_ok/hi_ok: every x in this subtree is already known to satisfy x1 <= x (resp. x <= x2)
    static void walk(const Node* n, bool lo_ok, bool hi_ok, const Query& q) {
        while (n) {
            if (lo_ok && hi_ok) {
                emit_range(n, q);
                return;
            }
            std::uint64_t x = *n->p->xl;
            if (!lo_ok && x < q.x1) {
                n = n->r;
                continue;
            }
            if (!hi_ok && x > q.x2) {
                n = n->l;
                continue;
            }
            std::uint64_t y = *n->p->yl;
            if (q.y1 <= y && y <= q.y2) q.out->push_back(n->p->id);
            walk(n->l, lo_ok, true, q);
            n = n->r;
            lo_ok = true;
        }
    }

    static std::size_t check(const Node* n, const Point* lo, const Point* hi) {
        if (!n) return 0;
        if ((lo && !x_less(lo, n->p)) || (hi && !x_less(n->p, hi))) fail(Errc::internal_error, "range tree: x order");
        std::size_t s = 1 + check(n->l, lo, n->p) + check(n->r, n->p, hi);
        if (s != n->size || n->ys.size() != s) fail(Errc::internal_error, "range tree: subtree size");
        std::set<Point*, YLess> want{n->p};
        for (const Node* c : {n->l, n->r})
            if (c) want.insert(c->ys.begin(), c->ys.end());
        if (!std::equal(want.begin(), want.end(), n->ys.begin(), n->ys.end()))
            fail(Errc::internal_error, "range tree: y set mismatch");
        auto prev = n->ys.begin();
        for (auto it = prev; it != n->ys.end(); prev = it++)
            if (it != n->ys.begin() && !YLess{}(*prev, *it)) fail(Errc::internal_error, "range tree: y order");
        return s;
    }

    static void destroy(Node* n) {
        std::vector<Node*> st;
        if (n) st.push_back(n);
        while (!st.empty()) {
            Node* m = st.back();
            st.pop_back();
            if (m->l) st.push_back(m->l);
            if (m->r) st.push_back(m->r);
            delete m;
        }
    }

    Node* root_ = nullptr;
    std::size_t max_size_ = 0;
    std::unordered_map<Id, std::unique_ptr<Point>> pts_;
};

}  // namespace sigdex

#endif
