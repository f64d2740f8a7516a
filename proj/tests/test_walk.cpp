#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sigdex/encoder.hpp"
#include "sigdex/walk.hpp"

using namespace sigdex;

namespace {

// Every level of the tower as flat symbol lists, built with the plain level functions.
std::vector<std::vector<Signature>> tower(SignatureDag& d, const std::string& t) {
    std::vector<std::vector<Signature>> out;
    LevelSeq cur{{0, false}, {}};
    for (unsigned char c : t) push_run(cur.seq, {d.char_sig(c), 1});
    auto flat = [](const LevelSeq& l) {
        std::vector<Signature> v;
        for (const Run& r : l.seq)
            for (std::uint64_t k = 0; k < r.exp; ++k) v.push_back(static_cast<Signature>(r.sym));
        return v;
    };
    for (;;) {
        out.push_back(flat(cur));
        LevelSeq pw = pow_level(d, cur);
        out.push_back(flat(pw));
        if (pw.seq.size() == 1) break;
        cur = shrink_level(d, pw);
    }
    return out;
}

}  // namespace

TEST(StageWalker, EnumeratesEveryStage) {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 60; ++it) {
        SignatureDag d(1 << 16);
        std::string t = it % 3 == 0 ? oracle::fibonacci(50 + it * 17) : oracle::random_text(rng, 1 + it * 23, 2 + it % 4);
        auto levels = tower(d, t);
        Signature root = levels.back()[0];
        ASSERT_EQ(expand(d, root), t);
        for (std::uint32_t s = 0; s < levels.size(); ++s) {
            StageWalker w(d, root, 1, nullptr);
            w.seek(0, s);
            std::vector<Signature> fwd{w.node()};
            std::uint64_t pos = w.end();
            while (w.next()) {
                ASSERT_EQ(w.start(), pos);
                pos = w.end();
                fwd.push_back(w.node());
            }
            ASSERT_EQ(pos, t.size());
            ASSERT_EQ(fwd, levels[s]) << "stage " << s;
            StageWalker b(d, root, 1, nullptr);
            b.seek(t.size() - 1, s);
            std::vector<Signature> bwd{b.node()};
            while (b.prev()) bwd.push_back(b.node());
            std::reverse(bwd.begin(), bwd.end());
            ASSERT_EQ(bwd, levels[s]);
            // random seeks land on the node covering the offset
            for (int q = 0; q < 20; ++q) {
                std::uint64_t p = rng() % t.size();
                w.seek(p, s);
                ASSERT_LE(w.start(), p);
                ASSERT_LT(p, w.end());
                ASSERT_LE(d.stage(w.node()), s);
            }
        }
    }
}

TEST(StageWalker, PowerOfABase) {
    SignatureDag d(1 << 12);
    auto levels = tower(d, "abcab");
    Signature e = levels.back()[0];
    StageWalker w(d, e, 3, nullptr);
    w.seek(0, 0);
    std::string got(1, static_cast<char>(d.assignment(w.node()).a));
    while (w.next()) got += static_cast<char>(d.assignment(w.node()).a);
    EXPECT_EQ(got, "abcababcababcab");
    w.seek(14, 0);
    EXPECT_EQ(w.start(), 14u);
    EXPECT_THROW(w.seek(15, 0), Error);
}

TEST(ItemWalker, StreamsForwardAndBackward) {
    std::mt19937_64 rng(9);
    for (int it = 0; it < 40; ++it) {
        SignatureDag d(1 << 16);
        std::string t = oracle::random_text(rng, 1 + it * 31, 2);
        Signature root = encode_text_linear(d, t);
        for (std::uint64_t c : {1u, 2u, 3u}) {
            std::string want;
            for (std::uint64_t k = 0; k < c; ++k) want += t;
            ItemWalker<false> f(d, root, c, nullptr);
            std::string got;
            f.take(got, want.size() + 5);
            ASSERT_EQ(got, want);
            ASSERT_TRUE(f.at_end());
            ItemWalker<true> b(d, root, c, nullptr);
            std::string rev;
            while (!b.at_end()) rev += static_cast<char>(b.next_char());
            ASSERT_EQ(rev, std::string(want.rbegin(), want.rend()));
            std::uint64_t off = rng() % want.size();
            ItemWalker<false> s(d, root, c, nullptr);
            s.seek(off);
            ASSERT_EQ(s.next_char(), static_cast<unsigned char>(want[off]));
        }
    }
}

TEST(ItemWalker, ExpandVisitsStayLogarithmic) {
    SignatureDag d(1 << 22);
    std::string t = oracle::fibonacci(1 << 18);
    Signature root = encode_text_linear(d, t);
    std::mt19937_64 rng(1);
    for (int q = 0; q < 200; ++q) {
        std::uint64_t i = 1 + rng() % t.size();
        std::uint64_t j = std::min<std::uint64_t>(t.size(), i + rng() % 64);
        QueryStats st;
        ASSERT_EQ(expand(d, root, i, j, &st), t.substr(i - 1, j - i + 1));
        ASSERT_LE(st.nodes_visited, 8 * (j - i + 1) + 64 * 18);
    }
}
