#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "sigdex/parse.hpp"

using namespace sigdex;

namespace {

std::vector<Symbol> random_colors(std::mt19937_64& rng, std::size_t n, std::uint64_t W) {
    std::uniform_int_distribution<std::uint64_t> dist(1, W);
    std::vector<Symbol> p;
    while (p.size() < n) {
        Symbol x = dist(rng);
        if (p.empty() || p.back() != x) p.push_back(x);
    }
    return p;
}

// Independent restatement of the four contract properties.
void expect_contract(const std::vector<std::uint8_t>& d) {
    const std::size_t n = d.size();
    ASSERT_EQ(d[0], 1);
    ASSERT_EQ(d[n - 1], 0);
    for (std::size_t i = 0; i + 1 < n; ++i) ASSERT_LE(d[i] + d[i + 1], 1) << "at " << i;
    for (std::size_t i = 0; i + 3 < n - 1; ++i) ASSERT_GE(d[i] + d[i + 1] + d[i + 2] + d[i + 3], 1) << "at " << i;
}

}  // namespace

TEST(LogStar, SmallValues) {
    EXPECT_EQ(log_star(1), 0);
    EXPECT_EQ(log_star(2), 1);
    EXPECT_EQ(log_star(4), 2);
    EXPECT_EQ(log_star(16), 3);
    EXPECT_EQ(log_star(65536), 4);
    EXPECT_EQ(log_star(65537), 5);
}

TEST(ParseParams, WidthsCoverTheDefaults) {
    for (std::uint64_t W : {7ull, 255ull, 1ull << 20, 1ull << 32}) {
        auto pp = ParseParams::for_universe(W);
        EXPECT_GE(pp.delta_l, pp.log_star_w + 6);
        EXPECT_GE(pp.delta_r, 4);
        EXPECT_EQ(pp.window(), static_cast<std::size_t>(pp.delta_l + pp.delta_r + 4));
    }
}

TEST(BoundaryBits, TwoSymbols) {
    auto pp = ParseParams::for_universe(7);
    std::vector<Symbol> p{1, 2};
    EXPECT_EQ(boundary_bits(p, pp), (std::vector<std::uint8_t>{1, 0}));
}

TEST(BoundaryBits, RejectsBadInput) {
    auto pp = ParseParams::for_universe(7);
    std::vector<Symbol> one{1}, eq{1, 1}, big{1, 8}, zero{0, 1};
    EXPECT_THROW(boundary_bits(one, pp), Error);
    EXPECT_THROW(boundary_bits(eq, pp), Error);
    EXPECT_THROW(boundary_bits(big, pp), Error);
    EXPECT_THROW(boundary_bits(zero, pp), Error);
}

// Every proper 3-colouring up to length 12: the colour-to-bit stage alone
// already yields blocks of length 2..4.
TEST(BoundaryBits, ExhaustiveThreeColourings) {
    for (std::size_t n = 2; n <= 12; ++n) {
        std::vector<std::uint8_t> c(n, 0);
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == n) {
                std::vector<std::uint8_t> d;
                detail::bits_from_colors(c, d);
                expect_contract(d);
                return;
            }
            for (std::uint8_t x = 0; x < 3; ++x) {
                if (i && c[i - 1] == x) continue;
                c[i] = x;
                rec(i + 1);
            }
        };
        rec(0);
    }
}

TEST(BoundaryBits, RandomContractAndLocality) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> len(2, 256);
    for (std::uint64_t W : {7ull, 255ull, 1ull << 20}) {
        auto pp = ParseParams::for_universe(W);
        for (int it = 0; it < 3400; ++it) {
            auto p = random_colors(rng, len(rng), W);
            auto d = boundary_bits(p, pp);
            ASSERT_EQ(d.size(), p.size());
            expect_contract(d);
            // a bit only depends on its window: recompute on the window alone
            if (it % 8) continue;
            for (std::size_t i = 0; i < p.size(); ++i) {
                std::size_t lo = i >= static_cast<std::size_t>(pp.delta_l) ? i - pp.delta_l : 0;
                std::size_t hi = std::min(p.size(), i + pp.delta_r + 1);
                if (hi - lo < 2) continue;
                // the window end is a text end only if it is the real end
                if (hi < p.size()) {
                    // extend by an arbitrary tail so the window end is not forced
                    std::vector<Symbol> w(p.begin() + lo, p.begin() + hi);
                    Symbol tail = w.back() == 1 ? 2 : 1;
                    w.push_back(tail);
                    ASSERT_EQ(boundary_bits(w, pp)[i - lo], d[i]) << "W=" << W << " i=" << i;
                    // a text that simply stops at the window end agrees as well
                    std::vector<Symbol> cut(p.begin() + lo, p.begin() + hi);
                    if (cut.size() >= 2) {
                        ASSERT_EQ(boundary_bits(cut, pp)[i - lo], d[i]) << "W=" << W << " i=" << i;
                    }
                } else {
                    std::vector<Symbol> w(p.begin() + lo, p.end());
                    ASSERT_EQ(boundary_bits(w, pp)[i - lo], d[i]) << "W=" << W << " i=" << i;
                }
            }
        }
    }
}

TEST(BoundaryBits, EqualWindowsEqualBits) {
    // the same window embedded in two unrelated contexts
    std::mt19937_64 rng(11);
    auto pp = ParseParams::for_universe(255);
    const std::size_t span = pp.delta_l + pp.delta_r + 1;
    int compared = 0;
    for (int it = 0; it < 4000; ++it) {
        auto core = random_colors(rng, span, 255);
        auto cat = [&](std::vector<Symbol> x, const std::vector<Symbol>& y) {
            if (!x.empty() && x.back() == y.front()) return std::vector<Symbol>{};
            x.insert(x.end(), y.begin(), y.end());
            return x;
        };
        auto a = random_colors(rng, 1 + it % 20, 255), b = random_colors(rng, 1 + it % 13, 255);
        auto c = random_colors(rng, 1 + it % 7, 255), e = random_colors(rng, 1 + it % 17, 255);
        auto p = cat(cat(a, core), b), q = cat(cat(c, core), e);
        if (p.size() != a.size() + span + b.size() || q.size() != c.size() + span + e.size()) continue;
        auto dp = boundary_bits(p, pp), dq = boundary_bits(q, pp);
        ASSERT_EQ(dp[a.size() + pp.delta_l], dq[c.size() + pp.delta_l]);
        ++compared;
    }
    EXPECT_GT(compared, 3000);
}

TEST(Eblock, ReferenceExample) {
    std::vector<Symbol> p{1, 2, 3, 2, 5, 7, 6, 4, 3, 4, 3, 4, 1, 2, 3, 4, 5};
    std::vector<std::uint8_t> d{1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0};
    auto blocks = eblock(p, d);
    std::vector<std::vector<Symbol>> want{{1, 2, 3}, {2, 5}, {7, 6, 4}, {3, 4, 3, 4}, {1, 2}, {3, 4, 5}};
    EXPECT_EQ(blocks, want);
    EXPECT_EQ(blocks.size(), 6u);
    EXPECT_EQ(blocks[1], (std::vector<Symbol>{2, 5}));
}

TEST(Eblock, ComputedBitsOnReferenceSequence) {
    std::vector<Symbol> p{1, 2, 3, 2, 5, 7, 6, 4, 3, 4, 3, 4, 1, 2, 3, 4, 5};
    auto d = boundary_bits(p, ParseParams::for_universe(7));
    expect_contract(d);
    auto blocks = eblock(p, d);
    std::vector<Symbol> cat;
    for (auto& b : blocks) cat.insert(cat.end(), b.begin(), b.end());
    EXPECT_EQ(cat, p);
}

TEST(Eblock, MinimalAndErrors) {
    std::vector<Symbol> p{1, 2};
    std::vector<std::uint8_t> d{1, 0};
    EXPECT_EQ(eblock(p, d).size(), 1u);
    std::vector<std::uint8_t> shortd{1};
    EXPECT_THROW(eblock(p, shortd), Error);
}

TEST(Eblock, RandomRoundTrip) {
    std::mt19937_64 rng(3);
    auto pp = ParseParams::for_universe(1 << 20);
    for (int it = 0; it < 500; ++it) {
        auto p = random_colors(rng, 2 + it % 300, 1 << 20);
        auto blocks = eblock(p, boundary_bits(p, pp));
        std::vector<Symbol> cat;
        for (auto& b : blocks) {
            ASSERT_GE(b.size(), 2u);
            ASSERT_LE(b.size(), 4u);
            cat.insert(cat.end(), b.begin(), b.end());
        }
        ASSERT_EQ(cat, p);
    }
}

TEST(Epow, Examples) {
    std::string s = "aabbbbbabb";
    PowerSeq want{{'a', 2}, {'b', 5}, {'a', 1}, {'b', 2}};
    EXPECT_EQ(epow(s), want);
    EXPECT_EQ(epow(std::string("a")), (PowerSeq{{'a', 1}}));
    EXPECT_EQ(epow(std::string("abab")), (PowerSeq{{'a', 1}, {'b', 1}, {'a', 1}, {'b', 1}}));
    EXPECT_THROW(epow(std::string()), Error);
}
