#ifndef SIGDEX_TESTS_FIXTURES_HPP
#define SIGDEX_TESTS_FIXTURES_HPP

#include "oracles.hpp"
#include "sigdex/engine.hpp"
#include "sigdex/slp.hpp"

namespace fixture {

/// 11-rule program for CABCABBCABCABCAB.
inline sigdex::Slp example_slp() {
    using sigdex::SlpRule;
    sigdex::Slp s;
    s.rules = {SlpRule::character('A'), SlpRule::character('B'), SlpRule::character('C'), SlpRule::pair(3, 1),
               SlpRule::pair(4, 2),     SlpRule::pair(5, 5),     SlpRule::pair(2, 3),     SlpRule::pair(1, 2),
               SlpRule::pair(7, 8),     SlpRule::pair(6, 9),     SlpRule::pair(10, 6)};
    return s;
}

inline sigdex::Slp to_slp(const std::vector<oracle::Rule>& r) {
    sigdex::Slp s;
    for (const auto& x : r)
        s.rules.push_back(x.chr ? sigdex::SlpRule::character(static_cast<unsigned char>(x.a)) : sigdex::SlpRule::pair(x.a, x.b));
    return s;
}

/// Balanced program for a^(2^k).
inline sigdex::Slp doubling_slp(unsigned k) {
    sigdex::Slp s;
    s.rules.push_back(sigdex::SlpRule::character('a'));
    for (unsigned i = 1; i <= k; ++i) s.rules.push_back(sigdex::SlpRule::pair(i, i));
    return s;
}

/// Random valid program of at most n rules.
inline sigdex::Slp random_slp(std::mt19937_64& rng, unsigned n, int sigma, std::size_t max_len) {
    return to_slp(oracle::random_slp(rng, n, sigma, max_len));
}

/// Random INSERT / INSERT' / DELETE keeping the text within cap.
inline sigdex::EditOp random_op(std::mt19937_64& rng, std::uint64_t n, std::uint64_t cap, int sigma) {
    int kind = static_cast<int>(rng() % 3);
    if (n == 0) kind = 0;
    if (kind == 0 || (kind == 1 && n + 1 > cap)) {
        std::uint64_t y = 1 + rng() % 64;
        if (n + y > cap) kind = 2;
        else return sigdex::InsertOp{oracle::random_text(rng, y, sigma), 1 + rng() % (n + 1)};
    }
    if (kind == 1) {
        std::uint64_t j = 1 + rng() % n;
        std::uint64_t y = 1 + rng() % std::min<std::uint64_t>(n - j + 1, cap - n);
        return sigdex::CopyOp{j, y, 1 + rng() % (n + 1)};
    }
    std::uint64_t j = 1 + rng() % n;
    std::uint64_t y = 1 + rng() % std::min<std::uint64_t>(n - j + 1, 200);
    return sigdex::DeleteOp{j, y};
}

inline void apply_ref(std::string& s, const sigdex::EditOp& op) {
    if (auto* i = std::get_if<sigdex::InsertOp>(&op)) s.insert(i->pos - 1, i->text);
    if (auto* c = std::get_if<sigdex::CopyOp>(&op)) s.insert(c->pos - 1, s.substr(c->src - 1, c->len));
    if (auto* d = std::get_if<sigdex::DeleteOp>(&op)) s.erase(d->pos - 1, d->len);
}

inline std::uint64_t op_len(const sigdex::EditOp& op) {
    if (auto* i = std::get_if<sigdex::InsertOp>(&op)) return i->text.size();
    if (auto* c = std::get_if<sigdex::CopyOp>(&op)) return c->len;
    return std::get<sigdex::DeleteOp>(op).len;
}

/// A substring of t, a short unary string or a short random string.
inline std::string random_pattern(std::mt19937_64& rng, const std::string& t, int sigma) {
    switch (rng() % 4) {
        case 0: {
            std::size_t len = 1 + rng() % std::min<std::size_t>(t.size(), 24);
            std::size_t at = rng() % (t.size() - len + 1);
            return t.substr(at, len);
        }
        case 1: return std::string(1 + rng() % 6, static_cast<char>('a' + rng() % sigma));
        default: return oracle::random_text(rng, 1 + rng() % 5, sigma);
    }
}

}  // namespace fixture

#endif
