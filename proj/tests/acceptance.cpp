// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <unistd.h>

#include "fixtures.hpp"
#include "sigdex/cli.hpp"
#include "sigdex/sigdex.hpp"

using namespace sigdex;

namespace {

struct Outcome {
    bool ok = true;
    std::string note;
};

// Records the first failure and stops the check early.
struct Failed {
    std::string what;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failed{what};
}

EngineConfig cfg(std::uint64_t n) {
    EngineConfig c;
    c.max_text_len = n;
    return c;
}

double log2n(double n) { return std::log2(std::max(2.0, n)); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

std::vector<std::string> corpus() {
    std::mt19937_64 rng(101);
    return {oracle::random_text(rng, 4096, 2), oracle::random_text(rng, 4096, 4), oracle::random_text(rng, 4096, 26),
            oracle::fibonacci(4096),           oracle::thue_morse(4096),          oracle::repeat("abaab", 4000),
            std::string(2000, 'z') + "y" + std::string(2000, 'z')};
}

// ---- 1 ----------------------------------------------------------------------

void round_trip_all_builders(const std::string& t, std::uint64_t cap) {
    Engine lin(cfg(cap));
    lin.build_linear(t);
    require(lin.text() == t, "linear builder");
    Engine nai(cfg(cap));
    nai.build_naive(t);
    require(nai.text() == t, "naive builder");
    Engine lz(cfg(cap));
    build_from_lz77(lz, lz77_parse(t));
    require(lz.text() == t, "lz77 builder");
    Slp s = export_to_slp(lin.dag(), lin.root());
    Engine gf(cfg(cap)), lw(cfg(cap));
    build_from_slp_gfact(gf, s);
    require(gf.text() == t, "gfact builder");
    build_from_slp_levelwise(lw, s);
    require(lw.text() == t, "levelwise builder");
}

Outcome c1() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    const int sigmas[] = {2, 4, 26};
    for (int i = 0; i < 1000; ++i) {
        std::string t = oracle::random_text(rng, 1 + rng() % 4096, sigmas[i % 3]);
        round_trip_all_builders(t, 4096);
    }
    int family = 0;
    for (std::size_t n = 1; n <= (1u << 16); n *= 4) {
        std::size_t len = n == (1u << 14) ? (1u << 16) : n;
        for (const std::string& t : {std::string(len, 'a'), oracle::repeat("ab", len / 2 + 1).substr(0, len),
                                     oracle::fibonacci(len), oracle::thue_morse(len)}) {
            round_trip_all_builders(t, 1u << 16);
            ++family;
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 60, "runtime " + fmt(secs) + " s");
    return {true, "1000 random + " + std::to_string(family) + " family texts, 5 builders, " + fmt(secs) + " s"};
}

// ---- 2 and 3 ----------------------------------------------------------------

struct LceRun {
    std::uint64_t queries = 0;
    double worst_visit_ratio = 0;
    bool bound_ok = true;
};

LceRun& lce_run() {
    static LceRun r;
    return r;
}

Outcome c2() {
    LceRun& run = lce_run();
    std::mt19937_64 rng(2);
    for (const std::string& t : corpus()) {
        SignatureDag d(4 * 4096);
        Signature r = encode_text_linear(d, t);
        d.set_root(r);
        d.collect();
        const double ls = oracle::log_star(d.M());
        const double n = static_cast<double>(t.size());
        auto check_visits = [&](const QueryStats& st, std::uint64_t l) {
            double bound = 64 * (log2n(n) + std::log2(l + 2.0) * ls + 8);
            run.worst_visit_ratio = std::max(run.worst_visit_ratio, st.nodes_visited / bound);
            if (st.nodes_visited > bound) run.bound_ok = false;
        };
        for (int q = 0; q < 100000; ++q) {
            std::uint64_t i = 1 + rng() % t.size(), j = 1 + rng() % t.size();
            QueryStats sf, sb;
            std::uint64_t f = lce(d, r, r, i, j, &sf);
            require(f == oracle::lce(t, t, i, j), "lce(" + std::to_string(i) + "," + std::to_string(j) + ")");
            check_visits(sf, f);
            std::uint64_t b = lce_backward(d, r, r, i, j, &sb);
            require(b == oracle::lce_back(t, t, i, j), "lce_backward(" + std::to_string(i) + "," + std::to_string(j) + ")");
            check_visits(sb, b);
            run.queries += 2;
        }
        // lcp_sig / lcs_sig over pairs of stored signatures
        std::vector<Signature> sigs;
        d.for_each([&](Signature e) { sigs.push_back(e); });
        std::unordered_map<Signature, std::string> val;
        for (Signature e : sigs) val.emplace(e, expand(d, e));
        for (int q = 0; q < 20000; ++q) {
            Signature a = sigs[rng() % sigs.size()], b = sigs[rng() % sigs.size()];
            const std::string &x = val[a], &y = val[b];
            QueryStats sp, ss;
            std::uint64_t p = lcp_sig(d, a, b, &sp);
            require(p == oracle::lce(x, y, 1, 1), "lcp_sig");
            check_visits(sp, p);
            std::uint64_t s = lcs_sig(d, a, b, &ss);
            require(s == oracle::lce_back(x, y, x.size(), y.size()), "lcs_sig");
            check_visits(ss, s);
            run.queries += 2;
        }
    }
    return {true, std::to_string(run.queries) + " queries on " + std::to_string(corpus().size()) + " texts"};
}

Outcome c3() {
    const LceRun& run = lce_run();
    require(run.queries > 0, "no queries ran");
    require(run.bound_ok, "bound exceeded, worst visits/bound " + fmt(run.worst_visit_ratio));
    return {true, "worst visits/bound " + fmt(run.worst_visit_ratio) + " over " + std::to_string(run.queries) + " queries"};
}

// ---- 4 ----------------------------------------------------------------------

Outcome c4() {
    std::mt19937_64 rng(4);
    double worst = 0;
    int pairs = 0;
    auto texts = corpus();
    std::vector<std::unique_ptr<SignatureDag>> dags;
    std::vector<Signature> roots;
    for (const std::string& u : texts) {
        dags.push_back(std::make_unique<SignatureDag>(4 * 4096));
        roots.push_back(encode_text_linear(*dags.back(), u));
    }
    for (int attempt = 0; pairs < 10000; ++attempt) {
        require(attempt < 200000, "could not sample enough equal pairs");
        const std::string& t = texts[attempt % texts.size()];
        const SignatureDag& d = *dags[attempt % texts.size()];
        Signature r = roots[attempt % texts.size()];
        std::uint64_t y = 1 + rng() % (rng() % 4 == 0 ? 1024 : 48);
        if (y > t.size()) continue;
        std::uint64_t j = 1 + rng() % (t.size() - y + 1);
        auto occ = oracle::find_all(t, t.substr(j - 1, y));
        if (occ.size() < 2) continue;
        std::uint64_t k = occ[rng() % occ.size()];
        if (k == j) k = occ.front() == j ? occ.back() : occ.front();
        auto a = uniq_of_substring(d, r, j, y), b = uniq_of_substring(d, r, k, y);
        require(a.pow_runs == b.pow_runs, "Uniq differs at " + std::to_string(j) + " and " + std::to_string(k));
        double bound = 16 * (std::log2(static_cast<double>(y)) * oracle::log_star(d.M()) + 1);
        worst = std::max(worst, a.pow_runs.size() / bound);
        require(a.pow_runs.size() <= bound, "|Epow| " + std::to_string(a.pow_runs.size()) + " > " + fmt(bound));
        ++pairs;
    }
    return {true, std::to_string(pairs) + " equal pairs, worst |Epow|/bound " + fmt(worst)};
}

// ---- 5 ----------------------------------------------------------------------

Outcome c5() {
    std::mt19937_64 rng(5);
    const std::uint64_t cap = 8192;
    double worst = 0;
    for (int script = 0; script < 200; ++script) {
        const int sigma = 2 + script % 4;
        Engine e(cfg(cap));
        std::string ref = oracle::random_text(rng, rng() % 4096, sigma);
        if (!ref.empty()) e.build_linear(ref);
        const double ls = oracle::log_star(e.dag().M());
        for (int step = 0; step < 500; ++step) {
            EditOp op = fixture::random_op(rng, ref.size(), cap, sigma);
            e.apply(op);
            fixture::apply_ref(ref, op);
            std::string where = "script " + std::to_string(script) + " step " + std::to_string(step);
            require(e.text() == ref, "text differs, " + where);
            e.dag().audit();
            const QueryStats& st = e.last_stats();
            double bound = 64 * (fixture::op_len(op) + log2n(static_cast<double>(ref.size())) * ls + 1);
            double churn = static_cast<double>(st.signatures_created + st.signatures_removed);
            worst = std::max(worst, churn / bound);
            require(churn <= bound, "churn " + fmt(churn) + " > " + fmt(bound) + ", " + where);
        }
    }
    return {true, "200 x 500 ops, audited after each, worst churn/bound " + fmt(worst)};
}

// ---- 6 ----------------------------------------------------------------------

Outcome c6() {
    double worst = 0;
    auto texts = corpus();
    std::mt19937_64 rng(6);
    for (unsigned k = 10; k <= 16; k += 2) {
        texts.push_back(oracle::fibonacci(std::size_t{1} << k));
        texts.push_back(oracle::random_text(rng, std::size_t{1} << k, 2));
    }
    for (const std::string& t : texts) {
        Engine e(cfg(1 << 16));
        e.build_linear(t);
        double z = static_cast<double>(lz77_parse(t).size());
        double unit = z * log2n(static_cast<double>(t.size())) * oracle::log_star(e.dag().M());
        double ratio = static_cast<double>(e.dag().size()) / unit;
        worst = std::max(worst, ratio);
        require(ratio <= 32, "w/(z log N log* M) = " + fmt(ratio));
    }
    return {true, std::to_string(texts.size()) + " texts, max w/(z log2N log*M) " + fmt(worst)};
}

// ---- 7 and 10 ---------------------------------------------------------------

std::vector<Slp>& slp_corpus() {
    static std::vector<Slp> all = [] {
        std::vector<Slp> v{fixture::example_slp()};
        std::mt19937_64 rng(7);
        for (int i = 0; i < 200; ++i) v.push_back(fixture::random_slp(rng, 2 + rng() % 63, 2 + i % 4, 4096));
        return v;
    }();
    return all;
}

std::vector<std::string> naive_values(const Slp& s) {
    std::vector<std::string> v;
    for (std::uint32_t i = 1; i <= s.n(); ++i) v.push_back(s.expand(i));
    return v;
}

Outcome c7() {
    double worst = 0;
    for (const Slp& s : slp_corpus()) {
        const std::string want = naive_values(s).back();
        Engine a(cfg(1 << 13)), b(cfg(1 << 13));
        build_from_slp_gfact(a, s);
        require(a.text() == want, "gfact builder");
        LevelwiseResult info;
        build_from_slp_levelwise(b, s, &info);
        require(b.text() == want, "levelwise builder");
        double bound = 64 * static_cast<double>(s.n()) * oracle::log_star(b.dag().M());
        worst = std::max(worst, info.peak_state / bound);
        require(info.peak_state <= bound, "peak state " + std::to_string(info.peak_state) + " > " + fmt(bound));
    }
    return {true, std::to_string(slp_corpus().size()) + " programs, worst peak/bound " + fmt(worst)};
}

Outcome c10() {
    std::uint64_t pairs = 0;
    std::mt19937_64 rng(10);
    for (const Slp& s : slp_corpus()) {
        auto vals = naive_values(s);
        SignatureDag d(4 * 8192);
        {
            VariableSignatures v(d, s);
            std::vector<std::uint32_t> want(vals.size());
            std::iota(want.begin(), want.end(), 1u);
            std::stable_sort(want.begin(), want.end(), [&](auto a, auto b) { return vals[a - 1] < vals[b - 1]; });
            require(sort_variables(v) == want, "sort_variables");
        }
        VariableLcp pre(d, s), suf(d, s, true);
        for (std::uint32_t i = 1; i <= vals.size(); ++i)
            for (std::uint32_t j = 1; j <= vals.size(); ++j) {
                const std::string &a = vals[i - 1], &b = vals[j - 1];
                std::uint64_t p = oracle::lce(a, b, 1, 1), q = oracle::lce_back(a, b, a.size(), b.size());
                require(pre.query(i, j) == p && pre.direct(i, j) == p, "variable_lcp");
                require(suf.query(i, j) == q, "variable_lcs");
                ++pairs;
            }
        // the one-shot entry points on a few pairs
        SignatureDag one(4 * 8192);
        for (int k = 0; k < 3; ++k) {
            std::uint32_t i = 1 + rng() % vals.size(), j = 1 + rng() % vals.size();
            const std::string &a = vals[i - 1], &b = vals[j - 1];
            require(variable_lcp(one, s, i, j) == oracle::lce(a, b, 1, 1), "variable_lcp one-shot");
            require(variable_lcs(one, s, i, j) == oracle::lce_back(a, b, a.size(), b.size()), "variable_lcs one-shot");
        }
    }
    return {true, std::to_string(slp_corpus().size()) + " programs, " + std::to_string(pairs) + " pairs"};
}

// ---- 8 ----------------------------------------------------------------------

Outcome c8() {
    const Slp s = fixture::example_slp();
    auto vals = naive_values(s);
    Engine e(cfg(1 << 12));
    PatternIndex ix(e.dag());
    build_from_slp_levelwise(e, s);
    require(ix.occurrences("BCAB") == std::vector<std::uint64_t>{3, 7, 10, 13}, "Occ(BCAB) on the encoding");

    SignatureDag g(1 << 12);
    auto var = load_slp_grammar(g, s);
    PatternIndex grid(g, {.all_splits = true});
    require(grid.occurrences("BCAB") == std::vector<std::uint64_t>{3, 7, 10, 13}, "Occ(BCAB) on the program");
    std::set<std::pair<std::string, std::uint64_t>> got, want{{vals[5], 3}, {vals[10], 10}, {vals[8], 1}};
    for (const PrimaryOcc& o : grid.primary_occurrences("BCAB")) got.emplace(expand(g, o.sig), o.offset);
    require(got == want, "pOcc(BCAB)");

    SignatureDag d(1024);
    Signature A = d.char_sig('A'), B = d.char_sig('B'), C = d.char_sig('C');
    Signature c4 = d.sig_of(Assignment::run(C, 4)), a1 = d.sig_of(Assignment::run(A, 1));
    Signature b1 = d.sig_of(Assignment::run(B, 1)), c1 = d.sig_of(Assignment::run(C, 1));
    std::vector<Signature> x{c1, a1, b1}, y{a1, b1}, w{a1, b1, c4};
    Signature s9 = d.sig_plus(x), s10 = d.sig_plus(y), s11 = d.sig_plus(w);
    std::vector<Signature> top{d.sig_of(Assignment::run(s9, 2)), d.sig_of(Assignment::run(s10, 7)),
                               d.sig_of(Assignment::run(s11, 1))};
    Signature root = d.sig_of(Assignment::run(d.sig_plus(top), 1));
    const std::string text = "CABCABABABABABABABABABCCCC";
    Slp out = export_to_slp(d, root);
    require(out.expand(static_cast<std::uint32_t>(out.n())) == text, "RLSLP export");
    Engine back(cfg(1 << 10));
    build_from_slp_gfact(back, out);
    require(back.text() == text, "RLSLP rebuilt");
    Slp again = export_to_slp(back.dag(), back.root());
    require(again.expand(static_cast<std::uint32_t>(again.n())) == text, "RLSLP second export");
    return {true, "Occ {3,7,10,13}, pOcc {(X6,3),(X11,10),(X9,1)}, RLSLP round trip"};
}

// ---- 9 ----------------------------------------------------------------------

Outcome c9() {
    std::mt19937_64 rng(9);
    std::uint64_t queries = 0;
    for (int script = 0; script < 50; ++script) {
        const int sigma = 2 + script % 3;
        const std::uint64_t cap = 2048;
        Engine e(cfg(cap));
        PatternIndex ix(e.dag());
        std::string ref;
        for (int step = 0; step < 40; ++step) {
            EditOp op = fixture::random_op(rng, ref.size(), cap, sigma);
            e.apply(op);
            fixture::apply_ref(ref, op);
            if (ref.empty()) continue;
            for (int q = 0; q < 20; ++q) {
                std::string P = fixture::random_pattern(rng, ref, sigma);
                require(ix.occurrences(P) == oracle::find_all(ref, P),
                        "script " + std::to_string(script) + " step " + std::to_string(step) + " pattern " + P);
                ++queries;
            }
        }
        ix.audit();
        PatternIndex fresh(e.dag(), {.attach = false});
        require(ix.snapshot() == fresh.snapshot(), "plane differs from rebuild after script " + std::to_string(script));
    }
    return {true, "50 scripts x 40 ops, " + std::to_string(queries) + " searches, plane equals rebuild"};
}

// ---- 11 ---------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome c11() {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("sigdex_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    struct Cleanup {
        fs::path p;
        ~Cleanup() { fs::remove_all(p); }
    } cleanup{dir};

    std::mt19937_64 rng(11);
    {
        const std::string text = oracle::random_text(rng, 3000, 3);
        std::ofstream(dir / "t.txt", std::ios::binary) << text;
        std::ofstream lz(dir / "t.lz");
        write_lz77(lz, lz77_parse(text));
        const Slp prog = fixture::random_slp(rng, 40, 3, 4096);
        std::ofstream slp(dir / "x.slp");
        write_slp(slp, prog);
        // one edit script per input text
        for (auto [name, ref] : {std::pair{"s_text.txt", text}, std::pair{"s_slp.txt", prog.expand(prog.n())}}) {
            std::ofstream script(dir / name);
            for (int k = 0; k < 200; ++k) {
                EditOp op = fixture::random_op(rng, ref.size(), 8192, 3);
                fixture::apply_ref(ref, op);
                script << format_op(op) << '\n';
            }
        }
    }
    auto go = [&](std::vector<std::string> args, const std::string& tag) {
        std::ostringstream out, err;
        int code = cli::run(args, out, err);
        require(code == 0, tag + " exited " + std::to_string(code) + ": " + err.str());
        return out.str();
    };
    const std::string t = (dir / "t.txt").string(), x = (dir / "x.slp").string(), z = (dir / "t.lz").string();
    const std::vector<std::vector<std::string>> builds = {
        {"build", "--builder", "linear", t},     {"build", "--builder", "naive", t},
        {"build", "--from", "lz77", z},          {"build", "--from", "slp", "--builder", "gfact", x},
        {"build", "--from", "slp", x},
    };
    int runs = 0;
    for (std::size_t b = 0; b < builds.size(); ++b) {
        std::string dumps[2], outs[2];
        for (int rep = 0; rep < 2; ++rep) {
            fs::path out = dir / ("b" + std::to_string(b) + "_" + std::to_string(rep) + ".dag");
            auto args = builds[b];
            args.insert(args.begin() + 1, {"--out", out.string(), "--stats"});
            outs[rep] = go(args, builds[b][0]);
            dumps[rep] = slurp(out);
            std::vector<std::string> q = {"search", "--dag", out.string(), "ab"};
            outs[rep] += go(q, "search");
            fs::path edited = dir / ("e" + std::to_string(b) + "_" + std::to_string(rep) + ".dag");
            const std::string sc = (dir / (b < 3 ? "s_text.txt" : "s_slp.txt")).string();
            outs[rep] += go({"load", out.string(), "--script", sc, "--out", edited.string(), "--stats"}, "load");
            dumps[rep] += slurp(edited);
            ++runs;
        }
        require(dumps[0] == dumps[1], "dumps differ for build " + std::to_string(b));
        require(outs[0] == outs[1], "stdout differs for build " + std::to_string(b));
    }
    return {true, std::to_string(builds.size()) + " builds and scripts repeated, dumps and stdout identical"};
}

}  // namespace

// Optional arguments pick criteria by number; none runs them all.
int main(int argc, char** argv) {
    std::set<std::size_t> only;
    for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"round-trip", c1},        {"lce exactness", c2},     {"visit bound", c3},        {"uniq consistency", c4},
        {"dynamic correctness", c5}, {"compression bound", c6}, {"slp builders", c7},     {"worked example", c8},
        {"index under edits", c9}, {"applications", c10},      {"determinism", c11},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && !only.count(i + 1)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const Failed& f) {
            o = {false, f.what};
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (o.ok ? "PASS" : "FAIL") << "  "
                  << o.note << "  [" << fmt(secs) << " s]" << std::endl;
        failed += !o.ok;
    }
    return failed ? 1 : 0;
}
