#ifndef SIGDEX_CLI_HPP
#define SIGDEX_CLI_HPP

// Command-line driver. run() takes the arguments after the program name and
// returns the exit code: 0 on success, 2 on usage errors, 1 on domain errors.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "engine.hpp"
#include "importers.hpp"
#include "index.hpp"
#include "slp.hpp"

namespace sigdex::cli {

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::invalid_input, "cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) fail(Errc::invalid_input, "cannot write " + path);
}

inline Engine load_engine(const std::string& path) {
    std::istringstream in(read_file(path));
    SignatureDag d = SignatureDag::deserialize(in);
    EngineConfig cfg;
    cfg.max_text_len = d.M() / 4;
    return Engine(cfg, std::move(d));
}

inline void print_stats(std::ostream& out, const QueryStats& s) {
    out << "nodes_visited=" << s.nodes_visited << '\n'
        << "dict_lookups=" << s.dict_lookups << '\n'
        << "signatures_created=" << s.signatures_created << '\n'
        << "signatures_removed=" << s.signatures_removed << '\n';
}

template <class T>
void print_list(std::ostream& out, const std::vector<T>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    out << '\n';
}

inline std::uint64_t slp_universe(const Slp& s) {
    std::uint64_t n = s.lengths()[s.n()];
    if (n > (std::uint64_t{1} << 30) - 1) fail(Errc::capacity_exhausted, "SLP text too long for 32-bit signatures");
    return 4 * std::max<std::uint64_t>(n, 2);
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Signature-encoded dynamic strings: build, query, edit and search.", "sigdex"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    bool want_stats = false;
    app.add_flag("--stats", want_stats, "Print query statistics as key=value lines");

    std::string dag_path, out_path, input, from = "text", builder, script, pattern, text_arg;
    std::uint64_t max_len = std::uint64_t{1} << 20, a = 0, b = 0, c = 0, queries = 100, seed = 1;
    std::string slp_path;
    bool backward = false, as_text = false, all_splits = false;

    auto* build = app.add_subcommand("build", "Encode a text, LZ77 factorization or SLP into a DAG dump");
    build->add_option("--from", from, "Input format")->check(CLI::IsMember({"text", "lz77", "slp"}));
    build->add_option("--builder", builder, "naive|linear for text, gfact|levelwise for SLPs")
        ->check(CLI::IsMember({"naive", "linear", "gfact", "levelwise"}));
    build->add_option("--max-len", max_len, "Longest supported text (M = 4n)")->check(CLI::Range(1ull, (1ull << 30) - 1));
    build->add_option("--out", out_path, "Dump file (stdout when omitted)");
    build->add_option("input", input, "Input file")->required();

    auto dag_opt = [&](CLI::App* s, bool required = true) {
        auto* o = s->add_option("--dag", dag_path, "DAG dump file");
        if (required) o->required();
    };

    auto* lce_cmd = app.add_subcommand("lce", "Longest common extension of T[i..] and T[j..]");
    dag_opt(lce_cmd);
    lce_cmd->add_flag("--backward", backward, "Longest common suffix of T[..i] and T[..j]");
    lce_cmd->add_option("i", a)->required();
    lce_cmd->add_option("j", b)->required();

    auto* lcp_cmd = app.add_subcommand("lcp", "LCP of two signatures (--dag) or two SLP variables (--slp)");
    auto* lcs_cmd = app.add_subcommand("lcs", "LCS of two signatures (--dag) or two SLP variables (--slp)");
    for (auto* s : {lcp_cmd, lcs_cmd}) {
        auto* d = s->add_option("--dag", dag_path, "DAG dump file");
        auto* p = s->add_option("--slp", slp_path, "SLP file");
        d->excludes(p);
        s->add_option("first", a)->required();
        s->add_option("second", b)->required();
    }

    auto* ins = app.add_subcommand("insert", "Insert an escaped string before position i");
    dag_opt(ins);
    ins->add_option("i", a)->required();
    ins->add_option("text", text_arg, "Escaped string (\\\\, \\xHH)")->required();
    auto* cpy = app.add_subcommand("insert-copy", "Insert a copy of T[j..j+y-1] before position i");
    dag_opt(cpy);
    cpy->add_option("j", a)->required();
    cpy->add_option("y", b)->required();
    cpy->add_option("i", c)->required();
    auto* del = app.add_subcommand("delete", "Delete T[j..j+y-1]");
    dag_opt(del);
    del->add_option("j", a)->required();
    del->add_option("y", b)->required();
    for (auto* s : {ins, cpy, del}) s->add_option("--out", out_path, "Write here instead of updating --dag");

    auto* search = app.add_subcommand("search", "All occurrences of an escaped pattern");
    dag_opt(search);
    search->add_flag("--all-splits", all_splits, "Query every split (for stores that hold an arbitrary grammar)");
    search->add_option("pattern", pattern)->required();

    auto* sortv = app.add_subcommand("sort-vars", "Variables of an SLP in lexicographic order of their values");
    sortv->add_option("slp", slp_path, "SLP file")->required();

    auto* exp = app.add_subcommand("export-slp", "Write the text as an SLP");
    dag_opt(exp);
    exp->add_option("--out", out_path, "SLP file (stdout when omitted)");

    auto* dump = app.add_subcommand("dump", "Print the DAG dump, or the text with --text");
    dag_opt(dump);
    dump->add_flag("--text", as_text, "Print the expanded text");

    auto* load = app.add_subcommand("load", "Read and audit a dump, optionally replaying an edit script");
    load->add_option("dump", dag_path, "DAG dump file")->required();
    load->add_option("--script", script, "Edit script to replay");
    load->add_option("--out", out_path, "Write the resulting dump");

    auto* verify = app.add_subcommand("verify", "Run every invariant audit");
    dag_opt(verify);

    auto* stats = app.add_subcommand("stats", "Print N and w");
    dag_opt(stats, false);

    auto* bench = app.add_subcommand("bench", "Random LCE and search queries as CSV");
    dag_opt(bench);
    bench->add_option("--queries", queries)->check(CLI::Range(1ull, 10000000ull));
    bench->add_option("--seed", seed);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
        return 2;
    }

    QueryStats qs;
    auto save = [&](const Engine& e, const std::string& path) {
        if (path.empty())
            out << e.dag().serialize();
        else
            detail::write_file(path, e.dag().serialize());
    };

    try {
        if (*build) {
            EngineConfig cfg;
            cfg.max_text_len = max_len;
            Engine e(cfg);
            if (from == "text") {
                if (builder.empty()) builder = "linear";
                if (builder != "naive" && builder != "linear") throw UsageError("--from text takes --builder naive|linear");
                std::string t = detail::read_file(input);
                if (builder == "naive") e.build_naive(t);
                else e.build_linear(t);
            } else if (from == "lz77") {
                if (!builder.empty()) throw UsageError("--from lz77 takes no --builder");
                std::istringstream in(detail::read_file(input));
                build_from_lz77(e, read_lz77(in));
            } else {
                if (builder.empty()) builder = "levelwise";
                if (builder != "gfact" && builder != "levelwise") throw UsageError("--from slp takes --builder gfact|levelwise");
                std::istringstream in(detail::read_file(input));
                Slp s = read_slp(in);
                if (builder == "gfact") build_from_slp_gfact(e, s);
                else build_from_slp_levelwise(e, s);
            }
            save(e, out_path);
            qs.dict_lookups = e.dag().lookups_total();
            qs.signatures_created = e.dag().created_total();
            qs.signatures_removed = e.dag().removed_total();
        } else if (*lce_cmd) {
            Engine e = detail::load_engine(dag_path);
            if (e.empty()) fail(Errc::invalid_input, "lce on an empty text");
            Signature r = e.root();
            out << (backward ? lce_backward(e.dag(), r, r, a, b, &qs) : lce(e.dag(), r, r, a, b, &qs)) << '\n';
        } else if (*lcp_cmd || *lcs_cmd) {
            const bool suffix = static_cast<bool>(*lcs_cmd);
            if (!slp_path.empty()) {
                std::istringstream in(detail::read_file(slp_path));
                Slp s = read_slp(in);
                if (a < 1 || b < 1 || a > s.n() || b > s.n()) fail(Errc::invalid_input, "variable out of range");
                SignatureDag d(detail::slp_universe(s));
                auto i = static_cast<std::uint32_t>(a), j = static_cast<std::uint32_t>(b);
                VariableSignatures v(d, suffix ? s.reversed() : s);
                out << lcp_sig(d, v[i], v[j], &qs) << '\n';
                qs.dict_lookups = d.lookups_total();
                qs.signatures_created = d.created_total();
            } else if (!dag_path.empty()) {
                Engine e = detail::load_engine(dag_path);
                auto i = static_cast<Signature>(a), j = static_cast<Signature>(b);
                if (a != i || b != j || !e.dag().contains(i) || !e.dag().contains(j))
                    fail(Errc::invalid_input, "unknown signature");
                out << (suffix ? lcs_sig(e.dag(), i, j, &qs) : lcp_sig(e.dag(), i, j, &qs)) << '\n';
            } else {
                throw UsageError("lcp/lcs need --dag or --slp");
            }
        } else if (*ins || *cpy || *del) {
            Engine e = detail::load_engine(dag_path);
            const std::uint64_t l0 = e.dag().lookups_total();
            if (*ins) e.insert(unescape(text_arg), a);
            else if (*cpy) e.insert_copy(a, b, c);
            else e.erase(a, b);
            detail::write_file(out_path.empty() ? dag_path : out_path, e.dag().serialize());
            qs = e.last_stats();
            qs.dict_lookups = e.dag().lookups_total() - l0;
        } else if (*search) {
            Engine e = detail::load_engine(dag_path);
            IndexOptions opt;
            opt.all_splits = all_splits;
            PatternIndex ix(e.dag(), opt);
            detail::print_list(out, ix.occurrences(unescape(pattern), &qs));
        } else if (*sortv) {
            std::istringstream in(detail::read_file(slp_path));
            Slp s = read_slp(in);
            SignatureDag d(detail::slp_universe(s));
            VariableSignatures v(d, s);
            detail::print_list(out, sort_variables(v, &qs));
        } else if (*exp) {
            Engine e = detail::load_engine(dag_path);
            std::ostringstream os;
            write_slp(os, export_to_slp(e.dag(), e.root()));
            if (out_path.empty()) out << os.str();
            else detail::write_file(out_path, os.str());
        } else if (*dump) {
            Engine e = detail::load_engine(dag_path);
            if (as_text) out << e.text() << '\n';
            else out << e.dag().serialize();
        } else if (*load) {
            Engine e = detail::load_engine(dag_path);
            e.dag().audit();
            if (!script.empty()) {
                const std::uint64_t l0 = e.dag().lookups_total();
                std::istringstream in(detail::read_file(script));
                for (const EditOp& op : parse_script(in)) {
                    e.apply(op);
                    const QueryStats& s = e.last_stats();
                    qs.nodes_visited += s.nodes_visited;
                    qs.signatures_created += s.signatures_created;
                    qs.signatures_removed += s.signatures_removed;
                }
                qs.dict_lookups = e.dag().lookups_total() - l0;
            }
            if (!out_path.empty()) detail::write_file(out_path, e.dag().serialize());
            out << "N=" << e.size() << " w=" << e.dag().size() << '\n';
        } else if (*verify) {
            Engine e = detail::load_engine(dag_path);
            SignatureDag& d = e.dag();
            d.audit();
            if (!e.empty()) {
                // the text must re-encode to the stored root in the same store
                const std::size_t w = d.size();
                Signature again = encode_text_linear(d, e.text());
                d.collect();
                if (again != e.root() || d.size() != w) fail(Errc::internal_error, "store is not the signature encoding of its text");
                PatternIndex ix(d, {.all_splits = false, .attach = false});
                ix.audit();
            }
            out << "ok\n";
        } else if (*stats) {
            if (dag_path.empty()) {
                out << "N=0 w=0\n";
            } else {
                Engine e = detail::load_engine(dag_path);
                out << "N=" << e.size() << " w=" << e.dag().size() << '\n';
            }
        } else if (*bench) {
            Engine e = detail::load_engine(dag_path);
            if (e.empty()) fail(Errc::invalid_input, "bench on an empty text");
            const std::uint64_t n = e.size();
            const Signature r = e.root();
            std::mt19937_64 rng(seed);
            PatternIndex ix(e.dag());
            out << "op,input_size,answer,nodes_visited,micros\n";
            using clock = std::chrono::steady_clock;
            auto us = [](clock::time_point t0) {
                return std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0).count();
            };
            for (std::uint64_t q = 0; q < queries; ++q) {
                std::uint64_t i = 1 + rng() % n, j = 1 + rng() % n;
                QueryStats s;
                auto t0 = clock::now();
                std::uint64_t l = lce(e.dag(), r, r, i, j, &s);
                out << "lce," << n << ',' << l << ',' << s.nodes_visited << ',' << us(t0) << '\n';
                qs.nodes_visited += s.nodes_visited;
            }
            const std::string t = e.text();
            for (std::uint64_t q = 0; q < queries; ++q) {
                std::uint64_t len = 1 + rng() % std::min<std::uint64_t>(n, 16);
                std::uint64_t at = rng() % (n - len + 1);
                QueryStats s;
                auto t0 = clock::now();
                std::size_t k = ix.occurrences(std::string_view(t).substr(at, len), &s).size();
                out << "search," << n << ',' << k << ',' << s.nodes_visited << ',' << us(t0) << '\n';
                qs.nodes_visited += s.nodes_visited;
            }
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    if (want_stats) detail::print_stats(out, qs);
    return 0;
}

}  // namespace sigdex::cli

#endif
