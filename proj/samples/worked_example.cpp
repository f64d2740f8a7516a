// Walks through the worked examples: the 11-rule SLP for CABCABBCABCABCAB,
// its pattern-matching grid, an edit, and the run-length grammar export.

#include <iostream>

#include "sigdex/sigdex.hpp"

using namespace sigdex;

int main() {
    Slp s;
    s.rules = {SlpRule::character('A'), SlpRule::character('B'), SlpRule::character('C'), SlpRule::pair(3, 1),
               SlpRule::pair(4, 2),     SlpRule::pair(5, 5),     SlpRule::pair(2, 3),     SlpRule::pair(1, 2),
               SlpRule::pair(7, 8),     SlpRule::pair(6, 9),     SlpRule::pair(10, 6)};

    // Signature encoding of val(X11), built level by level from the program.
    EngineConfig cfg;
    cfg.max_text_len = 1 << 12;
    Engine e(cfg);
    PatternIndex ix(e.dag());
    build_from_slp_levelwise(e, s);
    std::cout << "T = " << e.text() << "  (N=" << e.size() << ", w=" << e.dag().size() << ")\n";
    std::cout << "lce(1, 4) = " << lce(e.dag(), e.root(), e.root(), 1, 4) << '\n';

    std::cout << "Occ(BCAB) =";
    for (auto k : ix.occurrences("BCAB")) std::cout << ' ' << k;
    std::cout << '\n';

    // The same search on the program itself, every variable on the grid.
    SignatureDag g(1 << 12);
    auto var = load_slp_grammar(g, s);
    PatternIndex grid(g, {.all_splits = true});
    std::cout << "pOcc(BCAB) on the program =";
    for (const PrimaryOcc& o : grid.primary_occurrences("BCAB")) {
        auto i = std::find(var.begin(), var.end(), o.sig) - var.begin();
        std::cout << " (X" << i << "," << o.offset << ")";
    }
    std::cout << '\n';

    // Edits keep the index current.
    e.insert("BCAB", 1);
    e.erase(10, 3);
    std::cout << "after edits T = " << e.text() << ", Occ(BCAB) =";
    for (auto k : ix.occurrences("BCAB")) std::cout << ' ' << k;
    std::cout << '\n';

    // Run-length grammar for CABCABABABABABABABABABCCCC, exported as a plain SLP.
    Engine r(cfg);
    r.build_linear("CABCABABABABABABABABABCCCC");
    Slp out = export_to_slp(r.dag(), r.root());
    std::cout << "RLSLP with " << r.dag().size() << " signatures exports to " << out.n() << " SLP rules; val = "
              << out.expand(static_cast<std::uint32_t>(out.n())) << '\n';
    return 0;
}
