#pragma once

#include "echolab/common.hpp"
#include "echolab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace echolab {

using Symbol = int;
using Word = std::vector<Symbol>;

/// Per-symbol run-length constraints with optional repeat probabilities.
/// m_plus[i] == nullopt means runs of symbol i have no upper bound.
struct RepeatSpec {
    int alphabet = 2;
    std::vector<int> m_minus;
    std::vector<std::optional<int>> m_plus;
    std::vector<std::optional<double>> p;

    /// Two-symbol constructor covering the common case.
    static RepeatSpec binary(int m0_minus, std::optional<int> m0_plus,
                             int m1_minus, std::optional<int> m1_plus,
                             std::optional<double> p0 = std::nullopt,
                             std::optional<double> p1 = std::nullopt) {
        RepeatSpec s;
        s.alphabet = 2;
        s.m_minus = {m0_minus, m1_minus};
        s.m_plus = {m0_plus, m1_plus};
        s.p = {p0, p1};
        return s;
    }

    void validate() const {
        if (alphabet < 2) throw InvalidSpec("alphabet size must be at least 2");
        if (static_cast<int>(m_minus.size()) != alphabet ||
            static_cast<int>(m_plus.size()) != alphabet)
            throw InvalidSpec("m_minus/m_plus must have one entry per symbol");
        if (!p.empty() && static_cast<int>(p.size()) != alphabet)
            throw InvalidSpec("p must be empty or have one entry per symbol");
        for (int i = 0; i < alphabet; ++i) {
            if (m_minus[i] < 1) throw InvalidSpec("minimum repetition must be >= 1");
            if (m_plus[i] && *m_plus[i] < m_minus[i])
                throw InvalidSpec("maximum repetition must be >= minimum");
            if (i < static_cast<int>(p.size()) && p[i]) {
                if (*p[i] < 0.0 || *p[i] > 1.0)
                    throw InvalidSpec("repeat probability must lie in [0, 1]");
                if (*p[i] == 1.0 && !m_plus[i])
                    throw InvalidSpec("repeat probability 1 requires a finite maximum");
            }
        }
    }

    bool has_probabilities() const {
        if (static_cast<int>(p.size()) != alphabet) return false;
        return std::all_of(p.begin(), p.end(), [](const auto& v) { return v.has_value(); });
    }

    bool operator==(const RepeatSpec& other) const {
        return alphabet == other.alphabet && m_minus == other.m_minus && m_plus == other.m_plus;
    }
};

/// A finite set of forbidden words over {0..alphabet-1}.
struct ForbiddenWordSet {
    int alphabet = 2;
    std::set<Word> words;

    bool operator==(const ForbiddenWordSet& other) const {
        return alphabet == other.alphabet && words == other.words;
    }
};

/// Finite window of a (conceptually bi-infinite) symbol sequence.
/// List position `origin` would hold the symbol at time k = 0, so the
/// window spans times [-origin, size()-1-origin]. The origin may point
/// outside the stored window; operations that need particular times check
/// coverage explicitly.
struct SymbolSequence {
    std::vector<Symbol> symbols;
    std::ptrdiff_t origin = 0;

    std::ptrdiff_t size() const { return static_cast<std::ptrdiff_t>(symbols.size()); }
    std::ptrdiff_t min_time() const { return -origin; }
    std::ptrdiff_t max_time() const { return size() - 1 - origin; }
    bool covers(std::ptrdiff_t k) const { return k >= min_time() && k <= max_time(); }
    Symbol at_time(std::ptrdiff_t k) const { return symbols[static_cast<std::size_t>(origin + k)]; }

    void check_origin() const {
        if (symbols.empty()) throw InvalidSpec("symbol sequence must be nonempty");
    }

    static SymbolSequence from_string(const std::string& text, std::ptrdiff_t origin = 0) {
        SymbolSequence s;
        s.symbols.reserve(text.size());
        for (char c : text) {
            if (c < '0' || c > '9') throw InvalidSpec("sequence characters must be digits");
            s.symbols.push_back(c - '0');
        }
        s.origin = origin;
        s.check_origin();
        return s;
    }
};

struct RunLength {
    Symbol symbol;
    int length;
    bool boundary;  // truncated by a window edge
};

/// Directed graph whose vertex set is (symbol, run progress); reading the
/// vertex symbols along any path yields exactly the admissible windows.
struct StateGraph {
    struct Edge {
        int to;
        Symbol emits;
        std::optional<double> prob;
    };
    struct Vertex {
        Symbol symbol;
        int progress;  // 1-based position within the current run
        std::vector<Edge> out;
    };
    std::vector<Vertex> vertices;

    int vertex_of(Symbol symbol, int progress) const {
        for (int v = 0; v < static_cast<int>(vertices.size()); ++v)
            if (vertices[v].symbol == symbol && vertices[v].progress == progress) return v;
        return -1;
    }
};

struct Violation {
    std::ptrdiff_t position;  // window list index of the first matched symbol
    Word word;

    bool operator==(const Violation& other) const {
        return position == other.position && word == other.word;
    }
};

inline bool is_subword(const Word& needle, const Word& hay) {
    if (needle.empty() || needle.size() > hay.size()) return needle.empty();
    for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s)
        if (std::equal(needle.begin(), needle.end(), hay.begin() + s)) return true;
    return false;
}

/// Drop every word that contains another forbidden word as a subword.
inline ForbiddenWordSet reduce_minimal(ForbiddenWordSet fws) {
    std::set<Word> keep;
    for (const Word& w : fws.words) {
        bool redundant = false;
        for (const Word& v : fws.words) {
            if (v == w) continue;
            if (v.size() <= w.size() && is_subword(v, w)) { redundant = true; break; }
        }
        if (!redundant) keep.insert(w);
    }
    fws.words = std::move(keep);
    return fws;
}

/// Minimal forbidden set realizing exactly the run-length constraints:
/// words j i^m k for every m below the minimum (j, k != i), plus i^(max+1)
/// for every finite maximum.
inline ForbiddenWordSet build_forbidden_set(const RepeatSpec& spec) {
    spec.validate();
    ForbiddenWordSet fws;
    fws.alphabet = spec.alphabet;
    for (Symbol i = 0; i < spec.alphabet; ++i) {
        for (int m = 1; m < spec.m_minus[i]; ++m) {
            for (Symbol j = 0; j < spec.alphabet; ++j) {
                if (j == i) continue;
                for (Symbol k = 0; k < spec.alphabet; ++k) {
                    if (k == i) continue;
                    Word w;
                    w.reserve(m + 2);
                    w.push_back(j);
                    w.insert(w.end(), m, i);
                    w.push_back(k);
                    fws.words.insert(std::move(w));
                }
            }
        }
        if (spec.m_plus[i]) fws.words.insert(Word(*spec.m_plus[i] + 1, i));
    }
    return reduce_minimal(std::move(fws));
}

/// Recover the RepeatSpec whose forbidden set equals `fws`; throws
/// NotMinMaxForm when the set encodes anything beyond run lengths.
inline RepeatSpec infer_minmax(const ForbiddenWordSet& fws) {
    RepeatSpec spec;
    spec.alphabet = fws.alphabet;
    spec.m_minus.assign(fws.alphabet, 1);
    spec.m_plus.assign(fws.alphabet, std::nullopt);
    spec.p.clear();

    for (const Word& w : fws.words) {
        if (w.empty()) throw NotMinMaxForm("empty forbidden word");
        for (Symbol s : w)
            if (s < 0 || s >= fws.alphabet) throw NotMinMaxForm("word symbol outside alphabet");
        const bool pure = std::all_of(w.begin(), w.end(), [&](Symbol s) { return s == w[0]; });
        if (pure) {
            if (static_cast<int>(w.size()) < 2 || spec.m_plus[w[0]])
                throw NotMinMaxForm("not a run-cap word");
            spec.m_plus[w[0]] = static_cast<int>(w.size()) - 1;
            continue;
        }
        // Candidate j i^m k with j, k != i and a uniform interior.
        if (w.size() < 3) throw NotMinMaxForm("word too short for a minimum-run pattern");
        const Symbol i = w[1];
        if (w.front() == i || w.back() == i) throw NotMinMaxForm("delimiters must differ from the run symbol");
        for (std::size_t t = 1; t + 1 < w.size(); ++t)
            if (w[t] != i) throw NotMinMaxForm("interior of a minimum-run word must be uniform");
        const int m = static_cast<int>(w.size()) - 2;
        spec.m_minus[i] = std::max(spec.m_minus[i], m + 1);
    }

    for (int i = 0; i < spec.alphabet; ++i)
        if (spec.m_plus[i] && *spec.m_plus[i] < spec.m_minus[i])
            throw NotMinMaxForm("inferred maximum below inferred minimum");

    // The recovered spec must regenerate the input set exactly.
    if (!(build_forbidden_set(spec) == reduce_minimal(fws)))
        throw NotMinMaxForm("forbidden set is not exactly of min-max form");
    return spec;
}

/// All occurrences of forbidden words inside the window. Runs truncated at
/// a window edge never complete a minimum-run pattern (both delimiters are
/// required), so boundary runs are exempt from minimum-length violations
/// while over-long runs are always caught.
inline std::vector<Violation> validate_sequence(const SymbolSequence& seq,
                                                const ForbiddenWordSet& fws) {
    seq.check_origin();
    std::vector<Violation> out;
    const auto& s = seq.symbols;
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
        for (const Word& w : fws.words) {
            if (pos + w.size() > s.size()) continue;
            if (std::equal(w.begin(), w.end(), s.begin() + pos))
                out.push_back({static_cast<std::ptrdiff_t>(pos), w});
        }
    }
    return out;
}

/// Maximal runs in window order; the first and last runs are flagged as
/// boundary-truncated.
inline std::vector<RunLength> run_lengths(const SymbolSequence& seq) {
    seq.check_origin();
    std::vector<RunLength> runs;
    const auto& s = seq.symbols;
    std::size_t start = 0;
    while (start < s.size()) {
        std::size_t end = start;
        while (end + 1 < s.size() && s[end + 1] == s[start]) ++end;
        runs.push_back({s[start], static_cast<int>(end - start + 1), false});
        start = end + 1;
    }
    if (!runs.empty()) {
        runs.front().boundary = true;
        runs.back().boundary = true;
    }
    return runs;
}

/// Canonical run-progress graph for the subshift: symbol i contributes
/// m_plus[i] states when bounded, m_minus[i] states (with a self-loop on
/// the last) when unbounded. Edge probabilities follow the repeat scheme
/// when repeat probabilities are present: forced continuation below the
/// minimum, repeat with probability p_i up to the maximum, forced switch
/// at the cap.
inline StateGraph build_state_graph(const RepeatSpec& spec) {
    spec.validate();
    const bool with_prob = spec.has_probabilities();
    StateGraph g;
    std::vector<int> first_vertex(spec.alphabet, 0);
    for (Symbol i = 0; i < spec.alphabet; ++i) {
        first_vertex[i] = static_cast<int>(g.vertices.size());
        const int states = spec.m_plus[i] ? *spec.m_plus[i] : spec.m_minus[i];
        for (int c = 1; c <= states; ++c) g.vertices.push_back({i, c, {}});
    }
    const auto switch_prob = [&](Symbol i, double stay) -> std::optional<double> {
        if (!with_prob) return std::nullopt;
        return (1.0 - stay) / static_cast<double>(spec.alphabet - 1);
    };
    for (Symbol i = 0; i < spec.alphabet; ++i) {
        const bool bounded = spec.m_plus[i].has_value();
        const int states = bounded ? *spec.m_plus[i] : spec.m_minus[i];
        for (int c = 1; c <= states; ++c) {
            auto& v = g.vertices[first_vertex[i] + c - 1];
            if (c < spec.m_minus[i]) {
                v.out.push_back({first_vertex[i] + c, i,
                                 with_prob ? std::optional<double>(1.0) : std::nullopt});
                continue;
            }
            const bool at_cap = bounded && c == states;
            const double stay = at_cap ? 0.0 : (with_prob ? *spec.p[i] : 0.0);
            if (!at_cap) {
                const int next_c = bounded ? c + 1 : spec.m_minus[i];  // unbounded: self-loop
                v.out.push_back({first_vertex[i] + next_c - 1, i,
                                 with_prob ? std::optional<double>(stay) : std::nullopt});
            }
            for (Symbol j = 0; j < spec.alphabet; ++j) {
                if (j == i) continue;
                v.out.push_back({first_vertex[j], j, switch_prob(i, stay)});
            }
        }
    }
    return g;
}

/// Every distinct word read off `length` consecutive vertices along graph
/// paths, starting anywhere. Intended for small lengths (exhaustive).
inline std::set<Word> enumerate_walk_words(const StateGraph& g, int length) {
    std::set<Word> words;
    if (length < 1) return words;
    Word current;
    const auto dfs = [&](auto&& self, int vertex, int remaining) -> void {
        current.push_back(g.vertices[vertex].symbol);
        if (remaining == 1) {
            words.insert(current);
        } else {
            for (const auto& e : g.vertices[vertex].out) self(self, e.to, remaining - 1);
        }
        current.pop_back();
    };
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) dfs(dfs, v, length);
    return words;
}

struct StartRule {
    std::optional<Symbol> fixed;  // nullopt: uniform over the alphabet
};

/// Draw one run length for symbol i: the minimum plus a geometric number
/// of extra repeats with success probability p_i, capped at the maximum.
/// p_i = 0 and p_i = 1 degenerate to all-minimum and all-maximum runs.
inline std::int64_t draw_run_length(const RepeatSpec& spec, Symbol i, SplitMix64& rng) {
    const int m_minus = spec.m_minus[i];
    const std::optional<int> m_plus = spec.m_plus[i];
    const double prob = *spec.p[i];
    std::int64_t extra = 0;
    if (prob >= 1.0) {
        extra = *m_plus - m_minus;
    } else if (prob > 0.0) {
        const double u = rng.next_unit();
        const double j = std::floor(std::log(u) / std::log(prob));
        extra = j >= 9.0e18 ? std::int64_t(9e18) : static_cast<std::int64_t>(j);
        if (m_plus) extra = std::min<std::int64_t>(extra, *m_plus - m_minus);
    }
    return m_minus + extra;
}

/// Sample a window of `length` symbols from the repeat process. Generation
/// starts at a run boundary; the initial symbol is uniform over the
/// alphabet unless fixed by the start rule. Deterministic in the seed, and
/// prefix-stable: a longer window with the same seed extends a shorter one.
inline SymbolSequence generate_sequence(const RepeatSpec& spec, int length,
                                        std::uint64_t seed, StartRule start = {}) {
    spec.validate();
    if (length < 1) throw InvalidSpec("sequence length must be >= 1");
    if (!spec.has_probabilities())
        throw InvalidSpec("sampling requires a repeat probability for every symbol");
    if (start.fixed && (*start.fixed < 0 || *start.fixed >= spec.alphabet))
        throw InvalidSpec("start symbol outside alphabet");

    SplitMix64 rng(seed);
    SymbolSequence seq;
    seq.symbols.reserve(length);
    seq.origin = 0;
    Symbol s = start.fixed ? *start.fixed : rng.next_below(spec.alphabet);
    while (static_cast<int>(seq.symbols.size()) < length) {
        const std::int64_t run = draw_run_length(spec, s, rng);
        const std::int64_t room = length - static_cast<std::int64_t>(seq.symbols.size());
        seq.symbols.insert(seq.symbols.end(), static_cast<std::size_t>(std::min(run, room)), s);
        if (spec.alphabet == 2) {
            s = 1 - s;
        } else {
            const int r = rng.next_below(spec.alphabet - 1);
            s = r >= s ? r + 1 : r;
        }
    }
    return seq;
}

/// Weighted Hamming distance over the time overlap of the two windows:
/// sum over shared times k of [u(k) != v(k)] * 2^(-|k|). The symbol metric
/// is discrete, so the value is bounded by 3.
inline double sequence_metric(const SymbolSequence& u, const SymbolSequence& v) {
    u.check_origin();
    v.check_origin();
    const std::ptrdiff_t lo = std::max(u.min_time(), v.min_time());
    const std::ptrdiff_t hi = std::min(u.max_time(), v.max_time());
    if (lo > hi) throw EmptyOverlap("sequence windows share no time index");
    double sum = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k)
        if (u.at_time(k) != v.at_time(k))
            sum += std::ldexp(1.0, -static_cast<int>(std::min<std::ptrdiff_t>(std::abs(k), 1074)));
    return sum;
}

}  // namespace echolab
