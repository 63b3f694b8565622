#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <speckit/series.hpp>

namespace speckit {

// Brute-force structures of the doubleton model: n labelled doubletons, each
// carrying a left and a right atom, and partial matchings on the 2n atoms.

enum class Side { Left, Right };

struct AtomRef {
    int doubleton = 1; // 1-based label
    Side side = Side::Left;

    friend auto operator<=>(const AtomRef &, const AtomRef &) = default;
};

struct Matching {
    int n = 0;
    // Each pair has first < second; pairs sorted by first atom.
    std::vector<std::pair<AtomRef, AtomRef>> pairs;

    friend bool operator==(const Matching &, const Matching &) = default;
};

// Chain sizes (number of doubletons per component), sorted descending.
// A self-paired doubleton is a closed chain of size 1 and an untouched one
// an open chain of size 1.
struct ComponentProfile {
    std::vector<int> closed_chains;
    std::vector<int> open_chains;

    friend bool operator==(const ComponentProfile &, const ComponentProfile &) = default;
};

struct OracleLimits {
    int max_doubletons = 7; // 14 atoms
    int max_points = 16;    // involution counts

    // Defaults, with max_doubletons raised by SPECKIT_MAX_N when set.
    static OracleLimits from_env();
};

// Visits every partial matching on 2n atoms exactly once. Canonical
// recursion: the smallest free atom is either left unmatched or paired with
// a larger free atom.
void for_each_matching(int n, const std::function<void(const Matching &)> &visit,
                       const OracleLimits &limits = OracleLimits::from_env());
std::vector<Matching> enumerate_matchings(int n, const OracleLimits &limits = OracleLimits::from_env());

ComponentProfile classify(const Matching &m);

struct MarkerVars {
    std::string closed = "u";
    std::string open = "v";
};

// Sum over n <= n_max and all matchings of
//   x^(#unmatched atoms) y^(#matched atoms) t^n / n!
// optionally times closed^(#closed chains) open^(#open chains).
// Caps: x, y <= 2 n_max, t <= n_max, markers <= n_max + 1.
Series oracle_egf(int n_max, const std::optional<MarkerVars> &markers = std::nullopt,
                  const OracleLimits &limits = OracleLimits::from_env());

// counts[k] = number of partial matchings with k pairs on n labelled points,
// by exhaustive enumeration.
std::vector<std::uint64_t> enumerate_involutions(int n, const OracleLimits &limits = OracleLimits::from_env());

struct ChainCounts {
    std::uint64_t closed = 0;
    std::uint64_t open = 0;
    friend bool operator==(const ChainCounts &, const ChainCounts &) = default;
};

// Matchings on j doubletons forming a single closed chain / open chain that
// uses all j doubletons.
ChainCounts chain_counts(int j, const OracleLimits &limits = OracleLimits::from_env());

// "1L-2R,1R-2L" (empty string for the empty matching).
std::string format_matching(const Matching &m);
// "C:[2] O:[1,1]"
std::string format_profile(const ComponentProfile &p);

} // namespace speckit
