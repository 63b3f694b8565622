#include <speckit/errors.hpp>
#include <speckit/oracle.hpp>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <tuple>

namespace speckit {

OracleLimits OracleLimits::from_env()
{
    OracleLimits limits;
    if (const char *env = std::getenv("SPECKIT_MAX_N")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v < 64) {
            limits.max_doubletons = static_cast<int>(v);
        }
    }
    return limits;
}

namespace {

void check_n(int n, int cap, const char *what)
{
    if (n < 0) {
        throw UsageError(std::string(what) + ": size must be non-negative");
    }
    if (n > cap) {
        throw CapExceeded(std::string(what) + ": size " + std::to_string(n) + " exceeds cap " + std::to_string(cap)
                          + " (raise with SPECKIT_MAX_N or --max-n)");
    }
}

AtomRef atom_of(int index)
{
    return {index / 2 + 1, index % 2 == 0 ? Side::Left : Side::Right};
}

// Atoms are 0..2n-1; atom 2i is the left atom of doubleton i+1.
struct MatchingWalker {
    int atoms;
    std::vector<int> partner;
    std::vector<std::pair<int, int>> pairs;
    const std::function<void(const std::vector<std::pair<int, int>> &)> &visit;

    void run(int next)
    {
        while (next < atoms && partner[static_cast<std::size_t>(next)] >= 0) {
            ++next;
        }
        if (next == atoms) {
            visit(pairs);
            return;
        }
        // Leave `next` unmatched: mark it as its own partner.
        partner[static_cast<std::size_t>(next)] = next;
        run(next + 1);
        for (int other = next + 1; other < atoms; ++other) {
            if (partner[static_cast<std::size_t>(other)] >= 0) {
                continue;
            }
            partner[static_cast<std::size_t>(next)] = other;
            partner[static_cast<std::size_t>(other)] = next;
            pairs.emplace_back(next, other);
            run(next + 1);
            pairs.pop_back();
            partner[static_cast<std::size_t>(other)] = -1;
        }
        partner[static_cast<std::size_t>(next)] = -1;
    }
};

void walk(int atoms, const std::function<void(const std::vector<std::pair<int, int>> &)> &visit)
{
    MatchingWalker w{atoms, std::vector<int>(static_cast<std::size_t>(atoms), -1), {}, visit};
    w.run(0);
}

// Profile from raw atom pairs. Components are found with union-find over
// doubletons; an atom is matched iff it appears in a pair.
ComponentProfile profile_of(int n, const std::vector<std::pair<int, int>> &pairs)
{
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    std::vector<int> matched_atoms(static_cast<std::size_t>(n), 0);
    for (const auto &[a, b] : pairs) {
        ++matched_atoms[static_cast<std::size_t>(a / 2)];
        ++matched_atoms[static_cast<std::size_t>(b / 2)];
        parent[static_cast<std::size_t>(find(a / 2))] = find(b / 2);
    }
    std::map<int, std::pair<int, int>> comps; // root -> (size, unmatched atoms)
    for (int d = 0; d < n; ++d) {
        auto &c = comps[find(d)];
        c.first += 1;
        c.second += 2 - matched_atoms[static_cast<std::size_t>(d)];
    }
    ComponentProfile p;
    for (const auto &[root, c] : comps) {
        (c.second == 0 ? p.closed_chains : p.open_chains).push_back(c.first);
    }
    std::sort(p.closed_chains.rbegin(), p.closed_chains.rend());
    std::sort(p.open_chains.rbegin(), p.open_chains.rend());
    return p;
}

int atom_index(const AtomRef &a)
{
    return 2 * (a.doubleton - 1) + (a.side == Side::Left ? 0 : 1);
}

} // namespace

void for_each_matching(int n, const std::function<void(const Matching &)> &visit, const OracleLimits &limits)
{
    check_n(n, limits.max_doubletons, "enumerate_matchings");
    Matching m;
    m.n = n;
    walk(2 * n, [&](const std::vector<std::pair<int, int>> &pairs) {
        m.pairs.clear();
        for (const auto &[a, b] : pairs) {
            m.pairs.emplace_back(atom_of(a), atom_of(b));
        }
        visit(m);
    });
}

std::vector<Matching> enumerate_matchings(int n, const OracleLimits &limits)
{
    std::vector<Matching> out;
    for_each_matching(n, [&](const Matching &m) { out.push_back(m); }, limits);
    return out;
}

ComponentProfile classify(const Matching &m)
{
    std::vector<std::pair<int, int>> pairs;
    std::vector<bool> seen(static_cast<std::size_t>(2 * m.n), false);
    for (const auto &[a, b] : m.pairs) {
        const int ia = atom_index(a);
        const int ib = atom_index(b);
        for (int i : {ia, ib}) {
            if (i < 0 || i >= 2 * m.n || seen[static_cast<std::size_t>(i)] || ia == ib) {
                throw UsageError("classify: invalid matching " + format_matching(m));
            }
            seen[static_cast<std::size_t>(i)] = true;
        }
        pairs.emplace_back(ia, ib);
    }
    return profile_of(m.n, pairs);
}

Series oracle_egf(int n_max, const std::optional<MarkerVars> &markers, const OracleLimits &limits)
{
    check_n(n_max, limits.max_doubletons, "oracle_egf");
    std::map<std::string, int> caps{{"x", 2 * n_max}, {"y", 2 * n_max}, {"t", n_max}};
    if (markers) {
        caps[markers->closed] = n_max + 1;
        caps[markers->open] = n_max + 1;
    }
    const Truncation truncation(caps);

    // (unmatched, matched, n, closed, open) -> number of structures
    std::map<std::tuple<int, int, int, int, int>, std::uint64_t> counts;
    for (int n = 0; n <= n_max; ++n) {
        walk(2 * n, [&](const std::vector<std::pair<int, int>> &pairs) {
            const int matched = 2 * static_cast<int>(pairs.size());
            int closed = 0;
            int open = 0;
            if (markers) {
                const auto p = profile_of(n, pairs);
                closed = static_cast<int>(p.closed_chains.size());
                open = static_cast<int>(p.open_chains.size());
            }
            ++counts[{2 * n - matched, matched, n, closed, open}];
        });
    }

    std::vector<std::pair<MultiIndex, Rational>> terms;
    for (const auto &[key, count] : counts) {
        const auto [unmatched, matched, n, closed, open] = key;
        MultiIndex m{{"x", unmatched}, {"y", matched}, {"t", n}};
        if (markers) {
            m[markers->closed] = closed;
            m[markers->open] = open;
        }
        const Rational c = Rational(static_cast<long>(count)) / Rational::factorial(static_cast<unsigned>(n));
        terms.emplace_back(std::move(m), c);
    }
    return Series::from_terms(truncation, terms);
}

std::vector<std::uint64_t> enumerate_involutions(int n, const OracleLimits &limits)
{
    check_n(n, limits.max_points, "enumerate_involutions");
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n / 2 + 1), 0);
    walk(n, [&](const std::vector<std::pair<int, int>> &pairs) { ++counts[pairs.size()]; });
    return counts;
}

ChainCounts chain_counts(int j, const OracleLimits &limits)
{
    check_n(j, limits.max_doubletons, "chain_counts");
    ChainCounts out;
    if (j == 0) {
        return out;
    }
    walk(2 * j, [&](const std::vector<std::pair<int, int>> &pairs) {
        const auto p = profile_of(j, pairs);
        if (p.closed_chains.size() == 1 && p.open_chains.empty()) {
            ++out.closed;
        } else if (p.open_chains.size() == 1 && p.closed_chains.empty()) {
            ++out.open;
        }
    });
    return out;
}

std::string format_matching(const Matching &m)
{
    auto atom = [](const AtomRef &a) { return std::to_string(a.doubleton) + (a.side == Side::Left ? "L" : "R"); };
    std::string out;
    for (const auto &[a, b] : m.pairs) {
        if (!out.empty()) {
            out += ',';
        }
        out += atom(a) + "-" + atom(b);
    }
    return out;
}

std::string format_profile(const ComponentProfile &p)
{
    auto list = [](const std::vector<int> &v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? "," : "") + std::to_string(v[i]);
        }
        return s + "]";
    };
    return "C:" + list(p.closed_chains) + " O:" + list(p.open_chains);
}

} // namespace speckit
