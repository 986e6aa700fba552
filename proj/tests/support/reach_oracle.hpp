// Brute-force verdict oracle: transitive closure by Warshall's algorithm,
// then enumeration of every (vulnerable function, public entry) pair.
#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace oracle {

struct Node
{
    std::string name;
    bool entry = false; // public or external, not a constructor
    bool constructor = false;
    bool guarded = false;
    bool vulnerable = false;
    std::vector<std::string> calls;
};

enum class Outcome { Correct, FalsePositive, NoPatternInFunctions };

struct Result
{
    Outcome outcome = Outcome::Correct;
    std::vector<std::string> offenders;   // sorted
    std::vector<std::string> unreachable; // sorted
};

/// `stray_hits`: pattern hits exist outside every function body.
inline Result evaluate(const std::vector<Node>& nodes, bool stray_hits = false)
{
    const std::size_t n = nodes.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& calls = nodes[i].calls;
            reach[i][j] = std::find(calls.begin(), calls.end(), nodes[j].name) != calls.end();
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
            }
        }
    }

    Result r;
    for (std::size_t v = 0; v < n; ++v) {
        const Node& vn = nodes[v];
        if (!vn.vulnerable || vn.constructor) {
            continue;
        }
        if (vn.entry) {
            if (!vn.guarded) {
                r.offenders.push_back(vn.name);
            }
            continue;
        }
        bool any_entry = false;
        bool exposed = false;
        for (std::size_t e = 0; e < n; ++e) {
            if (nodes[e].entry && reach[e][v]) {
                any_entry = true;
                exposed = exposed || !nodes[e].guarded;
            }
        }
        if (!any_entry) {
            r.unreachable.push_back(vn.name);
        } else if (exposed) {
            r.offenders.push_back(vn.name);
        }
    }
    std::sort(r.offenders.begin(), r.offenders.end());
    std::sort(r.unreachable.begin(), r.unreachable.end());
    const bool any_vulnerable = std::any_of(nodes.begin(), nodes.end(), [](const Node& x) { return x.vulnerable; });
    if (!any_vulnerable && stray_hits) {
        r.outcome = Outcome::NoPatternInFunctions;
    } else {
        r.outcome = r.offenders.empty() ? Outcome::Correct : Outcome::FalsePositive;
    }
    return r;
}

} // namespace oracle
