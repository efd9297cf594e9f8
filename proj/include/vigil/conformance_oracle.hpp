#ifndef VIGIL_CONFORMANCE_ORACLE_HPP
#define VIGIL_CONFORMANCE_ORACLE_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vigil/attack_model.hpp"
#include "vigil/core.hpp"

/// Brute-force reference for the detection contract. Enumerates every
/// start-to-terminal hyperedge path and every placement of ordered,
/// position-disjoint log segments onto it, entirely apart from the
/// streaming matcher's data structures. Capped: cost grows fast with log
/// size.
///
/// Instance semantics checked here (and mirrored by the matcher):
///   - a segment for hyperedge h consumes events whose types belong to h,
///     with per-type counts within the summed cardinality bounds of h's
///     vertices of that type; unrelated events in between are skipped;
///   - segment span (last ts - first ts) lies within [lo, hi] inclusive;
///   - all events of segment k+1 occur at later log positions than every
///     event of segment k (streams are ts-ordered, so this implies the
///     first-ts/last-ts ordering of partial matches);
///   - total instance span (completion ts - first event ts) <= horizon.
namespace vigil {

struct OracleOptions {
    std::size_t cap = 50;       // refuse longer logs
    Timestamp horizon = 1000;   // whole-instance age bound
};

/// All start-to-terminal hyperedge paths (intermediate nodes may carry any
/// flags). Requires an acyclic succ relation.
inline std::vector<std::vector<const Hyperedge*>> enumerate_paths(const AttackModel& m) {
    std::map<std::string, std::vector<const Hyperedge*>> adj;
    for (const auto& [from, to] : m.succ) {
        const Hyperedge* t = m.find_hyperedge(to);
        if (m.find_hyperedge(from) && t) adj[from].push_back(t);
    }
    std::vector<std::vector<const Hyperedge*>> paths;
    std::vector<const Hyperedge*> cur;
    std::function<void(const Hyperedge*)> walk = [&](const Hyperedge* h) {
        cur.push_back(h);
        if (h->is_terminal) paths.push_back(cur);
        for (const Hyperedge* nxt : adj[h->id]) walk(nxt);
        cur.pop_back();
    };
    for (const auto& h : m.hyperedges)
        if (h.is_start) walk(&h);
    return paths;
}

namespace oracle_detail {

struct TypeBounds {
    std::uint32_t min = 0;
    std::uint32_t max = 0;       // meaningful when bounded
    bool unbounded = false;
};

/// Summed per-type bounds over a hyperedge's vertices: events of one type
/// are interchangeable across same-typed vertices, so a per-vertex
/// assignment exists iff the per-type count lies in [sum of mins, sum of maxes].
inline std::map<std::string, TypeBounds> type_bounds(const AttackModel& m, const Hyperedge& h) {
    std::map<std::string, TypeBounds> out;
    for (const auto& vid : h.vertices) {
        const Vertex* v = m.find_vertex(vid);
        if (!v) continue;
        TypeBounds& b = out[v->etype];
        b.min += v->card.min;
        if (v->card.max && !b.unbounded)
            b.max += *v->card.max;
        else
            b.unbounded = true;
    }
    return out;
}

}  // namespace oracle_detail

/// Set of completion timestamps of valid instances of `model` in `log`.
inline std::set<Timestamp> run_oracle(const std::vector<Event>& log, const AttackModel& model,
                                      const OracleOptions& opts = {}) {
    if (log.size() > opts.cap)
        throw InputError("oracle refused: log of " + std::to_string(log.size()) +
                         " events exceeds cap " + std::to_string(opts.cap));
    for (std::size_t i = 1; i < log.size(); ++i)
        if (log[i].ts < log[i - 1].ts) throw InputError("oracle input log not time-ordered");

    std::set<Timestamp> completions;
    if (log.empty()) return completions;
    const std::size_t n = log.size();

    const auto paths = enumerate_paths(model);
    if (paths.empty()) return completions;

    // Distinct hyperedges used by any path -> window feasibility tables.
    std::map<std::string, std::vector<char>> feas;  // h.id -> n*n booleans
    std::map<std::string, const Hyperedge*> used;
    for (const auto& p : paths)
        for (const Hyperedge* h : p) used[h->id] = h;

    for (const auto& [hid, h] : used) {
        const auto bounds = oracle_detail::type_bounds(model, *h);
        // Per-position type membership and prefix counts per type of h.
        std::vector<int> type_index(n, -1);
        std::vector<std::string> types;
        std::map<std::string, int> tix;
        for (const auto& [t, b] : bounds) {
            tix[t] = static_cast<int>(types.size());
            types.push_back(t);
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto it = tix.find(log[i].type);
            if (it != tix.end()) type_index[i] = it->second;
        }
        const std::size_t k = types.size();
        std::vector<std::uint32_t> prefix((n + 1) * k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < k; ++t)
                prefix[(i + 1) * k + t] = prefix[i * k + t];
            if (type_index[i] >= 0) ++prefix[(i + 1) * k + type_index[i]];
        }

        std::vector<char> f(n * n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (type_index[i] < 0) continue;
            for (std::size_t j = i; j < n; ++j) {
                if (type_index[j] < 0) continue;
                const Timestamp span = log[j].ts - log[i].ts;
                if (span > h->temporal.hi) break;  // ts non-decreasing in j
                if (span < h->temporal.lo) continue;
                bool ok = true;
                for (std::size_t t = 0; t < k && ok; ++t) {
                    const std::uint32_t avail = prefix[(j + 1) * k + t] - prefix[i * k + t];
                    std::uint32_t forced = 0;
                    if (static_cast<std::size_t>(type_index[i]) == t) ++forced;
                    if (j != i && static_cast<std::size_t>(type_index[j]) == t) ++forced;
                    const auto& b = bounds.at(types[t]);
                    if (avail < b.min) ok = false;
                    if (!b.unbounded && forced > b.max) ok = false;
                }
                if (ok) f[i * n + j] = 1;
            }
        }
        feas[hid] = std::move(f);
    }

    // Per path: reach[s][j] = prefix of the path realizable with the first
    // event at position s and the current segment ending at j.
    std::vector<char> reach(n * n), next(n * n), anyPrev(n * n);
    for (const auto& path : paths) {
        {
            const auto& f0 = feas[path[0]->id];
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t j = 0; j < n; ++j) reach[s * n + j] = f0[s * n + j];
        }
        for (std::size_t seg = 1; seg < path.size(); ++seg) {
            const auto& fk = feas[path[seg]->id];
            // anyPrev[s][e] = OR over e' <= e of reach[s][e']
            for (std::size_t s = 0; s < n; ++s) {
                char acc = 0;
                for (std::size_t e = 0; e < n; ++e) {
                    acc |= reach[s * n + e];
                    anyPrev[s * n + e] = acc;
                }
            }
            std::fill(next.begin(), next.end(), 0);
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t i = 1; i < n; ++i) {
                    if (!anyPrev[s * n + (i - 1)]) continue;
                    for (std::size_t j = i; j < n; ++j)
                        if (fk[i * n + j]) next[s * n + j] = 1;
                }
            std::swap(reach, next);
        }
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[s * n + j] && log[j].ts - log[s].ts <= opts.horizon)
                    completions.insert(log[j].ts);
    }
    return completions;
}

}  // namespace vigil

#endif  // VIGIL_CONFORMANCE_ORACLE_HPP
