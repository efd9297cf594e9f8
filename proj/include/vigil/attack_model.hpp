#ifndef VIGIL_ATTACK_MODEL_HPP
#define VIGIL_ATTACK_MODEL_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vigil/core.hpp"
#include "vigil/json_io.hpp"

/// Typed temporal hypergraph attack models: a DAG of hyperedges over typed
/// vertices. A start-to-terminal path matched by ordered log segments is an
/// attack instance.
namespace vigil {

/// "+" is (1, unbounded); "2..5" is (2,5); "3" is (3,3); "2..+" is (2, unbounded).
struct CardinalityConstraint {
    std::uint32_t min = 1;
    std::optional<std::uint32_t> max;  // nullopt = unbounded

    bool operator==(const CardinalityConstraint&) const = default;
};

struct Vertex {
    std::string id;
    std::string etype;
    CardinalityConstraint card;

    bool operator==(const Vertex&) const = default;
};

/// Inclusive bounds on the span (last.ts - first.ts) of a matched segment.
struct TemporalConstraint {
    Timestamp lo = 0;
    Timestamp hi = 0;

    bool operator==(const TemporalConstraint&) const = default;
};

struct Hyperedge {
    std::string id;
    std::vector<std::string> vertices;  // sorted vertex ids
    TemporalConstraint temporal;
    bool is_start = false;
    bool is_terminal = false;

    bool operator==(const Hyperedge&) const = default;
};

struct AttackModel {
    std::string id;
    std::vector<Vertex> vertices;      // sorted by id
    std::vector<Hyperedge> hyperedges; // sorted by id
    std::vector<std::pair<std::string, std::string>> succ;  // sorted pairs

    bool operator==(const AttackModel&) const = default;

    const Vertex* find_vertex(const std::string& id_) const {
        for (const auto& v : vertices)
            if (v.id == id_) return &v;
        return nullptr;
    }
    const Hyperedge* find_hyperedge(const std::string& id_) const {
        for (const auto& h : hyperedges)
            if (h.id == id_) return &h;
        return nullptr;
    }
};

struct Diagnostic {
    enum class Code {
        DuplicateVertexId,
        DuplicateHyperedgeId,
        DanglingVertexRef,
        EmptyHyperedge,
        BadCardinality,
        BadTemporalBounds,
        UnknownSuccEndpoint,
        Cycle,
        NoStart,
        NoTerminal,
        Unreachable,
    };
    Code code;
    std::string subject;  // offending id, or a cycle description
    std::string message;

    bool operator<(const Diagnostic& o) const {
        if (code != o.code) return code < o.code;
        if (subject != o.subject) return subject < o.subject;
        return message < o.message;
    }
    bool operator==(const Diagnostic&) const = default;
};

inline const char* to_string(Diagnostic::Code c) {
    switch (c) {
        case Diagnostic::Code::DuplicateVertexId: return "duplicate-vertex-id";
        case Diagnostic::Code::DuplicateHyperedgeId: return "duplicate-hyperedge-id";
        case Diagnostic::Code::DanglingVertexRef: return "dangling-vertex-ref";
        case Diagnostic::Code::EmptyHyperedge: return "empty-hyperedge";
        case Diagnostic::Code::BadCardinality: return "bad-cardinality";
        case Diagnostic::Code::BadTemporalBounds: return "bad-temporal-bounds";
        case Diagnostic::Code::UnknownSuccEndpoint: return "unknown-succ-endpoint";
        case Diagnostic::Code::Cycle: return "cycle";
        case Diagnostic::Code::NoStart: return "no-start";
        case Diagnostic::Code::NoTerminal: return "no-terminal";
        case Diagnostic::Code::Unreachable: return "unreachable";
    }
    return "?";
}

/// Structural validation. Empty result iff the model is well-formed:
/// unique ids, resolvable references, lo <= hi, cardinality bounds sane,
/// succ acyclic, at least one start and one terminal, and every hyperedge
/// on some start-to-terminal path. Output is sorted, so it is independent
/// of declaration order.
inline std::vector<Diagnostic> validate(const AttackModel& m) {
    std::vector<Diagnostic> out;
    std::set<std::string> vertex_ids, hyper_ids;

    for (const auto& v : m.vertices) {
        if (!vertex_ids.insert(v.id).second)
            out.push_back({Diagnostic::Code::DuplicateVertexId, v.id, "vertex id repeats"});
        if (v.card.min < 1 || (v.card.max && *v.card.max < v.card.min))
            out.push_back({Diagnostic::Code::BadCardinality, v.id,
                           "cardinality must satisfy 1 <= min <= max"});
    }
    for (const auto& h : m.hyperedges) {
        if (!hyper_ids.insert(h.id).second)
            out.push_back({Diagnostic::Code::DuplicateHyperedgeId, h.id, "hyperedge id repeats"});
        if (h.vertices.empty())
            out.push_back({Diagnostic::Code::EmptyHyperedge, h.id, "hyperedge has no vertices"});
        for (const auto& vid : h.vertices)
            if (!m.find_vertex(vid))
                out.push_back({Diagnostic::Code::DanglingVertexRef, h.id,
                               "references unknown vertex '" + vid + "'"});
        if (h.temporal.lo > h.temporal.hi)
            out.push_back({Diagnostic::Code::BadTemporalBounds, h.id,
                           "temporal lo exceeds hi"});
        if (h.temporal.lo < 0)
            out.push_back({Diagnostic::Code::BadTemporalBounds, h.id, "temporal lo negative"});
    }

    std::map<std::string, std::vector<std::string>> adj, radj;
    for (const auto& [from, to] : m.succ) {
        bool ok = true;
        if (!hyper_ids.count(from)) {
            out.push_back({Diagnostic::Code::UnknownSuccEndpoint, from, "succ source unknown"});
            ok = false;
        }
        if (!hyper_ids.count(to)) {
            out.push_back({Diagnostic::Code::UnknownSuccEndpoint, to, "succ target unknown"});
            ok = false;
        }
        if (ok) {
            adj[from].push_back(to);
            radj[to].push_back(from);
        }
    }
    for (auto& [k, v] : adj) std::sort(v.begin(), v.end());
    for (auto& [k, v] : radj) std::sort(v.begin(), v.end());

    // Cycle check: iterative DFS in sorted id order, report back edges.
    std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
    std::vector<std::string> ids(hyper_ids.begin(), hyper_ids.end());
    std::function<void(const std::string&)> dfs = [&](const std::string& u) {
        color[u] = 1;
        for (const auto& v : adj[u]) {
            if (color[v] == 1)
                out.push_back({Diagnostic::Code::Cycle, u, "succ edge " + u + "->" + v +
                                                              " closes a cycle"});
            else if (color[v] == 0)
                dfs(v);
        }
        color[u] = 2;
    };
    for (const auto& id : ids)
        if (color[id] == 0) dfs(id);

    bool has_start = false, has_terminal = false;
    for (const auto& h : m.hyperedges) {
        has_start |= h.is_start;
        has_terminal |= h.is_terminal;
    }
    if (!m.hyperedges.empty() && !has_start)
        out.push_back({Diagnostic::Code::NoStart, m.id, "no start hyperedge"});
    if (!m.hyperedges.empty() && !has_terminal)
        out.push_back({Diagnostic::Code::NoTerminal, m.id, "no terminal hyperedge"});
    if (m.hyperedges.empty())
        out.push_back({Diagnostic::Code::NoStart, m.id, "model has no hyperedges"});

    // Reachability: forward from starts, backward from terminals.
    if (has_start && has_terminal) {
        std::set<std::string> fwd, bwd;
        std::vector<std::string> stack;
        for (const auto& h : m.hyperedges)
            if (h.is_start && hyper_ids.count(h.id)) {
                if (fwd.insert(h.id).second) stack.push_back(h.id);
            }
        while (!stack.empty()) {
            std::string u = stack.back();
            stack.pop_back();
            for (const auto& v : adj[u])
                if (fwd.insert(v).second) stack.push_back(v);
        }
        for (const auto& h : m.hyperedges)
            if (h.is_terminal && hyper_ids.count(h.id)) {
                if (bwd.insert(h.id).second) stack.push_back(h.id);
            }
        while (!stack.empty()) {
            std::string u = stack.back();
            stack.pop_back();
            for (const auto& v : radj[u])
                if (bwd.insert(v).second) stack.push_back(v);
        }
        for (const auto& h : m.hyperedges)
            if (!fwd.count(h.id) || !bwd.count(h.id))
                out.push_back({Diagnostic::Code::Unreachable, h.id,
                               "not on any start-to-terminal path"});
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool is_valid(const AttackModel& m) { return validate(m).empty(); }

// ---------------------------------------------------------------------------
// Document format (strict: unknown keys rejected).

inline CardinalityConstraint parse_cardinality(const std::string& s, std::size_t line = 0) {
    CardinalityConstraint c;
    if (s == "+") {
        c.min = 1;
        c.max.reset();
        return c;
    }
    auto parse_uint = [&](const std::string& part) -> std::uint32_t {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("bad cardinality '" + s + "'", line);
        unsigned long v = std::stoul(part);
        if (v == 0 || v > std::numeric_limits<std::uint32_t>::max())
            throw ParseError("cardinality out of range in '" + s + "'", line);
        return static_cast<std::uint32_t>(v);
    };
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        c.min = parse_uint(s);
        c.max = c.min;
        return c;
    }
    c.min = parse_uint(s.substr(0, dots));
    const std::string hi = s.substr(dots + 2);
    if (hi == "+")
        c.max.reset();
    else {
        c.max = parse_uint(hi);
        if (*c.max < c.min) throw ParseError("cardinality max below min in '" + s + "'", line);
    }
    return c;
}

inline std::string cardinality_to_string(const CardinalityConstraint& c) {
    if (!c.max) return c.min == 1 ? "+" : std::to_string(c.min) + "..+";
    if (*c.max == c.min) return std::to_string(c.min);
    return std::to_string(c.min) + ".." + std::to_string(*c.max);
}

namespace detail {
inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) throw ParseError("unknown key '" + it.key() + "' in " + where, 0);
    }
}
}  // namespace detail

/// Parses a model document (syntax only; run validate() for structure).
/// Vertices, hyperedges and succ pairs are normalized to sorted order.
inline AttackModel parse_model(const json& j) {
    if (!j.is_object()) throw ParseError("model document must be a JSON object", 0);
    detail::reject_unknown_keys(j, {"id", "vertices", "hyperedges", "succ"}, "model");
    for (const char* key : {"id", "vertices", "hyperedges"})
        if (!j.contains(key)) throw ParseError(std::string("model missing '") + key + "'", 0);

    AttackModel m;
    m.id = j["id"].get<std::string>();
    if (m.id.empty()) throw ParseError("model id must be non-empty", 0);

    for (const auto& vj : j["vertices"]) {
        detail::reject_unknown_keys(vj, {"id", "type", "card"}, "vertex");
        for (const char* key : {"id", "type", "card"})
            if (!vj.contains(key)) throw ParseError(std::string("vertex missing '") + key + "'", 0);
        Vertex v;
        v.id = vj["id"].get<std::string>();
        v.etype = vj["type"].get<std::string>();
        if (v.etype.empty()) throw ParseError("vertex type must be non-empty", 0);
        v.card = parse_cardinality(vj["card"].get<std::string>());
        m.vertices.push_back(std::move(v));
    }
    for (const auto& hj : j["hyperedges"]) {
        detail::reject_unknown_keys(hj, {"id", "vertices", "temporal", "start", "terminal"},
                                    "hyperedge");
        for (const char* key : {"id", "vertices", "temporal"})
            if (!hj.contains(key))
                throw ParseError(std::string("hyperedge missing '") + key + "'", 0);
        Hyperedge h;
        h.id = hj["id"].get<std::string>();
        for (const auto& vid : hj["vertices"]) h.vertices.push_back(vid.get<std::string>());
        std::sort(h.vertices.begin(), h.vertices.end());
        h.vertices.erase(std::unique(h.vertices.begin(), h.vertices.end()), h.vertices.end());
        const auto& t = hj["temporal"];
        if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() ||
            !t[1].is_number_integer())
            throw ParseError("temporal must be [lo, hi] integers for hyperedge '" + h.id + "'", 0);
        h.temporal.lo = t[0].get<std::int64_t>();
        h.temporal.hi = t[1].get<std::int64_t>();
        if (h.temporal.lo < 0 || h.temporal.hi < 0)
            throw ParseError("temporal bounds must be non-negative for '" + h.id + "'", 0);
        h.is_start = hj.value("start", false);
        h.is_terminal = hj.value("terminal", false);
        m.hyperedges.push_back(std::move(h));
    }
    if (j.contains("succ")) {
        for (const auto& pj : j["succ"]) {
            if (!pj.is_array() || pj.size() != 2)
                throw ParseError("succ entries must be [from, to] pairs", 0);
            m.succ.emplace_back(pj[0].get<std::string>(), pj[1].get<std::string>());
        }
    }

    std::sort(m.vertices.begin(), m.vertices.end(),
              [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
    std::sort(m.hyperedges.begin(), m.hyperedges.end(),
              [](const Hyperedge& a, const Hyperedge& b) { return a.id < b.id; });
    std::sort(m.succ.begin(), m.succ.end());
    m.succ.erase(std::unique(m.succ.begin(), m.succ.end()), m.succ.end());
    return m;
}

inline AttackModel parse_model(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ParseError("empty model document", 0);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON in model document", 0);
    return parse_model(j);
}

/// Parse + validate; structural diagnostics become an InputError.
inline AttackModel load_model(const std::string& text) {
    AttackModel m = parse_model(text);
    auto diags = validate(m);
    if (!diags.empty()) {
        std::string msg = "model '" + m.id + "' is not well-formed:";
        for (const auto& d : diags)
            msg += "\n  [" + std::string(to_string(d.code)) + "] " + d.subject + ": " + d.message;
        throw InputError(msg);
    }
    return m;
}

inline json store_model(const AttackModel& m) {
    json j;
    j["id"] = m.id;
    json vs = json::array();
    for (const auto& v : m.vertices) {
        json vj;
        vj["id"] = v.id;
        vj["type"] = v.etype;
        vj["card"] = cardinality_to_string(v.card);
        vs.push_back(vj);
    }
    j["vertices"] = vs;
    json hs = json::array();
    for (const auto& h : m.hyperedges) {
        json hj;
        hj["id"] = h.id;
        hj["vertices"] = h.vertices;
        hj["temporal"] = json::array({h.temporal.lo, h.temporal.hi});
        hj["start"] = h.is_start;
        hj["terminal"] = h.is_terminal;
        hs.push_back(hj);
    }
    j["hyperedges"] = hs;
    json sc = json::array();
    for (const auto& [a, b] : m.succ) sc.push_back(json::array({a, b}));
    j["succ"] = sc;
    return j;
}

/// Minimum total span of any instance: min over start-to-terminal paths of
/// the sum of lo bounds (segments may abut). Requires a valid model.
inline Timestamp min_span(const AttackModel& m) {
    constexpr Timestamp kInf = std::numeric_limits<Timestamp>::max() / 4;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [from, to] : m.succ) adj[from].push_back(to);
    std::map<std::string, Timestamp> memo;
    std::function<Timestamp(const Hyperedge&)> best = [&](const Hyperedge& h) -> Timestamp {
        auto it = memo.find(h.id);
        if (it != memo.end()) return it->second;
        memo[h.id] = kInf;  // cycle guard; valid models are acyclic
        Timestamp tail = h.is_terminal ? 0 : kInf;
        for (const auto& sid : adj[h.id]) {
            const Hyperedge* s = m.find_hyperedge(sid);
            if (s) tail = std::min(tail, best(*s));
        }
        const Timestamp r = tail >= kInf ? kInf : h.temporal.lo + tail;
        memo[h.id] = r;
        return r;
    };
    Timestamp result = kInf;
    for (const auto& h : m.hyperedges)
        if (h.is_start) result = std::min(result, best(h));
    if (result >= kInf) throw InputError("model '" + m.id + "' has no start-to-terminal path");
    return result;
}

}  // namespace vigil

#endif  // VIGIL_ATTACK_MODEL_HPP
