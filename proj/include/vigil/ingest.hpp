#ifndef VIGIL_INGEST_HPP
#define VIGIL_INGEST_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "vigil/core.hpp"
#include "vigil/json_io.hpp"

/// Stream cleaning: blacklist filtering and temporal coalescence, plus the
/// k-way merge that turns several per-source streams into one timeline.
/// Stages compose synchronously (pull-based), so the bounded-queue
/// backpressure contract holds trivially: a stage only produces what the
/// consumer asks for.
namespace vigil {

/// Glob match supporting '*' and '?'. Iterative two-pointer form.
inline bool glob_match(const std::string& pattern, const std::string& text) {
    std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

/// Blacklist rule: field=glob pairs, AND within a rule. A rule with a
/// constraint on every listed field matches an event only if all match.
struct FilterRule {
    std::string type_pattern;    // empty = unconstrained
    std::string source_pattern;
    std::map<std::string, std::string> attr_patterns;

    bool constrained() const {
        return !type_pattern.empty() || !source_pattern.empty() || !attr_patterns.empty();
    }

    bool matches(const Event& e) const {
        if (!type_pattern.empty() && !glob_match(type_pattern, e.type)) return false;
        if (!source_pattern.empty() && !glob_match(source_pattern, e.source)) return false;
        for (const auto& [name, pat] : attr_patterns) {
            auto it = e.attrs.find(name);
            if (it == e.attrs.end()) return false;
            const std::string text = std::holds_alternative<double>(it->second)
                                         ? format_double(std::get<double>(it->second))
                                         : std::get<std::string>(it->second);
            if (!glob_match(pat, text)) return false;
        }
        return true;
    }
};

/// Rules are OR'd: an event is dropped iff some rule matches it.
inline bool matches_any(const std::vector<FilterRule>& rules, const Event& e) {
    for (const auto& r : rules)
        if (r.matches(e)) return true;
    return false;
}

/// Keeps exactly the events matching no rule, in order.
inline std::vector<Event> filter_events(const std::vector<Event>& in,
                                        const std::vector<FilterRule>& rules) {
    std::vector<Event> out;
    out.reserve(in.size());
    for (const auto& e : in)
        if (!matches_any(rules, e)) out.push_back(e);
    return out;
}

enum class CoalesceKeyField { Type, Source, Area };

struct CoalescencePolicy {
    Timestamp window = 5;                  // >= 1
    std::vector<CoalesceKeyField> key = {  // non-empty
        CoalesceKeyField::Type, CoalesceKeyField::Source};
};

/// Sliding (gap-chained) tupling: an event joins its key's open group iff
/// its gap to the last absorbed event is strictly below the window; the
/// representative keeps the earliest ts and gains a "count" attr. A
/// watermark buffer delays emission so representatives leave ordered by
/// (first ts, arrival), even when one chain outlives later groups.
class Coalescer {
public:
    explicit Coalescer(CoalescencePolicy policy) : policy_(std::move(policy)) {
        if (policy_.window < 1) throw ConfigError("coalescence window must be >= 1");
        if (policy_.key.empty()) throw ConfigError("coalescence key must be non-empty");
    }

    std::vector<Event> push(const Event& e) {
        close_expired(e.ts);
        const std::string k = key_of(e);
        auto it = groups_.find(k);
        if (it != groups_.end()) {
            Group& g = it->second;
            ++g.count;
            g.last_absorbed = e.ts;
            deadlines_.push({g.last_absorbed + policy_.window, k, g.seq});
        } else {
            Group g;
            g.rep = e;
            g.first_ts = e.ts;
            g.last_absorbed = e.ts;
            g.count = 1;
            g.seq = next_seq_++;
            deadlines_.push({e.ts + policy_.window, k, g.seq});
            groups_.emplace(k, std::move(g));
        }
        return release();
    }

    /// Closes everything and returns the remaining representatives.
    std::vector<Event> finish() {
        for (auto& [k, g] : groups_) pending_.push(make_rep(g));
        groups_.clear();
        return release();
    }

private:
    struct Group {
        Event rep;
        Timestamp first_ts = 0;
        Timestamp last_absorbed = 0;
        std::uint64_t count = 0;
        std::uint64_t seq = 0;
    };
    struct Deadline {
        Timestamp at;
        std::string key;
        std::uint64_t seq;
        bool operator>(const Deadline& o) const { return at > o.at; }
    };
    struct PendingRep {
        Event rep;
        Timestamp first_ts;
        std::uint64_t seq;
        bool operator>(const PendingRep& o) const {
            if (first_ts != o.first_ts) return first_ts > o.first_ts;
            return seq > o.seq;
        }
    };

    std::string key_of(const Event& e) const {
        std::string k;
        for (auto f : policy_.key) {
            switch (f) {
                case CoalesceKeyField::Type: k += e.type; break;
                case CoalesceKeyField::Source: k += e.source; break;
                case CoalesceKeyField::Area: k += e.area; break;
            }
            k += '\x1f';
        }
        return k;
    }

    PendingRep make_rep(Group& g) {
        g.rep.attrs["count"] = static_cast<double>(g.count);
        return PendingRep{std::move(g.rep), g.first_ts, g.seq};
    }

    void close_expired(Timestamp now) {
        while (!deadlines_.empty() && deadlines_.top().at <= now) {
            Deadline d = deadlines_.top();
            deadlines_.pop();
            auto it = groups_.find(d.key);
            if (it == groups_.end() || it->second.seq != d.seq) continue;  // stale
            Group& g = it->second;
            if (g.last_absorbed + policy_.window <= now) {
                pending_.push(make_rep(g));
                groups_.erase(it);
            }
            // else a later absorbed event extended the chain; its own
            // deadline entry is already queued.
        }
    }

    std::vector<Event> release() {
        std::vector<Event> out;
        while (!pending_.empty()) {
            const PendingRep& top = pending_.top();
            bool safe = true;
            for (const auto& [k, g] : groups_) {
                if (g.first_ts < top.first_ts ||
                    (g.first_ts == top.first_ts && g.seq < top.seq)) {
                    safe = false;
                    break;
                }
            }
            if (!safe) break;
            out.push_back(top.rep);
            pending_.pop();
        }
        return out;
    }

    CoalescencePolicy policy_;
    std::unordered_map<std::string, Group> groups_;
    std::priority_queue<Deadline, std::vector<Deadline>, std::greater<>> deadlines_;
    std::priority_queue<PendingRep, std::vector<PendingRep>, std::greater<>> pending_;
    std::uint64_t next_seq_ = 0;
};

/// Whole-stream convenience form.
inline std::vector<Event> coalesce_events(const std::vector<Event>& in,
                                          const CoalescencePolicy& policy) {
    Coalescer c(policy);
    std::vector<Event> out;
    for (const auto& e : in)
        for (auto& r : c.push(e)) out.push_back(std::move(r));
    for (auto& r : c.finish()) out.push_back(std::move(r));
    return out;
}

/// Merges per-file streams into one timeline ordered by (ts, source).
/// Each input must already be non-decreasing in ts.
inline std::vector<Event> merge_event_streams(std::vector<std::vector<Event>> streams) {
    struct Head {
        Timestamp ts;
        const std::string* source;
        std::size_t stream;
        std::size_t pos;
        bool operator>(const Head& o) const {
            if (ts != o.ts) return ts > o.ts;
            if (*source != *o.source) return *source > *o.source;
            return stream > o.stream;
        }
    };
    std::priority_queue<Head, std::vector<Head>, std::greater<>> heads;
    for (std::size_t s = 0; s < streams.size(); ++s) {
        for (std::size_t i = 1; i < streams[s].size(); ++i)
            if (streams[s][i].ts < streams[s][i - 1].ts)
                throw InputError("event stream " + std::to_string(s) +
                                 " is not time-ordered at record " + std::to_string(i));
        if (!streams[s].empty()) heads.push({streams[s][0].ts, &streams[s][0].source, s, 0});
    }
    std::vector<Event> out;
    while (!heads.empty()) {
        Head h = heads.top();
        heads.pop();
        out.push_back(std::move(streams[h.stream][h.pos]));
        const std::size_t next = h.pos + 1;
        if (next < streams[h.stream].size())
            heads.push({streams[h.stream][next].ts, &streams[h.stream][next].source,
                        h.stream, next});
    }
    return out;
}

inline std::vector<Event> read_events(std::istream& in) {
    std::vector<Event> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        out.push_back(parse_event_line(line, n));
    }
    return out;
}

inline std::vector<MetricSample> read_metrics(std::istream& in) {
    std::vector<MetricSample> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        out.push_back(parse_metric_line(line, n));
    }
    return out;
}

struct IngestConfig {
    std::vector<FilterRule> filters;
    bool coalesce = false;
    CoalescencePolicy coalescence;
};

inline FilterRule filter_rule_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("filter rule must be an object");
    FilterRule r;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it->is_string()) throw ConfigError("filter pattern for '" + it.key() + "' must be a string");
        const std::string pat = it->get<std::string>();
        if (pat.empty()) throw ConfigError("empty filter pattern for '" + it.key() + "'");
        if (it.key() == "type" || it.key() == "etype")
            r.type_pattern = pat;
        else if (it.key() == "source")
            r.source_pattern = pat;
        else if (it.key().rfind("attr.", 0) == 0)
            r.attr_patterns[it.key().substr(5)] = pat;
        else
            throw ConfigError("unknown filter field '" + it.key() +
                              "' (expected type, source, or attr.<name>)");
    }
    if (!r.constrained()) throw ConfigError("filter rule needs at least one field constraint");
    return r;
}

inline CoalescencePolicy coalescence_from_json(const json& j) {
    CoalescencePolicy p;
    if (!j.is_object()) throw ConfigError("coalescence must be an object");
    if (j.contains("window")) {
        if (!j["window"].is_number_integer() || j["window"].get<std::int64_t>() < 1)
            throw ConfigError("coalescence window must be an integer >= 1");
        p.window = j["window"].get<std::int64_t>();
    }
    if (j.contains("key")) {
        p.key.clear();
        for (const auto& f : j["key"]) {
            const std::string name = f.get<std::string>();
            if (name == "etype" || name == "type")
                p.key.push_back(CoalesceKeyField::Type);
            else if (name == "source")
                p.key.push_back(CoalesceKeyField::Source);
            else if (name == "area")
                p.key.push_back(CoalesceKeyField::Area);
            else
                throw ConfigError("unknown coalescence key field '" + name + "'");
        }
        if (p.key.empty()) throw ConfigError("coalescence key must be non-empty");
    }
    return p;
}

inline IngestConfig ingest_config_from_json(const json& j) {
    IngestConfig c;
    if (j.contains("filters"))
        for (const auto& r : j["filters"]) c.filters.push_back(filter_rule_from_json(r));
    if (j.contains("coalescence")) {
        c.coalesce = true;
        c.coalescence = coalescence_from_json(j["coalescence"]);
    }
    return c;
}

}  // namespace vigil

#endif  // VIGIL_INGEST_HPP
