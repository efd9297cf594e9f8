#ifndef VIGIL_CORE_HPP
#define VIGIL_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

/// Shared vocabulary: events, metric samples, alerts and per-area alert
/// levels. Every other component speaks these types.
namespace vigil {

/// Logical time point. Streams are processed in non-decreasing order per
/// source; all temporal constraints are expressed in this unit.
using Timestamp = std::int64_t;

/// Configuration problem (bad file, bad parameter). CLI exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. CLI exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input parse failure with position information.
struct ParseError : InputError {
    ParseError(const std::string& what, std::size_t line)
        : InputError("line " + std::to_string(line) + ": " + what), line_no(line) {}
    std::size_t line_no;
};

enum class Category { Performance, Environment, Operational };

inline const char* to_string(Category c) {
    switch (c) {
        case Category::Performance: return "Performance";
        case Category::Environment: return "Environment";
        case Category::Operational: return "Operational";
    }
    return "?";
}

inline Category category_from_string(const std::string& s) {
    if (s == "Performance") return Category::Performance;
    if (s == "Environment") return Category::Environment;
    if (s == "Operational") return Category::Operational;
    throw InputError("unknown category: " + s);
}

/// Attribute values are flat: strings or numbers.
using AttrValue = std::variant<std::string, double>;
using AttrMap = std::map<std::string, AttrValue>;

/// One timestamped, typed, attributed observation from a monitored source.
struct Event {
    Timestamp ts = 0;
    std::string type;    // event type name, exact-match semantics
    std::string source;  // emitting node/probe
    std::string area;    // CI area the source belongs to
    Category category = Category::Operational;
    AttrMap attrs;
};

struct MetricSample {
    Timestamp ts = 0;
    std::string metric;
    std::string source;
    double value = 0.0;
};

enum class Analyzer { Conformance, Invariant, Bayes, Fuzzy };

inline const char* to_string(Analyzer a) {
    switch (a) {
        case Analyzer::Conformance: return "Conformance";
        case Analyzer::Invariant: return "Invariant";
        case Analyzer::Bayes: return "Bayes";
        case Analyzer::Fuzzy: return "Fuzzy";
    }
    return "?";
}

inline Analyzer analyzer_from_string(const std::string& s) {
    if (s == "Conformance") return Analyzer::Conformance;
    if (s == "Invariant") return Analyzer::Invariant;
    if (s == "Bayes") return Analyzer::Bayes;
    if (s == "Fuzzy") return Analyzer::Fuzzy;
    throw InputError("unknown analyzer: " + s);
}

/// Compact reference to a contributing observation.
struct EvidenceRef {
    enum class Kind { Event, Metric } kind = Kind::Event;
    Timestamp ts = 0;
    std::string label;   // event type or metric id
    std::string source;
};

/// A detection emitted by any analyzer.
struct Alert {
    Timestamp ts = 0;
    Analyzer analyzer = Analyzer::Conformance;
    std::string area;
    std::string entity;  // model id, invariant id or user id
    double severity = 0.0;  // in [0,1]
    std::vector<EvidenceRef> evidence;  // non-empty
};

/// Current alert level of one area, in [0,1].
struct AlertLevel {
    std::string area;
    double level = 0.0;
};

inline double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

/// Exponential-decay-plus-max aggregation:
/// new level = max(current * decay^(alert.ts - last_update), severity).
/// `last_update` is the time the current level was established.
inline AlertLevel update_alert_level(const AlertLevel& current, Timestamp last_update,
                                     const Alert& alert, double decay) {
    if (!(decay >= 0.0 && decay < 1.0))
        throw std::invalid_argument("decay must be in [0,1)");
    if (current.area != alert.area)
        throw std::invalid_argument("alert level update across areas: " + current.area +
                                    " vs " + alert.area);
    if (alert.ts < last_update)
        throw std::invalid_argument("alert older than current level state");
    const double dt = static_cast<double>(alert.ts - last_update);
    const double decayed = current.level * std::pow(decay, dt);
    return AlertLevel{current.area, clamp01(std::max(decayed, alert.severity))};
}

/// Single-writer registry of per-area alert levels. Reads decay lazily.
class AlertLevelRegistry {
public:
    explicit AlertLevelRegistry(double decay = 0.95) : decay_(decay) {
        if (!(decay >= 0.0 && decay < 1.0))
            throw std::invalid_argument("decay must be in [0,1)");
    }

    /// Folds one alert into its area's level. Returns the new level.
    AlertLevel apply(const Alert& alert) {
        auto& st = states_[alert.area];
        if (st.area.empty()) st = {AlertLevel{alert.area, 0.0}, alert.ts};
        AlertLevel next = update_alert_level(st.lvl(), st.last_update, alert, decay_);
        st.level = next.level;
        st.area = alert.area;
        st.last_update = alert.ts;
        return next;
    }

    /// Effective (decayed) level of `area` at time `now`. Unknown areas are 0.
    double level_at(const std::string& area, Timestamp now) const {
        auto it = states_.find(area);
        if (it == states_.end()) return 0.0;
        const auto& st = it->second;
        if (now <= st.last_update) return st.level;
        return st.level * std::pow(decay_, static_cast<double>(now - st.last_update));
    }

    double decay() const { return decay_; }

    std::vector<std::string> areas() const {
        std::vector<std::string> out;
        out.reserve(states_.size());
        for (const auto& [a, _] : states_) out.push_back(a);
        return out;
    }

private:
    struct State {
        std::string area;
        double level = 0.0;
        Timestamp last_update = 0;
        AlertLevel lvl() const { return AlertLevel{area, level}; }
        State() = default;
        State(AlertLevel l, Timestamp t) : area(l.area), level(l.level), last_update(t) {}
    };
    double decay_;
    std::map<std::string, State> states_;
};

}  // namespace vigil

#endif  // VIGIL_CORE_HPP
