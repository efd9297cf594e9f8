#ifndef VIGIL_JSON_IO_HPP
#define VIGIL_JSON_IO_HPP

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "vigil/core.hpp"

/// Newline-delimited JSON wire formats.
/// Event records:  {"ts":int,"type":s,"source":s,"area":s,"category":s,"attrs":{...}}
/// Metric records: {"ts":int,"metric":s,"source":s,"value":num}
namespace vigil {

using json = nlohmann::json;

/// Shortest round-trip decimal form, identical across runs.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

inline json attrs_to_json(const AttrMap& attrs) {
    json j = json::object();
    for (const auto& [k, v] : attrs) {
        if (std::holds_alternative<double>(v))
            j[k] = std::get<double>(v);
        else
            j[k] = std::get<std::string>(v);
    }
    return j;
}

inline AttrMap attrs_from_json(const json& j, std::size_t line) {
    AttrMap out;
    if (!j.is_object()) throw ParseError("attrs must be an object", line);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it->is_string())
            out[it.key()] = it->get<std::string>();
        else if (it->is_number())
            out[it.key()] = it->get<double>();
        else
            throw ParseError("attr '" + it.key() + "' must be string or number", line);
    }
    return out;
}

inline Event event_from_json(const json& j, std::size_t line = 0) {
    if (!j.is_object()) throw ParseError("event record must be an object", line);
    for (const char* key : {"ts", "type", "source", "area", "category"})
        if (!j.contains(key)) throw ParseError(std::string("event record missing '") + key + "'", line);
    Event e;
    if (!j["ts"].is_number_integer() || j["ts"].get<std::int64_t>() < 0)
        throw ParseError("ts must be a non-negative integer", line);
    e.ts = j["ts"].get<std::int64_t>();
    e.type = j["type"].get<std::string>();
    e.source = j["source"].get<std::string>();
    e.area = j["area"].get<std::string>();
    try {
        e.category = category_from_string(j["category"].get<std::string>());
    } catch (const InputError& ex) {
        throw ParseError(ex.what(), line);
    }
    if (e.type.empty()) throw ParseError("type must be non-empty", line);
    if (j.contains("attrs")) e.attrs = attrs_from_json(j["attrs"], line);
    return e;
}

inline Event parse_event_line(const std::string& s, std::size_t line = 0) {
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON", line);
    return event_from_json(j, line);
}

inline json event_to_json(const Event& e) {
    json j;
    j["ts"] = e.ts;
    j["type"] = e.type;
    j["source"] = e.source;
    j["area"] = e.area;
    j["category"] = to_string(e.category);
    j["attrs"] = attrs_to_json(e.attrs);
    return j;
}

inline std::string serialize_event(const Event& e) { return event_to_json(e).dump(); }

inline MetricSample metric_from_json(const json& j, std::size_t line = 0) {
    if (!j.is_object()) throw ParseError("metric record must be an object", line);
    for (const char* key : {"ts", "metric", "source", "value"})
        if (!j.contains(key)) throw ParseError(std::string("metric record missing '") + key + "'", line);
    MetricSample m;
    if (!j["ts"].is_number_integer() || j["ts"].get<std::int64_t>() < 0)
        throw ParseError("ts must be a non-negative integer", line);
    m.ts = j["ts"].get<std::int64_t>();
    m.metric = j["metric"].get<std::string>();
    m.source = j["source"].get<std::string>();
    if (!j["value"].is_number()) throw ParseError("value must be a number", line);
    m.value = j["value"].get<double>();
    if (!std::isfinite(m.value)) throw ParseError("value must be finite", line);
    return m;
}

inline MetricSample parse_metric_line(const std::string& s, std::size_t line = 0) {
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON", line);
    return metric_from_json(j, line);
}

inline json metric_to_json(const MetricSample& m) {
    json j;
    j["ts"] = m.ts;
    j["metric"] = m.metric;
    j["source"] = m.source;
    j["value"] = m.value;
    return j;
}

inline std::string serialize_metric(const MetricSample& m) { return metric_to_json(m).dump(); }

inline json evidence_to_json(const EvidenceRef& r) {
    json j;
    j["kind"] = r.kind == EvidenceRef::Kind::Event ? "event" : "metric";
    j["ts"] = r.ts;
    j["label"] = r.label;
    j["source"] = r.source;
    return j;
}

inline json alert_to_json(const Alert& a) {
    json j;
    j["ts"] = a.ts;
    j["analyzer"] = to_string(a.analyzer);
    j["area"] = a.area;
    j["entity"] = a.entity;
    j["severity"] = a.severity;
    json ev = json::array();
    for (const auto& r : a.evidence) ev.push_back(evidence_to_json(r));
    j["evidence"] = ev;
    return j;
}

inline Alert alert_from_json(const json& j, std::size_t line = 0) {
    if (!j.is_object()) throw ParseError("alert record must be an object", line);
    Alert a;
    a.ts = j.at("ts").get<std::int64_t>();
    a.analyzer = analyzer_from_string(j.at("analyzer").get<std::string>());
    a.area = j.value("area", "");
    a.entity = j.value("entity", "");
    a.severity = j.at("severity").get<double>();
    if (j.contains("evidence")) {
        for (const auto& e : j["evidence"]) {
            EvidenceRef r;
            r.kind = e.value("kind", "event") == std::string("metric") ? EvidenceRef::Kind::Metric
                                                                       : EvidenceRef::Kind::Event;
            r.ts = e.value("ts", std::int64_t{0});
            r.label = e.value("label", "");
            r.source = e.value("source", "");
            a.evidence.push_back(std::move(r));
        }
    }
    return a;
}

/// Reads one JSON document from a file, with a decent error for a bad path.
inline json load_json_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw ConfigError("cannot open " + path);
    std::string text;
    char buf[1 << 14];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid JSON in " + path);
    return j;
}

}  // namespace vigil

#endif  // VIGIL_JSON_IO_HPP
