#include "specflow/serialize.hpp"

#include <cmath>

namespace specflow {

using nlohmann::json;

namespace {

// JSON has no infinity or NaN.
json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

QVec qvec_from_json(const json& j) {
    if (!j.is_array() || j.empty() || j.size() > kMaxDim) throw DomainError("expected a coordinate list of length 1..3");
    QVec v(static_cast<int>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const json& c = j[k];
        if (c.is_string())
            v[static_cast<int>(k)] = Coord::parse(c.get<std::string>());
        else if (c.is_number_integer())
            v[static_cast<int>(k)] = Coord::from_int(c.get<std::int64_t>());
        else if (c.is_number())
            v[static_cast<int>(k)] = Coord::from_double(c.get<double>());
        else
            throw DomainError("coordinates must be numbers or strings");
    }
    return v;
}

}  // namespace

// Exact coordinates go out as strings.
json to_json(const QVec& v) {
    json a = json::array();
    for (Coord c : v) a.push_back(c.str());
    return a;
}

json to_json(const Box& b) { return json{{"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}}; }

json to_json(const Region& r) {
    json boxes = json::array();
    for (const Box& b : r.boxes()) boxes.push_back(to_json(b));
    return json{{"dim", r.dim()}, {"boxes", boxes}};
}

json to_json(const PASequence& seq) {
    json levels = json::array();
    for (const auto& lv : seq.levels) {
        json classes = json::array();
        for (const auto& c : lv.classes) {
            json kids = json::array();
            for (const auto& k : c.children) kids.push_back(json::array({k.level, k.index}));
            classes.push_back(json{{"id", c.id}, {"anchor", to_json(c.anchor)}, {"region", to_json(c.region)},
                                   {"children", kids}});
        }
        levels.push_back(classes);
    }
    return json{{"dim", seq.dim}, {"levels", levels}};
}

json to_json(const CheckResult& c) {
    json j{{"name", c.name}, {"status", c.pass ? "pass" : "fail"}, {"samples", c.samples},
           {"maxError", number(c.max_error)}};
    json counts = json::object();
    for (const auto& [k, v] : c.counts) counts[k] = v;
    j["counts"] = counts;
    json metrics = json::object();
    for (const auto& [k, v] : c.metrics) metrics[k] = number(v);
    j["metrics"] = metrics;
    if (!c.failures.empty()) j["failures"] = c.failures;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

Box box_from_json(const json& j) { return Box(qvec_from_json(j.at("lo")), qvec_from_json(j.at("hi"))); }

Region region_from_json(const json& j) {
    int d = j.at("dim").get<int>();
    std::vector<Box> boxes;
    for (const auto& b : j.at("boxes")) boxes.push_back(box_from_json(b));
    return Region(d, std::move(boxes));
}

json report_json(const Report& r, const json& config, const std::vector<std::string>& artifacts,
                 std::optional<double> wall_seconds) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    json j{{"schema", kReportSchema}, {"command", r.command}, {"status", r.all_pass() ? "pass" : "fail"},
           {"config", config},        {"checks", checks},     {"artifacts", artifacts}};
    if (wall_seconds) j["timing"] = json{{"wallSeconds", *wall_seconds}};
    return j;
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace specflow
