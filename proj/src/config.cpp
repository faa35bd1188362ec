#include "specflow/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace specflow {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

template <class T>
T parse_int(const std::string& field, const std::string& v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(field, "expected an integer, got '" + v + "'");
    return out;
}

double parse_real(const std::string& field, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(out))
        throw ConfigError(field, "expected a finite number, got '" + v + "'");
    return out;
}

Coord parse_coord(const std::string& field, const std::string& v) {
    try {
        return Coord::parse(v);
    } catch (const DomainError& e) {
        throw ConfigError(field, e.what());
    }
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> s = {
        {"d", [](ExperimentConfig& c, const std::string& v) { c.d = parse_int<int>("d", v); }},
        {"alpha", [](ExperimentConfig& c, const std::string& v) { c.alpha = parse_real("alpha", v); }},
        {"gamma", [](ExperimentConfig& c, const std::string& v) { c.gamma = parse_int<std::int64_t>("gamma", v); }},
        {"levels", [](ExperimentConfig& c, const std::string& v) { c.levels = parse_int<int>("levels", v); }},
        {"K", [](ExperimentConfig& c, const std::string& v) { c.K = parse_coord("K", v); }},
        {"window",
         [](ExperimentConfig& c, const std::string& v) {
             try {
                 c.window = parse_window(v);
             } catch (const ConfigError&) {
                 throw;
             } catch (const DomainError& e) {
                 throw ConfigError("window", e.what());
             }
         }},
        {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_int<std::uint64_t>("seed", v); }},
        {"samples", [](ExperimentConfig& c, const std::string& v) { c.samples = parse_int<std::size_t>("samples", v); }},
        {"pairs", [](ExperimentConfig& c, const std::string& v) { c.pairs = parse_int<std::size_t>("pairs", v); }},
        {"regions", [](ExperimentConfig& c, const std::string& v) { c.regions = parse_int<std::size_t>("regions", v); }},
        {"shift_K", [](ExperimentConfig& c, const std::string& v) { c.shift_K = parse_coord("shift_K", v); }},
        {"shift_norm", [](ExperimentConfig& c, const std::string& v) { c.shift_norm = parse_coord("shift_norm", v); }},
        {"max_flow", [](ExperimentConfig& c, const std::string& v) { c.max_flow = parse_real("max_flow", v); }},
        {"max_r", [](ExperimentConfig& c, const std::string& v) { c.max_r = parse_real("max_r", v); }},
        {"tol", [](ExperimentConfig& c, const std::string& v) { c.tol = parse_real("tol", v); }},
        {"lattice_resolution",
         [](ExperimentConfig& c, const std::string& v) {
             c.lattice_resolution = parse_int<std::int64_t>("lattice_resolution", v);
         }},
        {"csv_limit",
         [](ExperimentConfig& c, const std::string& v) { c.csv_limit = parse_int<std::size_t>("csv_limit", v); }},
    };
    return s;
}

void set_field(ExperimentConfig& c, const std::string& key, const std::string& value) {
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    it->second(c, value);
}

std::string json_scalar(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned() || v.is_number_float()) return v.dump();
    if (key == "window" && v.is_object() && v.contains("lo") && v.contains("hi")) {
        auto list = [](const json& a) {
            std::string s;
            for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + (a[i].is_string() ? a[i].get<std::string>() : a[i].dump());
            return s;
        };
        return list(v["lo"]) + ":" + list(v["hi"]);
    }
    throw ConfigError(key, "unsupported JSON value " + v.dump());
}

}  // namespace

Box parse_window(std::string_view text) {
    std::string t = trim(text);
    auto colon = t.find(':');
    if (colon == std::string::npos) throw ConfigError("window", "expected 'lo1,lo2:hi1,hi2'");
    auto coords = [](const std::string& s) {
        std::vector<Coord> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_coord("window", trim(item)));
        return out;
    };
    auto lo = coords(t.substr(0, colon)), hi = coords(t.substr(colon + 1));
    if (lo.empty() || lo.size() != hi.size() || lo.size() > static_cast<std::size_t>(kMaxDim))
        throw ConfigError("window", "corners need the same dimension, between 1 and 3");
    QVec a(static_cast<int>(lo.size())), b(static_cast<int>(hi.size()));
    for (std::size_t k = 0; k < lo.size(); ++k) {
        if (!(lo[k] < hi[k])) throw ConfigError("window", "lo must be below hi on every axis");
        a[static_cast<int>(k)] = lo[k];
        b[static_cast<int>(k)] = hi[k];
    }
    return Box(a, b);
}

void ExperimentConfig::validate() const {
    if (d < 1 || d > 3) throw ConfigError("d", "must be 1, 2 or 3 (got " + std::to_string(d) + ")");
    if (!(alpha > 1.0)) throw ConfigError("alpha", "must be > 1 (got " + json(alpha).dump() + ")");
    if (gamma < 10) throw ConfigError("gamma", "must be >= 10 (got " + std::to_string(gamma) + ")");
    if (levels < 0 || levels > 4) throw ConfigError("levels", "must be between 0 and 4 (got " + std::to_string(levels) + ")");
    if (K && !(Coord() < *K)) throw ConfigError("K", "must be > 0");
    if (window && window->dim() != d) throw ConfigError("window", "dimension differs from d");
    if (samples == 0) throw ConfigError("samples", "must be >= 1");
    if (pairs == 0) throw ConfigError("pairs", "must be >= 1");
    if (regions == 0) throw ConfigError("regions", "must be >= 1");
    if (!(Coord() < shift_norm)) throw ConfigError("shift_norm", "must be > 0");
    if (!(shift_norm < shift_K)) throw ConfigError("shift_K", "must exceed shift_norm");
    if (!(max_flow > 0.0)) throw ConfigError("max_flow", "must be > 0");
    if (!(max_r > 0.0) || max_r > 1e6) throw ConfigError("max_r", "must be in (0, 1e6]");
    if (!(tol > 0.0)) throw ConfigError("tol", "must be > 0");
    if (lattice_resolution < 1 || lattice_resolution > (Coord::kOne >> 1) || Coord::kOne % lattice_resolution != 0)
        throw ConfigError("lattice_resolution", "must be a power of two between 1 and 2^19");
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::string t = trim(text);
    if (!t.empty() && t.front() == '{') {
        json j;
        try {
            j = json::parse(t);
        } catch (const json::parse_error& e) {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("config", "JSON config must be an object");
        for (const auto& [k, v] : j.items())
            if (!v.is_null()) set_field(c, k, json_scalar(k, v));
    } else {
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::string l = trim(line);
            if (l.empty()) continue;
            auto eq = l.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno), "expected key = value");
            set_field(c, trim(l.substr(0, eq)), trim(l.substr(eq + 1)));
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json to_json(const ExperimentConfig& c) {
    json j{{"d", c.d},
           {"alpha", c.alpha},
           {"gamma", c.gamma},
           {"levels", c.levels},
           {"seed", c.seed},
           {"samples", c.samples},
           {"pairs", c.pairs},
           {"regions", c.regions},
           {"shift_K", c.shift_K.str()},
           {"shift_norm", c.shift_norm.str()},
           {"max_flow", c.max_flow},
           {"max_r", c.max_r},
           {"tol", c.tol},
           {"lattice_resolution", c.lattice_resolution},
           {"csv_limit", c.csv_limit}};
    j["K"] = c.K ? json(c.K->str()) : json(nullptr);
    if (c.window) {
        json lo = json::array(), hi = json::array();
        for (Coord x : c.window->lo) lo.push_back(x.str());
        for (Coord x : c.window->hi) hi.push_back(x.str());
        j["window"] = json{{"lo", lo}, {"hi", hi}};
    } else {
        j["window"] = nullptr;
    }
    return j;
}

}  // namespace specflow
