#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "specflow/experiments.hpp"
#include "specflow/serialize.hpp"

namespace fs = std::filesystem;
using namespace specflow;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// --set overrides are appended as key=value lines, or merged into a JSON object.
std::string with_overrides(std::string text, const std::vector<std::string>& sets) {
    if (sets.empty()) return text;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        auto j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ConfigError("config", "malformed JSON");
        for (const auto& s : sets) {
            auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError(s, "override must be key=value");
            std::string key = s.substr(0, eq), val = s.substr(eq + 1);
            auto parsed = nlohmann::json::parse(val, nullptr, false);
            j[key] = parsed.is_discarded() ? nlohmann::json(val) : parsed;
        }
        return j.dump();
    }
    for (const auto& s : sets) text += "\n" + s;
    return text;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid flows, toasts and special flows: experiment runner"};
    std::string command, config_path, out_dir, format = "json";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
    bool quiet = false;

    std::string commands;
    for (const auto& c : command_names()) commands += (commands.empty() ? "" : ", ") + c;
    app.add_option("command", command, "one of: " + commands)->required();
    app.add_option("--config", config_path, "key=value or JSON config file");
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--out", out_dir, "output directory (default $SPECFLOW_OUT_DIR or ./specflow_out)");
    app.add_option("--format", format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
    app.add_option("--set", sets, "override a config key, key=value");
    app.add_flag("-q,--quiet", quiet, "do not print the check summary");
    CLI11_PARSE(app, argc, argv);

    ExperimentConfig cfg;
    try {
        std::string text = config_path.empty() ? std::string{} : read_file(config_path);
        cfg = parse_config(with_overrides(text, sets));
        if (seed) cfg.seed = *seed;
        cfg.validate();
        if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
            throw ConfigError("command", "unknown command '" + command + "' (expected " + commands + ")");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    if (out_dir.empty()) {
        const char* env = std::getenv("SPECFLOW_OUT_DIR");
        out_dir = env && *env ? env : "specflow_out";
    }

    ExperimentResult res;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        res = run_command(command, cfg, format);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << command << " aborted: " << e.what() << "\n";
        return 3;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<std::string> names;
    for (const auto& a : res.artifacts) names.push_back(a.name);
    try {
        fs::create_directories(out_dir);
        for (const auto& a : res.artifacts) write_file(fs::path(out_dir) / a.name, a.content);
        write_file(fs::path(out_dir) / "report.json", dump_report(report_json(res.report, to_json(cfg), names)));
        nlohmann::json timing = {{"command", command}, {"wall_seconds", wall}};
        write_file(fs::path(out_dir) / "timing.json", timing.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 4;
    }

    if (!quiet) {
        for (const auto& c : res.report.checks) {
            std::cout << (c.pass ? "pass " : "FAIL ") << c.name;
            if (c.max_error > 0) std::cout << "  maxError=" << c.max_error;
            std::cout << "\n";
            for (const auto& f : c.failures) std::cout << "    " << f << "\n";
        }
        std::cout << (res.report.all_pass() ? "all checks pass" : "some checks failed") << " (" << wall << " s), report in "
                  << (fs::path(out_dir) / "report.json").string() << "\n";
    }
    return res.report.all_pass() ? 0 : 1;
}
