#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace specflow {

// Outcome of one verification. Failures keep the first few diagnostics and
// count the rest.
struct CheckResult {
    static constexpr std::size_t kMaxListed = 20;

    std::string name;
    bool pass = true;
    std::uint64_t samples = 0;
    double max_error = 0.0;
    std::map<std::string, std::int64_t> counts;
    std::map<std::string, double> metrics;
    std::vector<std::string> failures;
    std::string note;

    CheckResult() = default;
    explicit CheckResult(std::string n) : name(std::move(n)) {}

    void fail(const std::string& msg);
    // Tracks the worst error and fails when it exceeds tol.
    void observe(double err, double tol, const std::string& where);
    std::int64_t violations() const;
};

struct Report {
    std::string command;
    std::vector<CheckResult> checks;

    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void append(const Report& other, const std::string& prefix = "");
    bool all_pass() const;
    const CheckResult* find(const std::string& name) const;
};

}  // namespace specflow
