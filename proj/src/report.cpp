#include "specflow/report.hpp"

#include <cmath>

namespace specflow {

void CheckResult::fail(const std::string& msg) {
    pass = false;
    ++counts["violations"];
    if (failures.size() < kMaxListed) failures.push_back(msg);
}

void CheckResult::observe(double err, double tol, const std::string& where) {
    if (std::isnan(err)) {
        fail(where + ": error is NaN");
        return;
    }
    if (err > max_error) max_error = err;
    if (err > tol) fail(where + ": error " + std::to_string(err) + " exceeds " + std::to_string(tol));
}

std::int64_t CheckResult::violations() const {
    auto it = counts.find("violations");
    return it == counts.end() ? 0 : it->second;
}

void Report::append(const Report& other, const std::string& prefix) {
    for (CheckResult c : other.checks) {
        if (!prefix.empty()) c.name = prefix + "." + c.name;
        checks.push_back(std::move(c));
    }
}

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const CheckResult* Report::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace specflow
