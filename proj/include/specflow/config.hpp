#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "specflow/geometry.hpp"

namespace specflow {

class ConfigError : public DomainError {
  public:
    ConfigError(const std::string& field, const std::string& msg) : DomainError(field + ": " + msg), field_(field) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

// Keys, defaults and ranges are listed in the README.
struct ExperimentConfig {
    int d = 2;
    double alpha = 1.25;
    std::int64_t gamma = 20;
    int levels = 1;
    std::optional<Coord> K;     // toast K; commands derive it when absent
    std::optional<Box> window;  // "lo1,lo2:hi1,hi2"
    std::uint64_t seed = 1;
    std::size_t samples = 1000;
    std::size_t pairs = 10000;
    std::size_t regions = 100;
    Coord shift_K = 5;
    Coord shift_norm = 1;
    double max_flow = 5.0;
    double max_r = 50.0;
    double tol = 1e-6;
    std::int64_t lattice_resolution = 8;
    std::size_t csv_limit = 20000;

    void validate() const;
};

// key = value lines with # comments, or a JSON object with the same keys.
// Unknown keys and out-of-range values throw ConfigError naming the field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

Box parse_window(std::string_view text);

}  // namespace specflow
