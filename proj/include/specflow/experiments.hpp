#pragma once

#include <random>
#include <string>
#include <vector>

#include "specflow/config.hpp"
#include "specflow/deform.hpp"
#include "specflow/pipeline.hpp"
#include "specflow/report.hpp"

namespace specflow {

struct Artifact {
    std::string name;  // file name inside the output directory
    std::string content;
};

struct ExperimentResult {
    Report report;
    std::vector<Artifact> artifacts;
};

const std::vector<std::string>& command_names();
// format selects extra artifacts: "json" (report only), "csv" (check table
// plus command CSVs), "svg" (pictures). gridflow always draws its classes
// and lipschitz always writes its quotients.
ExperimentResult run_command(const std::string& command, const ExperimentConfig& cfg, const std::string& format = "json");

ToastParams toast_params(const ExperimentConfig& cfg, Coord default_k);

// Union of 1 to 4 boxes with integer corners in [-20, 20]^d, sides 6 to 24,
// chained so the union is connected.
Region random_box_union(int d, std::mt19937_64& rng);
// Random v with ||v|| = len and coordinates on the 2^-10 lattice.
QVec random_shift(int d, Coord len, std::mt19937_64& rng);

Report run_toast(const ExperimentConfig& cfg, std::shared_ptr<const ToastHierarchy>* keep = nullptr);
// f and h estimates over random regions, the restriction identity and the
// perturbation maps.
Report run_lipschitz(const ExperimentConfig& cfg, std::vector<QuotientSample>* csv = nullptr);
Report run_suspend(const ExperimentConfig& cfg);

// Dyadic ceiling in [1, 15/8] from a hash of the orbit index.
Coord dyadic_ceiling(const OrbitPoint& z, std::uint64_t seed);

}  // namespace specflow
