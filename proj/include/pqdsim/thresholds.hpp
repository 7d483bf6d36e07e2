#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqdsim/experiment.hpp"

namespace pqdsim {

/// Uniform-loss scenario for the worked threshold tables.
struct ScenarioParams {
    double purity = 0.5;        // mu (single-photon scheme; the SPDC scheme uses 1)
    double mode_match = 0.1;    // eta_B
    double eta0 = 0.98;
    int ell = 2;
    double detector_eta = 0.95;
    double input_fraction = 0.1;    // f_B
    double network_fraction = 0.9;  // f_L
    std::vector<std::size_t> modes{10, 100, 1600};
};

struct ThresholdRow {
    Scheme scheme = Scheme::SinglePhoton;
    std::size_t modes = 0;
    double eta_l = 0.0;
    double eta = 0.0;  // overall efficiency (eta, or eta' for SPDC)
    double sqrt_m_over_eta = 0.0;
    double photons = 0.0;  // N = min(M, sqrt(M) / eta)
    double detected = 0.0;  // N eta
    std::optional<double> sinh2_squeezing;
    double threshold_pd = 0.0;
    double mismatch_pd = 0.0;
};

/// Throws ConfigError naming the out-of-range parameter.
void validate(const ScenarioParams& params);

std::vector<ThresholdRow> threshold_table(const ScenarioParams& params, Scheme scheme);

nlohmann::json thresholds_to_json(const std::vector<ThresholdRow>& rows);

/// Fixed-width text table, one line per row.
std::string thresholds_text(const std::vector<ThresholdRow>& rows);

}  // namespace pqdsim
