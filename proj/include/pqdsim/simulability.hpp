#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pqdsim/errors.hpp"
#include "pqdsim/experiment.hpp"

namespace pqdsim {

/// Output-state (first) condition for all-Gaussian inputs: the output
/// (s_bar)-ordered covariance must be PSD.
struct FirstConditionResult {
    double min_eigenvalue = 0.0;
    bool simulatable = false;
};

struct SimulabilityReport {
    OrderingVector t_bar;
    OrderingVector s_bar;
    RealVector sigma_eigenvalues;  // eigenvalues of Sigma-bar, ascending
    bool simulatable = false;      // lambda_min(Sigma-bar) >= -1e-10

    /// Working (s, t) = (s_bar, t_bar) when simulatable.
    std::optional<std::pair<OrderingVector, OrderingVector>> ordering;

    /// Smallest common p_D making Sigma-bar PSD for this network; set when all
    /// detectors share eta_D > 0.
    std::optional<double> threshold_pd;
    std::optional<double> margin;  // p_D - threshold_pd

    /// mu eta_B eta_L eta_D from the uniform-loss scaling; only an estimate
    /// for a general transfer matrix.
    std::optional<double> scalar_threshold_estimate;
    /// Random-count probability expected from counted mode-mismatched photons.
    std::optional<double> mismatch_pd;

    std::optional<FirstConditionResult> first_condition;
    /// True when t_bar and Sigma-bar refer to refer_input_loss(config).
    bool loss_referred = false;
    std::vector<std::string> notes;
};

/// Thrown by samplers that refuse a config; carries the report that failed.
class NotSimulatable : public SimulabilityViolated {
public:
    NotSimulatable(SimulabilityReport report, const std::string& what)
        : SimulabilityViolated(what), report_(std::move(report)) {}

    const SimulabilityReport& report() const noexcept { return report_; }

private:
    SimulabilityReport report_;
};

/// s_bar per detector, with eta_D = 0 detectors mapped to s = -1 (any ordering admissible).
OrderingVector detector_orderings(const std::vector<DetectorModel>& dets);

/// When the rows of L are orthogonal (L = D V with D diagonal), the row
/// attenuation D is input loss. This moves it into the source models where
/// they can absorb it (photon mode matching, SPDC signal transmissivity,
/// coherent amplitude, thermal occupation) and divides it out of L.
/// Empty when the rows are not orthogonal or nothing can be moved.
std::optional<ExperimentConfig> refer_input_loss(const ExperimentConfig& config);

/// Sigma-bar test on the config as given and on refer_input_loss(config);
/// the form with the larger lambda_min is reported.
SimulabilityReport check_second_condition(const ExperimentConfig& config);

/// Empty when some source is not Gaussian.
std::optional<FirstConditionResult> check_first_condition(const ExperimentConfig& config);

/// p_D threshold for single-photon boson sampling: mu eta_B eta_L eta_D.
double threshold_single_photon(double purity, double mode_match, double network_eta, double detector_eta);

/// Random-count probability contributed by counted mode-mismatched photons.
/// Throws ConfigError when photons > modes unless allow_overfill.
double mode_mismatch_pd(double purity, double mode_match, double network_eta, double detector_eta,
                        double input_fraction, double network_fraction, double photons, double modes,
                        bool allow_overfill = false);

/// p_D threshold for SPDC boson sampling; equals eta_D (1 - t_bar) / 2.
double threshold_spdc(double squeezing, double mode_match, double network_eta, double detector_eta);

struct OperatingPoint {
    double photons = 0.0;               // N = min(M, sqrt(M) / eta)
    std::optional<double> sinh2_squeezing;  // N / M for SPDC
};

/// Photon number keeping about sqrt(M) detected photons with N <= M.
OperatingPoint plan_photon_number(Scheme scheme, double modes, double eta);

nlohmann::json report_to_json(const SimulabilityReport& report);
std::string report_summary(const SimulabilityReport& report);

}  // namespace pqdsim
