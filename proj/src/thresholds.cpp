#include "pqdsim/thresholds.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pqdsim/errors.hpp"
#include "pqdsim/simulability.hpp"

namespace pqdsim {

void validate(const ScenarioParams& p) {
    auto unit = [](double v, const char* field) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field, "must lie in [0, 1]");
    };
    unit(p.purity, "mu");
    unit(p.mode_match, "eta_b");
    unit(p.detector_eta, "eta_d");
    unit(p.input_fraction, "f_b");
    unit(p.network_fraction, "f_l");
    if (!(p.eta0 > 0.0 && p.eta0 <= 1.0)) throw ConfigError("eta0", "must lie in (0, 1]");
    if (p.ell < 2) throw ConfigError("ell", "must be >= 2");
    for (auto m : p.modes)
        if (m < 1) throw ConfigError("M", "mode counts must be >= 1");
}

std::vector<ThresholdRow> threshold_table(const ScenarioParams& p, Scheme scheme) {
    validate(p);
    std::vector<ThresholdRow> rows;
    for (auto m : p.modes) {
        ThresholdRow r;
        r.scheme = scheme;
        r.modes = m;
        r.eta_l = uniform_loss_eta(LossModel{p.eta0, p.ell, m});
        const double md = static_cast<double>(m);
        const double purity = scheme == Scheme::Spdc ? 1.0 : p.purity;
        r.eta = purity * p.mode_match * r.eta_l * p.detector_eta;
        r.sqrt_m_over_eta = std::sqrt(md) / r.eta;
        const OperatingPoint op = plan_photon_number(scheme, md, r.eta);
        r.photons = op.photons;
        r.detected = op.photons * r.eta;
        r.sinh2_squeezing = op.sinh2_squeezing;
        if (scheme == Scheme::Spdc) {
            const double squeezing = std::asinh(std::sqrt(*op.sinh2_squeezing));
            r.threshold_pd = threshold_spdc(squeezing, p.mode_match, r.eta_l, p.detector_eta);
        } else {
            r.threshold_pd = threshold_single_photon(purity, p.mode_match, r.eta_l, p.detector_eta);
        }
        r.mismatch_pd = mode_mismatch_pd(purity, p.mode_match, r.eta_l, p.detector_eta, p.input_fraction,
                                         p.network_fraction, r.photons, md);
        rows.push_back(r);
    }
    return rows;
}

nlohmann::json thresholds_to_json(const std::vector<ThresholdRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j = {{"scheme", scheme_name(r.scheme)},
                            {"M", r.modes},
                            {"eta_l", r.eta_l},
                            {"eta", r.eta},
                            {"sqrt_m_over_eta", r.sqrt_m_over_eta},
                            {"N", r.photons},
                            {"n_eta", r.detected},
                            {"threshold_p_d", r.threshold_pd},
                            {"mismatch_p_d", r.mismatch_pd}};
        if (r.sinh2_squeezing) j["sinh2_r"] = *r.sinh2_squeezing;
        out.push_back(std::move(j));
    }
    return out;
}

std::string thresholds_text(const std::vector<ThresholdRow>& rows) {
    std::string out = fmt::format("{:<14}{:>6}{:>8}{:>9}{:>11}{:>10}{:>9}{:>9}{:>11}{:>11}\n", "scheme", "M",
                                  "eta_L", "eta", "sqrtM/eta", "N", "N*eta", "sinh2r", "p_D thr", "mismatch");
    for (const auto& r : rows) {
        out += fmt::format("{:<14}{:>6}{:>8.4f}{:>9.5f}{:>11.2f}{:>10.2f}{:>9.3f}{:>9}{:>11.4f}{:>11.4f}\n",
                           scheme_name(r.scheme), r.modes, r.eta_l, r.eta, r.sqrt_m_over_eta, r.photons, r.detected,
                           r.sinh2_squeezing ? fmt::format("{:.4f}", *r.sinh2_squeezing) : std::string("-"),
                           r.threshold_pd, r.mismatch_pd);
    }
    return out;
}

}  // namespace pqdsim
