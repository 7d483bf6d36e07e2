#include "pqdsim/simulability.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace pqdsim {

namespace {

bool identical_efficiency(const std::vector<DetectorModel>& dets) {
    for (const auto& d : dets)
        if (d.efficiency != dets.front().efficiency) return false;
    return !dets.empty();
}

bool identical_detectors(const std::vector<DetectorModel>& dets) {
    for (const auto& d : dets)
        if (!(d == dets.front())) return false;
    return !dets.empty();
}

// Average per-mode transmission of the network part that the photons traverse.
double network_eta(const ExperimentConfig& config) {
    if (const auto* u = std::get_if<UniformLossLon>(&config.lon)) return uniform_loss_eta(u->model);
    const ComplexMatrix& l = config.transfer.matrix();
    if (config.scheme == Scheme::Spdc) {
        const auto half = l.rows() / 2;
        return l.bottomRightCorner(half, half).squaredNorm() / static_cast<double>(half);
    }
    return l.squaredNorm() / static_cast<double>(l.rows());
}

std::vector<double> as_std(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

OrderingVector detector_orderings(const std::vector<DetectorModel>& dets) {
    std::vector<double> v;
    v.reserve(dets.size());
    for (const auto& d : dets) v.push_back(d.efficiency > 0.0 ? s_bar(d) : -1.0);
    return OrderingVector(std::move(v));
}

std::optional<FirstConditionResult> check_first_condition(const ExperimentConfig& config) {
    if (!all_gaussian(config.input)) return std::nullopt;
    const OrderingVector s = detector_orderings(config.detectors);
    const auto out = with_ordering(propagate_gaussian(wigner_state(config.input), config.transfer), s);
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(out.cov, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    return FirstConditionResult{lo, lo >= -kPsdTol};
}

std::optional<ExperimentConfig> refer_input_loss(const ExperimentConfig& config) {
    const ComplexMatrix& l = config.transfer.matrix();
    const ComplexMatrix gram = l * l.adjoint();
    const ComplexMatrix off = gram - ComplexMatrix(gram.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;

    const auto m = config.modes();
    std::vector<double> d(m);
    for (std::size_t k = 0; k < m; ++k) d[k] = std::sqrt(std::max(0.0, gram(k, k).real()));
    std::vector<double> referred(m, 1.0);
    auto take = [&](std::size_t k) {
        referred[k] = d[k];
        return d[k] * d[k];
    };

    std::vector<SourceAssignment> sources;
    std::vector<bool> vacuum(m, true);
    for (const auto& a : config.input.assignments()) {
        SourceAssignment b = a;
        for (auto k : a.ports) vacuum[k] = false;
        if (auto* p = std::get_if<MixedSinglePhoton>(&b.source)) {
            p->mode_match *= take(a.ports[0]);
        } else if (auto* c = std::get_if<Coherent>(&b.source)) {
            c->amplitude *= std::sqrt(take(a.ports[0]));
        } else if (auto* t = std::get_if<Thermal>(&b.source)) {
            t->mean_photons *= take(a.ports[0]);
        } else if (auto* q = std::get_if<SpdcPair>(&b.source)) {
            q->transmissivity *= take(a.ports[1]);
        } else {
            take(a.ports[0]);
        }
        sources.push_back(std::move(b));
    }
    for (std::size_t k = 0; k < m; ++k)
        if (vacuum[k]) take(k);

    bool changed = false;
    ComplexMatrix lr = l;
    for (std::size_t k = 0; k < m; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        if (referred[k] == 1.0) continue;
        changed = true;
        if (referred[k] > 0.0) {
            lr.row(row) /= referred[k];
        } else {
            lr.row(row).setZero();
        }
    }
    if (!changed) return std::nullopt;

    ExperimentConfig r = config;
    r.input = InputState(m, std::move(sources));
    r.transfer = TransferMatrix(lr);
    r.lon = MatrixLon{lr, ""};
    return r;
}

SimulabilityReport check_second_condition(const ExperimentConfig& config) {
    SimulabilityReport r;
    r.s_bar = detector_orderings(config.detectors);

    auto evaluate = [&](const ExperimentConfig& c, OrderingVector& t, RealVector& eigenvalues) {
        t = t_bar_vector(c.input);
        eigenvalues = sigma_matrix(c.transfer, r.s_bar, t).eigenvalues();
        return eigenvalues.size() == 0 ? 0.0 : eigenvalues.minCoeff();
    };
    const double direct = evaluate(config, r.t_bar, r.sigma_eigenvalues);
    const auto referred = refer_input_loss(config);
    const ExperimentConfig* chosen = &config;
    if (referred) {
        OrderingVector t;
        RealVector eigenvalues;
        if (evaluate(*referred, t, eigenvalues) > direct) {
            r.t_bar = std::move(t);
            r.sigma_eigenvalues = std::move(eigenvalues);
            r.loss_referred = true;
            chosen = &*referred;
            r.notes.push_back("network loss referred to the sources (L = D V with D diagonal)");
        }
    }
    r.simulatable = r.sigma_eigenvalues.size() == 0 || r.sigma_eigenvalues.minCoeff() >= -kPsdTol;
    if (r.simulatable) r.ordering = std::make_pair(r.s_bar, r.t_bar);

    const auto& dets = config.detectors;
    if (identical_efficiency(dets) && dets.front().efficiency > 0.0) {
        // Sigma-bar = (2 p_D / eta_D) I - L^+ (I - t_bar) L for a common detector.
        const ComplexMatrix& l = chosen->transfer.matrix();
        const Eigen::VectorXcd deficit = (1.0 - r.t_bar.as_vector().array()).matrix().cast<Complex>();
        const ComplexMatrix load = l.adjoint() * deficit.asDiagonal() * l;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(ComplexMatrix(0.5 * (load + load.adjoint())),
                                                         Eigen::EigenvaluesOnly);
        const double top = std::max(0.0, eig.eigenvalues().maxCoeff());
        r.threshold_pd = dets.front().efficiency * top / 2.0;
        double min_pd = 1.0;
        for (const auto& d : dets) min_pd = std::min(min_pd, d.random_count);
        r.margin = min_pd - *r.threshold_pd;
        r.notes.push_back("threshold_pd is exact for this transfer matrix (common detector efficiency)");
    } else {
        r.notes.push_back("detectors differ in efficiency; no scalar p_D threshold, use the Sigma-bar test");
    }

    // Closed-form estimates for the uniform-loss model.
    if (identical_detectors(dets) && dets.front().efficiency > 0.0) {
        const double eta_d = dets.front().efficiency;
        const double eta_l = network_eta(config);
        std::optional<MixedSinglePhoton> photon;
        std::optional<SpdcPair> pair;
        bool uniform = true;
        std::size_t photons = 0;
        for (const auto& a : config.input.assignments()) {
            if (const auto* p = std::get_if<MixedSinglePhoton>(&a.source)) {
                if (photon && !(*photon == *p)) uniform = false;
                photon = *p;
                ++photons;
            } else if (const auto* q = std::get_if<SpdcPair>(&a.source)) {
                if (pair && !(*pair == *q)) uniform = false;
                pair = *q;
            } else if (!std::holds_alternative<Vacuum>(a.source)) {
                uniform = false;
            }
        }
        if (uniform && photon && !pair) {
            r.scalar_threshold_estimate =
                threshold_single_photon(photon->purity, photon->mode_match, eta_l, eta_d);
            if (config.mismatch) {
                r.mismatch_pd = mode_mismatch_pd(photon->purity, photon->mode_match, eta_l, eta_d,
                                                 config.mismatch->input_fraction,
                                                 config.mismatch->network_fraction, static_cast<double>(photons),
                                                 static_cast<double>(config.modes()));
            }
        } else if (uniform && pair && !photon) {
            r.scalar_threshold_estimate = threshold_spdc(pair->squeezing, pair->transmissivity, eta_l, eta_d);
            if (config.mismatch) {
                r.notes.push_back("mismatch p_D needs eta_B separately from eta_BL; not estimated for spdc pairs");
            }
        }
        if (r.scalar_threshold_estimate) {
            r.notes.push_back("scalar_threshold_estimate assumes uniform loss; it is approximate for a general L");
        }
    }

    r.first_condition = check_first_condition(config);
    return r;
}

double threshold_single_photon(double purity, double mode_match, double network_eta, double detector_eta) {
    return purity * mode_match * network_eta * detector_eta;
}

double mode_mismatch_pd(double purity, double mode_match, double network_eta, double detector_eta,
                        double input_fraction, double network_fraction, double photons, double modes,
                        bool allow_overfill) {
    if (!(modes > 0.0)) throw ConfigError("M", "mode count must be positive");
    if (photons > modes && !allow_overfill) {
        throw ConfigError("N", "photon number exceeds mode count (pass allow_overfill to override)");
    }
    return detector_eta * purity * photons / modes *
           (network_fraction * (1.0 - network_eta) * mode_match + input_fraction * (1.0 - mode_match));
}

double threshold_spdc(double squeezing, double mode_match, double network_eta, double detector_eta) {
    const double x = mode_match * network_eta;
    const double sh = std::sinh(squeezing);
    const double sh2 = sh * sh;
    return -0.5 * detector_eta * (1.0 + x) * sh2 +
           0.5 * detector_eta * sh * std::sqrt((1.0 + x) * (1.0 + x) * sh2 + 4.0 * x);
}

OperatingPoint plan_photon_number(Scheme scheme, double modes, double eta) {
    if (!(eta > 0.0) || !(eta <= 1.0)) {
        throw UndefinedOperatingPoint("operating point needs overall efficiency in (0, 1]");
    }
    if (!(modes >= 1.0)) throw UndefinedOperatingPoint("operating point needs M >= 1");
    OperatingPoint op;
    op.photons = std::min(modes, std::sqrt(modes) / eta);
    if (scheme == Scheme::Spdc) op.sinh2_squeezing = op.photons / modes;
    return op;
}

nlohmann::json report_to_json(const SimulabilityReport& r) {
    nlohmann::json j;
    j["t_bar"] = r.t_bar.values();
    j["s_bar"] = r.s_bar.values();
    j["sigma_bar_eigenvalues"] = as_std(r.sigma_eigenvalues);
    j["simulatable"] = r.simulatable;
    if (r.ordering) {
        j["ordering"] = {{"s", r.ordering->first.values()}, {"t", r.ordering->second.values()}};
    } else {
        j["ordering"] = nullptr;
    }
    j["threshold_p_d"] = r.threshold_pd ? nlohmann::json(*r.threshold_pd) : nlohmann::json(nullptr);
    j["margin"] = r.margin ? nlohmann::json(*r.margin) : nlohmann::json(nullptr);
    if (r.scalar_threshold_estimate) j["scalar_threshold_estimate"] = *r.scalar_threshold_estimate;
    if (r.mismatch_pd) j["mismatch_p_d"] = *r.mismatch_pd;
    if (r.first_condition) {
        j["first_condition"] = {{"min_eigenvalue", r.first_condition->min_eigenvalue},
                                {"simulatable", r.first_condition->simulatable}};
    }
    j["loss_referred"] = r.loss_referred;
    j["notes"] = r.notes;
    return j;
}

std::string report_summary(const SimulabilityReport& r) {
    std::ostringstream os;
    os << (r.simulatable ? "SIMULATABLE" : "NOT SIMULATABLE") << " by the input/transition/measurement route";
    if (r.sigma_eigenvalues.size()) os << fmt::format(" (lambda_min(Sigma-bar) = {:.6g})", r.sigma_eigenvalues.minCoeff());
    os << '\n';
    if (r.threshold_pd) {
        os << fmt::format("  p_D threshold {:.6f}, margin {:+.6f}\n", *r.threshold_pd, r.margin.value_or(0.0));
    }
    if (r.scalar_threshold_estimate) {
        os << fmt::format("  uniform-loss estimate {:.6f}\n", *r.scalar_threshold_estimate);
    }
    if (r.mismatch_pd) os << fmt::format("  expected mismatch p_D {:.6f}\n", *r.mismatch_pd);
    if (r.first_condition) {
        os << fmt::format("  output-state route: {} (lambda_min = {:.6g})\n",
                          r.first_condition->simulatable ? "simulatable" : "not simulatable",
                          r.first_condition->min_eigenvalue);
    }
    return os.str();
}

}  // namespace pqdsim
