#include "pqdsim/experiment.hpp"

#include <cmath>

#include "pqdsim/errors.hpp"

namespace pqdsim {

std::string scheme_name(Scheme scheme) { return scheme == Scheme::Spdc ? "spdc" : "single-photon"; }

namespace {

TransferMatrix embed_signal_network(const ComplexMatrix& l, std::size_t modes, Scheme scheme) {
    const auto n = static_cast<Eigen::Index>(modes);
    if (l.rows() == n) return TransferMatrix(l);
    if (scheme == Scheme::Spdc && 2 * l.rows() == n) {
        ComplexMatrix full = ComplexMatrix::Identity(n, n);
        full.bottomRightCorner(l.rows(), l.cols()) = l;
        return TransferMatrix(full);
    }
    throw ConfigError("lon", "network has " + std::to_string(l.rows()) + " modes; experiment has " +
                                 std::to_string(modes));
}

}  // namespace

TransferMatrix resolve_transfer(const LonSpec& lon, std::size_t modes, Scheme scheme) {
    if (const auto* m = std::get_if<MatrixLon>(&lon)) {
        if (m->matrix.rows() != m->matrix.cols()) throw ConfigError("lon", "transfer matrix must be square");
        try {
            return embed_signal_network(m->matrix, modes, scheme);
        } catch (const NotAContraction& e) {
            throw ConfigError("lon", e.what());
        }
    }
    if (const auto* u = std::get_if<UniformLossLon>(&lon)) {
        validate(u->model);
        RngStream rng(u->unitary_seed);
        const ComplexMatrix l = std::sqrt(uniform_loss_eta(u->model)) * haar_unitary(u->model.modes, rng);
        return embed_signal_network(l, modes, scheme);
    }
    return TransferMatrix::identity(modes);
}

ExperimentConfig make_experiment(InputState input, LonSpec lon, std::vector<DetectorModel> detectors,
                                 std::optional<ModeMismatch> mismatch, std::optional<Scheme> scheme) {
    const std::size_t m = input.modes();
    bool has_pair = false;
    for (const auto& a : input.assignments()) has_pair |= std::holds_alternative<SpdcPair>(a.source);
    const Scheme resolved = scheme.value_or(has_pair ? Scheme::Spdc : Scheme::SinglePhoton);

    if (resolved == Scheme::Spdc) {
        if (m % 2 != 0) {
            throw ConfigError("M", "port pairing: the spdc scheme needs an even mode count (heralds then signals)");
        }
        for (const auto& a : input.assignments()) {
            if (!std::holds_alternative<SpdcPair>(a.source)) continue;
            if (a.ports[0] >= m / 2 || a.ports[1] < m / 2) {
                throw ConfigError("sources", "port pairing: herald ports must lie in [0, M/2), signal ports in [M/2, M)");
            }
        }
    } else if (has_pair) {
        throw ConfigError("scheme", "spdc sources require the spdc scheme");
    }

    if (detectors.size() == 1 && m > 1) detectors.assign(m, detectors.front());
    if (detectors.size() != m) {
        throw ConfigError("detectors", "expected 1 or " + std::to_string(m) + " detectors, got " +
                                           std::to_string(detectors.size()));
    }
    for (const auto& d : detectors) validate(d);

    if (mismatch) {
        if (!(mismatch->input_fraction >= 0.0 && mismatch->input_fraction <= 1.0))
            throw ConfigError("mismatch.f_b", "must lie in [0, 1]");
        if (!(mismatch->network_fraction >= 0.0 && mismatch->network_fraction <= 1.0))
            throw ConfigError("mismatch.f_l", "must lie in [0, 1]");
    }

    TransferMatrix transfer = resolve_transfer(lon, m, resolved);
    return ExperimentConfig{std::move(input), std::move(lon), std::move(transfer), std::move(detectors),
                            mismatch, resolved};
}

ExperimentConfig make_experiment(InputState input, const TransferMatrix& transfer,
                                 std::vector<DetectorModel> detectors) {
    return make_experiment(std::move(input), MatrixLon{transfer.matrix(), {}}, std::move(detectors));
}

bool all_gaussian(const InputState& input) {
    for (const auto& a : input.assignments())
        if (!is_gaussian(a.source)) return false;
    return true;
}

}  // namespace pqdsim
