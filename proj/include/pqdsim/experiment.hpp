#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pqdsim/detectors.hpp"
#include "pqdsim/linalg.hpp"
#include "pqdsim/processes.hpp"
#include "pqdsim/states.hpp"

namespace pqdsim {

enum class Scheme { SinglePhoton, Spdc };

std::string scheme_name(Scheme scheme);

/// Fractions of mode-mismatched photons that still reach the detectors:
/// f_B of those lost at the input, f_L of those lost inside the network.
struct ModeMismatch {
    double input_fraction = 0.0;    // f_B
    double network_fraction = 0.0;  // f_L
    bool operator==(const ModeMismatch&) const = default;
};

struct IdentityLon {
    bool operator==(const IdentityLon&) const = default;
};

struct MatrixLon {
    ComplexMatrix matrix;
    std::string file;  // provenance only; empty when given inline
    bool operator==(const MatrixLon& o) const { return matrix == o.matrix && file == o.file; }
};

/// sqrt(eta_L) * U with U Haar-random from `unitary_seed`.
struct UniformLossLon {
    LossModel model;
    std::uint64_t unitary_seed = 0;
    bool operator==(const UniformLossLon&) const = default;
};

using LonSpec = std::variant<IdentityLon, MatrixLon, UniformLossLon>;

/// A validated experiment. For the SPDC scheme the modes are heralds
/// [0, M/2) followed by signals [M/2, M); a network given for M/2 modes acts
/// on the signals only (full transfer matrix I + L).
struct ExperimentConfig {
    InputState input;
    LonSpec lon;
    TransferMatrix transfer;
    std::vector<DetectorModel> detectors;
    std::optional<ModeMismatch> mismatch;
    Scheme scheme = Scheme::SinglePhoton;

    std::size_t modes() const { return input.modes(); }
    bool operator==(const ExperimentConfig&) const = default;
};

/// Builds the full M x M transfer matrix a LonSpec describes.
TransferMatrix resolve_transfer(const LonSpec& lon, std::size_t modes, Scheme scheme);

/// Validates and assembles a config. `detectors` may hold one entry (broadcast)
/// or one per mode; the scheme defaults to Spdc iff any SpdcPair is present.
ExperimentConfig make_experiment(InputState input, LonSpec lon, std::vector<DetectorModel> detectors,
                                 std::optional<ModeMismatch> mismatch = std::nullopt,
                                 std::optional<Scheme> scheme = std::nullopt);

/// Convenience for tests and tools: a known transfer matrix.
ExperimentConfig make_experiment(InputState input, const TransferMatrix& transfer,
                                 std::vector<DetectorModel> detectors);

bool all_gaussian(const InputState& input);

}  // namespace pqdsim
