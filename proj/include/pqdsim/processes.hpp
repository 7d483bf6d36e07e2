#pragma once

#include <cstddef>

#include "pqdsim/linalg.hpp"
#include "pqdsim/states.hpp"

namespace pqdsim {

/// Sigma = I - L^+ L - s + L^+ t L. The LON transition function is a proper
/// Gaussian (or a delta, when Sigma = 0) exactly when Sigma is PSD.
struct SigmaMatrix {
    ComplexMatrix matrix;

    RealVector eigenvalues() const;
    double min_eigenvalue() const;
    bool positive_semidefinite(double tol = kPsdTol) const { return min_eigenvalue() >= -tol; }
};

SigmaMatrix sigma_matrix(const TransferMatrix& transfer, const OrderingVector& s, const OrderingVector& t);

/// Draws beta ~ T(beta | alpha): beta = alpha L + delta, E[delta^+ delta] = Sigma / 2.
/// Eigendirections of Sigma within 1e-10 of zero are deterministic, so
/// Sigma = 0 gives beta = alpha L exactly.
class TransitionSampler {
public:
    /// Throws SimulabilityViolated when Sigma has an eigenvalue below -1e-10.
    TransitionSampler(const TransferMatrix& transfer, const OrderingVector& s, const OrderingVector& t);

    void sample(const Amplitudes& alpha, RngStream& rng, Amplitudes& beta);

private:
    ComplexMatrix transfer_;
    ComplexGaussianSampler noise_;
};

Amplitudes transition_sample(const TransferMatrix& transfer, const OrderingVector& s, const OrderingVector& t,
                             const Amplitudes& alpha, RngStream& rng);

/// Network of ell-port elements, each of transmissivity sqrt(eta0), fully connecting `modes` ports.
struct LossModel {
    double eta0 = 1.0;
    int ell = 2;
    std::size_t modes = 1;

    bool operator==(const LossModel&) const = default;
};

void validate(const LossModel& model);

/// Per-photon transmission eta0^(log_ell M).
double uniform_loss_eta(const LossModel& model);

/// 2M x 2M real matrix acting on interleaved (x, p) quadratures for beta = alpha * L.
RealMatrix quadrature_map(const ComplexMatrix& transfer);

/// Wigner-state propagation through L, dilated with vacuum environment modes that are then traced out.
GaussianPQDState propagate_gaussian(const GaussianPQDState& state, const TransferMatrix& transfer);

}  // namespace pqdsim
