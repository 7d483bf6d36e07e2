#include "pqdsim/processes.hpp"

#include <cmath>
#include <string>

#include "pqdsim/errors.hpp"

namespace pqdsim {

RealVector SigmaMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(matrix, Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
}

double SigmaMatrix::min_eigenvalue() const {
    const RealVector ev = eigenvalues();
    return ev.size() ? ev.minCoeff() : 0.0;
}

SigmaMatrix sigma_matrix(const TransferMatrix& transfer, const OrderingVector& s, const OrderingVector& t) {
    const ComplexMatrix& l = transfer.matrix();
    const auto n = l.rows();
    if (s.size() != transfer.modes() || t.size() != transfer.modes()) {
        throw InvalidDimension("ordering vectors must have " + std::to_string(n) + " entries");
    }
    const Eigen::VectorXcd tc = t.as_vector().cast<Complex>();
    const Eigen::VectorXcd sc = s.as_vector().cast<Complex>();
    ComplexMatrix sigma = ComplexMatrix::Identity(n, n) - l.adjoint() * l;
    sigma -= sc.asDiagonal();
    sigma += l.adjoint() * tc.asDiagonal() * l;
    // exact Hermitian symmetrization of roundoff
    sigma = (0.5 * (sigma + sigma.adjoint())).eval();
    return {sigma};
}

namespace {

ComplexGaussianSampler make_noise(const SigmaMatrix& sigma) {
    const double lo = sigma.min_eigenvalue();
    if (lo < -kPsdTol) {
        throw SimulabilityViolated("transition matrix Sigma has eigenvalue " + std::to_string(lo) +
                                   " < 0; no nonnegative transition function at these orderings");
    }
    return ComplexGaussianSampler(0.5 * sigma.matrix);
}

}  // namespace

TransitionSampler::TransitionSampler(const TransferMatrix& transfer, const OrderingVector& s,
                                     const OrderingVector& t)
    : transfer_(transfer.matrix()), noise_(make_noise(sigma_matrix(transfer, s, t))) {}

void TransitionSampler::sample(const Amplitudes& alpha, RngStream& rng, Amplitudes& beta) {
    if (alpha.size() != transfer_.rows()) throw InvalidDimension("alpha length differs from mode count");
    beta.resize(transfer_.cols());
    beta.noalias() = alpha * transfer_;
    noise_.add_draw(rng, beta);
}

Amplitudes transition_sample(const TransferMatrix& transfer, const OrderingVector& s, const OrderingVector& t,
                             const Amplitudes& alpha, RngStream& rng) {
    TransitionSampler sampler(transfer, s, t);
    Amplitudes beta;
    sampler.sample(alpha, rng, beta);
    return beta;
}

void validate(const LossModel& model) {
    if (!(model.eta0 > 0.0 && model.eta0 <= 1.0)) throw ConfigError("lon.eta0", "must lie in (0, 1]");
    if (model.ell < 2) throw ConfigError("lon.ell", "element arity must be >= 2");
    if (model.modes < 1) throw ConfigError("lon.M", "mode count must be >= 1");
}

double uniform_loss_eta(const LossModel& model) {
    validate(model);
    const double depth = std::log(static_cast<double>(model.modes)) / std::log(static_cast<double>(model.ell));
    return std::pow(model.eta0, depth);
}

RealMatrix quadrature_map(const ComplexMatrix& transfer) {
    const auto n = transfer.rows();
    RealMatrix s(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Complex z = transfer(j, k);
            s(2 * k, 2 * j) = z.real();
            s(2 * k, 2 * j + 1) = -z.imag();
            s(2 * k + 1, 2 * j) = z.imag();
            s(2 * k + 1, 2 * j + 1) = z.real();
        }
    }
    return s;
}

GaussianPQDState propagate_gaussian(const GaussianPQDState& state, const TransferMatrix& transfer) {
    const std::size_t m = transfer.modes();
    if (state.modes() != m) throw InvalidDimension("state and transfer matrix mode counts differ");
    const auto wigner = with_ordering(state, OrderingVector::constant(m, 0.0));

    const auto n = static_cast<Eigen::Index>(2 * m);
    const RealMatrix big = quadrature_map(dilate_to_unitary(transfer));
    RealMatrix cov_in = RealMatrix::Identity(2 * n, 2 * n);
    cov_in.topLeftCorner(n, n) = wigner.cov;
    RealVector mean_in = RealVector::Zero(2 * n);
    mean_in.head(n) = wigner.mean;

    const RealMatrix cov_out = big * cov_in * big.transpose();
    const RealVector mean_out = big * mean_in;
    RealMatrix cov = cov_out.topLeftCorner(n, n);
    cov = (0.5 * (cov + cov.transpose())).eval();
    return {wigner.ordering, mean_out.head(n), cov};
}

}  // namespace pqdsim
