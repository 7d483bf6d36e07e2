#include <doctest.h>

#include "pqdsim/errors.hpp"
#include "pqdsim/processes.hpp"
#include "reference.hpp"

using namespace pqdsim;

namespace {

ComplexMatrix random_contraction(Eigen::Index n, RngStream& rng) {
    ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(rng.normal(), rng.normal());
    return a / (spectral_norm(a) * (1.0 + rng.uniform()));
}

OrderingVector constant(std::size_t n, double v) { return OrderingVector::constant(n, v); }

GaussianPQDState coherent_state(const Amplitudes& alpha) {
    const auto m = alpha.size();
    GaussianPQDState s{constant(static_cast<std::size_t>(m), 0.0), RealVector(2 * m), RealMatrix::Identity(2 * m, 2 * m)};
    for (Eigen::Index k = 0; k < m; ++k) {
        s.mean(2 * k) = 2.0 * alpha(k).real();
        s.mean(2 * k + 1) = 2.0 * alpha(k).imag();
    }
    return s;
}

}  // namespace

TEST_CASE("sigma_matrix") {
    RngStream rng(2);
    SUBCASE("unitary network with s = t = 1 gives zero") {
        const TransferMatrix u(haar_unitary(4, rng));
        CHECK(sigma_matrix(u, constant(4, 1.0), constant(4, 1.0)).matrix.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("s = t = 0 gives I - L^+L") {
        const TransferMatrix l(random_contraction(3, rng));
        const auto sigma = sigma_matrix(l, constant(3, 0.0), constant(3, 0.0));
        const ComplexMatrix expected = ComplexMatrix::Identity(3, 3) - l.matrix().adjoint() * l.matrix();
        CHECK((sigma.matrix - expected).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(sigma.positive_semidefinite());
    }
    SUBCASE("scalar example is not PSD") {
        const TransferMatrix l(std::sqrt(0.5) * ComplexMatrix::Identity(2, 2));
        const auto sigma = sigma_matrix(l, constant(2, 0.9), constant(2, 0.5));
        CHECK((sigma.matrix - (-0.15) * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK_FALSE(sigma.positive_semidefinite());
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(sigma_matrix(TransferMatrix::identity(2), constant(3, 0.0), constant(2, 0.0)),
                        InvalidDimension);
    }
    SUBCASE("Hermitian and PSD for equal constant orderings") {
        for (int trial = 0; trial < 50; ++trial) {
            const TransferMatrix l(random_contraction(4, rng));
            for (double c : {-1.0, -0.3, 0.0, 0.5, 0.99, 1.0}) {
                const auto sigma = sigma_matrix(l, constant(4, c), constant(4, c));
                CHECK(sigma.matrix == sigma.matrix.adjoint());
                const ComplexMatrix expected =
                    (1.0 - c) * (ComplexMatrix::Identity(4, 4) - l.matrix().adjoint() * l.matrix());
                CHECK((sigma.matrix - expected).cwiseAbs().maxCoeff() <= 1e-12);
                CHECK(sigma.min_eigenvalue() >= -1e-12);
            }
        }
    }
}

TEST_CASE("transition_sample") {
    RngStream rng(4);
    SUBCASE("delta transition for s = t = 1 on a unitary") {
        const TransferMatrix u(haar_unitary(3, rng));
        Amplitudes alpha(3);
        alpha << 1.0, 0.0, 0.0;
        const Amplitudes expected = alpha * u.matrix();
        TransitionSampler sampler(u, constant(3, 1.0), constant(3, 1.0));
        Amplitudes beta;
        for (int i = 0; i < 5; ++i) {
            sampler.sample(alpha, rng, beta);
            CHECK(beta == expected);
        }
    }
    SUBCASE("full loss at s = t = 0 gives vacuum noise") {
        const TransferMatrix zero(ComplexMatrix::Zero(2, 2));
        TransitionSampler sampler(zero, constant(2, 0.0), constant(2, 0.0));
        Amplitudes alpha(2);
        alpha << Complex(3.0, 1.0), -2.0;
        Amplitudes beta;
        std::vector<double> xs;
        for (int i = 0; i < 100000; ++i) {
            sampler.sample(alpha, rng, beta);
            xs.push_back(std::norm(beta(1)));
        }
        const auto m = ref::moments(xs);
        CHECK(ref::within_se(m.mean, 0.5, m.sd, xs.size()));
    }
    SUBCASE("single-mode mean and variance") {
        ComplexMatrix l(1, 1);
        l(0, 0) = std::sqrt(0.5);
        TransitionSampler sampler(TransferMatrix(l), constant(1, 0.0), constant(1, 0.0));
        Amplitudes alpha(1);
        alpha << 2.0;
        Amplitudes beta;
        std::vector<double> re, spread;
        for (int i = 0; i < 100000; ++i) {
            sampler.sample(alpha, rng, beta);
            re.push_back(beta(0).real());
            spread.push_back(std::norm(beta(0) - std::sqrt(2.0)));
        }
        const auto mr = ref::moments(re);
        const auto ms = ref::moments(spread);
        CHECK(ref::within_se(mr.mean, std::sqrt(2.0), mr.sd, re.size()));
        CHECK(ref::within_se(ms.mean, 0.25, ms.sd, spread.size()));
    }
    SUBCASE("non-PSD Sigma is refused") {
        const TransferMatrix l(std::sqrt(0.5) * ComplexMatrix::Identity(2, 2));
        CHECK_THROWS_AS(TransitionSampler(l, constant(2, 0.9), constant(2, 0.5)), SimulabilityViolated);
    }
}

TEST_CASE("uniform_loss_eta") {
    const double eta10 = uniform_loss_eta({0.98, 2, 10});
    const double eta1600 = uniform_loss_eta({0.98, 2, 1600});
    CHECK(std::round(eta10 * 100) / 100 == doctest::Approx(0.94));
    CHECK(std::round(eta1600 * 100) / 100 == doctest::Approx(0.81));
    CHECK(uniform_loss_eta({1.0, 3, 81}) == 1.0);
    CHECK(uniform_loss_eta({0.9, 2, 8}) == doctest::Approx(0.729).epsilon(1e-14));
    CHECK_THROWS_AS(validate(LossModel{0.0, 2, 4}), ConfigError);
    CHECK_THROWS_AS(validate(LossModel{0.9, 1, 4}), ConfigError);
}

TEST_CASE("propagate_gaussian") {
    RngStream rng(8);
    SUBCASE("vacuum is invariant") {
        const TransferMatrix u(haar_unitary(3, rng));
        const auto out = propagate_gaussian(coherent_state(Amplitudes::Zero(3)), u);
        CHECK((out.cov - RealMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(out.mean.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("coherent states map to coherent states") {
        const TransferMatrix u(haar_unitary(3, rng));
        Amplitudes alpha(3);
        alpha << Complex(1.0, -0.5), 0.3, Complex(0.0, 2.0);
        const auto out = propagate_gaussian(coherent_state(alpha), u);
        const auto expected = coherent_state(alpha * u.matrix());
        CHECK((out.mean - expected.mean).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((out.cov - RealMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("signal loss composes with the pair's own loss") {
        const double r = 0.8;
        const double eta_b = 0.3;
        const double eta_l = 0.6;
        ComplexMatrix l = ComplexMatrix::Identity(2, 2);
        l(1, 1) = std::sqrt(eta_l);
        const auto out = propagate_gaussian(spdc_covariance(r, eta_b), TransferMatrix(l));
        CHECK((out.cov - spdc_covariance(r, eta_b * eta_l).cov).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("passive networks never add photons") {
        InputState input(3, {{Thermal{0.7}, {0}}, {SpdcPair{0.5, 0.8}, {1, 2}}});
        const auto in = wigner_state(input);
        for (int trial = 0; trial < 20; ++trial) {
            const auto out = propagate_gaussian(in, TransferMatrix(random_contraction(3, rng)));
            const double n_in = (in.cov.trace() - 6.0) / 4.0;
            const double n_out = (out.cov.trace() - 6.0) / 4.0;
            CHECK(n_out <= n_in + 1e-12);
        }
    }
    SUBCASE("composition") {
        InputState input(3, {{Coherent{{0.4, 0.2}}, {0}}, {SpdcPair{0.7, 0.5}, {1, 2}}});
        const auto in = wigner_state(input);
        for (int trial = 0; trial < 10; ++trial) {
            const ComplexMatrix l1 = random_contraction(3, rng);
            const ComplexMatrix l2 = random_contraction(3, rng);
            const auto two_step = propagate_gaussian(propagate_gaussian(in, TransferMatrix(l1)), TransferMatrix(l2));
            const auto one_step = propagate_gaussian(in, TransferMatrix(l1 * l2));
            CHECK((two_step.cov - one_step.cov).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((two_step.mean - one_step.mean).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("quadrature_map matches the amplitude map") {
    RngStream rng(10);
    const ComplexMatrix l = random_contraction(3, rng);
    Amplitudes alpha(3);
    alpha << Complex(0.2, 1.0), Complex(-1.0, 0.5), 0.7;
    RealVector x(6);
    for (Eigen::Index k = 0; k < 3; ++k) {
        x(2 * k) = 2.0 * alpha(k).real();
        x(2 * k + 1) = 2.0 * alpha(k).imag();
    }
    const RealVector y = quadrature_map(l) * x;
    const Amplitudes beta = alpha * l;
    for (Eigen::Index k = 0; k < 3; ++k) {
        CHECK(std::abs(y(2 * k) / 2.0 - beta(k).real()) <= 1e-12);
        CHECK(std::abs(y(2 * k + 1) / 2.0 - beta(k).imag()) <= 1e-12);
    }
}
