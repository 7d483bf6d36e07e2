#include <doctest.h>

#include "pqdsim/errors.hpp"
#include "pqdsim/states.hpp"
#include "reference.hpp"

using namespace pqdsim;

namespace {

std::vector<Amplitudes> draws(const InputState& input, const OrderingVector& t, int n, std::uint64_t seed) {
    InputSampler sampler(input, t);
    RngStream rng(seed);
    std::vector<Amplitudes> out(n);
    for (auto& a : out) sampler.draw(rng, a);
    return out;
}

std::vector<double> photon_moment(const std::vector<Amplitudes>& xs, Eigen::Index k) {
    std::vector<double> v;
    v.reserve(xs.size());
    for (const auto& a : xs) v.push_back(std::norm(a(k)));
    return v;
}

double spdc_min_eigenvalue(double r, double eta) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(spdc_covariance(r, eta).cov, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("single-photon mixture PQD values") {
    const double two_over_pi = 2.0 / ref::kPi;
    CHECK(pqd_single_photon_mixture(0.0, 0.0, 0.0) == doctest::Approx(two_over_pi).epsilon(1e-15));
    CHECK(pqd_single_photon_mixture(0.0, 0.0, 1.0) == doctest::Approx(-two_over_pi).epsilon(1e-15));
    // Boundary ordering t = 1 - 2 eta_bar: zero at the origin, positive elsewhere.
    CHECK(std::abs(pqd_single_photon_mixture(0.0, 0.0, 0.5)) <= 1e-15);
    CHECK(pqd_single_photon_mixture(0.5, 0.0, 0.5) > 0.0);
    CHECK_THROWS_AS(pqd_single_photon_mixture(0.0, 1.0, 0.3), SingularOrdering);
}

TEST_CASE("single-photon PQD is normalized") {
    for (double eta : {0.0, 0.05, 0.5}) {
        for (double t : {-1.0, 0.0, 0.5}) {
            const double radius = 8.0 * std::sqrt(1.0 - t);
            const double total =
                ref::radial_integral([&](double r) { return pqd_single_photon_mixture(r, t, eta); }, radius);
            CAPTURE(eta);
            CAPTURE(t);
            CHECK(std::abs(total - 1.0) <= 1e-6);
        }
    }
}

TEST_CASE("single-photon PQD nonnegative exactly up to t_bar") {
    for (double eta : {0.05, 0.2, 0.45, 0.8}) {
        const double tb = 1.0 - 2.0 * eta;
        auto grid_min = [&](double t) {
            double lo = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 1000; ++i) {
                const double r2 = 10.0 * i / 999.0;
                lo = std::min(lo, pqd_single_photon_mixture(std::sqrt(r2), t, eta));
            }
            return lo;
        };
        CAPTURE(eta);
        CHECK(grid_min(tb - 0.01) >= 0.0);
        CHECK(grid_min(tb) >= -1e-12);
        CHECK(grid_min(tb + 0.01) < 0.0);
    }
}

TEST_CASE("t_bar") {
    CHECK(t_bar(Vacuum{}) == 1.0);
    CHECK(t_bar(Coherent{{2.0, 1.0}}) == 1.0);
    CHECK(t_bar(Thermal{3.0}) == 1.0);
    CHECK(t_bar(MixedSinglePhoton{0.5, 0.1}) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(t_bar(SpdcPair{1.3, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t_bar(SpdcPair{0.0, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("spdc closed form equals the smallest covariance eigenvalue") {
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 20; ++j) {
                const double r = 2.0 * i / 19.0;
                const double eta = j / 19.0;
                CAPTURE(r);
                CAPTURE(eta);
                CHECK(std::abs(t_bar(SpdcPair{r, eta}) - spdc_min_eigenvalue(r, eta)) <= 1e-12);
            }
        }
    }
    SUBCASE("monotone decreasing") {
        double prev = 2.0;
        for (int i = 0; i <= 20; ++i) {
            const double v = t_bar(MixedSinglePhoton{1.0, i / 20.0});
            CHECK(v < prev);
            prev = v;
        }
        for (double eta : {0.1, 0.5, 1.0}) {
            prev = 2.0;
            for (int i = 0; i <= 20; ++i) {
                const double v = t_bar(SpdcPair{0.1 * i, eta});
                if (i > 0) CHECK(v < prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("spdc covariance") {
    const auto vac = spdc_covariance(0.0, 0.7);
    CHECK((vac.cov - RealMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(vac.mean.isZero());

    const auto tmsv = spdc_covariance(1.0, 1.0);
    const double c = std::cosh(2.0);
    const double s = std::sinh(2.0);
    CHECK(c == doctest::Approx(3.7622).epsilon(1e-4));
    RealMatrix expected(4, 4);
    expected << c, 0, s, 0, 0, c, 0, -s, s, 0, c, 0, 0, -s, 0, c;
    CHECK((tmsv.cov - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("input ordering admissibility") {
    InputState input(3, {{MixedSinglePhoton{0.5, 0.1}, {1}}});
    CHECK_NOTHROW(InputSampler(input, OrderingVector({1.0, 0.9, 1.0})));
    try {
        InputSampler(input, OrderingVector({1.0, 0.95, 1.0}));
        FAIL("expected NegativeQuasiprobability");
    } catch (const NegativeQuasiprobability& e) {
        CHECK(e.mode() == 1);
    }
    CHECK_THROWS_AS(OrderingVector({1.5}), SingularOrdering);
}

TEST_CASE("input sampler") {
    SUBCASE("vacuum Wigner draws have E|alpha|^2 = 1/2") {
        InputState input(2, {});
        const auto xs = draws(input, OrderingVector::constant(2, 0.0), 100000, 1);
        for (Eigen::Index k = 0; k < 2; ++k) {
            const auto m = ref::moments(photon_moment(xs, k));
            CHECK(ref::within_se(m.mean, 0.5, m.sd, xs.size()));
        }
    }
    SUBCASE("coherent P function is a point") {
        InputState input(1, {{Coherent{{2.0, 0.0}}, {0}}});
        const auto xs = draws(input, OrderingVector({1.0}), 10, 2);
        for (const auto& a : xs) CHECK(a(0) == Complex(2.0, 0.0));
    }
    SUBCASE("single photon at t near t_bar matches the quadrature moment") {
        const double eta = 0.05;
        const double t = 0.9;
        InputState input(1, {{MixedSinglePhoton{0.5, 0.1}, {0}}});
        const auto xs = draws(input, OrderingVector({t}), 100000, 3);
        const double quad = ref::radial_integral(
            [&](double r) { return r * r * pqd_single_photon_mixture(r, t, eta); }, 8.0 * std::sqrt(1.0 - t));
        CHECK(quad == doctest::Approx(0.1).epsilon(1e-6));
        const auto m = ref::moments(photon_moment(xs, 0));
        CHECK(ref::within_se(m.mean, quad, m.sd, xs.size()));
    }
    SUBCASE("single photon moments over admissible orderings") {
        for (double eta : {0.2, 0.5}) {
            for (double t : {-1.0, 0.0, 1.0 - 2.0 * eta}) {
                InputState input(1, {{MixedSinglePhoton{1.0, eta}, {0}}});
                const auto xs = draws(input, OrderingVector({t}), 100000, 4);
                auto quad = [&](int power) {
                    return ref::radial_integral(
                        [&](double r) { return std::pow(r, power) * pqd_single_photon_mixture(r, t, eta); },
                        8.0 * std::sqrt(1.0 - t));
                };
                std::vector<double> r2 = photon_moment(xs, 0);
                std::vector<double> re;
                for (const auto& a : xs) re.push_back(a(0).real());
                const auto m2 = ref::moments(r2);
                const auto m1 = ref::moments(re);
                CAPTURE(eta);
                CAPTURE(t);
                CHECK(ref::within_se(m2.mean, quad(2), m2.sd, xs.size()));
                CHECK(ref::within_se(m1.mean, 0.0, m1.sd, xs.size()));
                std::vector<double> r4;
                for (double v : r2) r4.push_back(v * v);
                const auto m4 = ref::moments(r4);
                CHECK(ref::within_se(m4.mean, quad(4), m4.sd, xs.size()));
            }
        }
    }
    SUBCASE("coherent and thermal moments") {
        const Complex amp(0.7, -0.4);
        InputState input(2, {{Coherent{amp}, {0}}, {Thermal{1.5}, {1}}});
        for (double t : {-1.0, 0.0, 0.6}) {
            const auto xs = draws(input, OrderingVector::constant(2, t), 100000, 5);
            std::vector<double> re, spread;
            for (const auto& a : xs) {
                re.push_back(a(0).real());
                spread.push_back(std::norm(a(0) - amp));
            }
            const auto mr = ref::moments(re);
            const auto ms = ref::moments(spread);
            const auto mt = ref::moments(photon_moment(xs, 1));
            CAPTURE(t);
            CHECK(ref::within_se(mr.mean, amp.real(), mr.sd, xs.size()));
            CHECK(ref::within_se(ms.mean, (1.0 - t) / 2.0, ms.sd, xs.size()));
            CHECK(ref::within_se(mt.mean, 1.5 + (1.0 - t) / 2.0, mt.sd, xs.size()));
        }
    }
    SUBCASE("spdc pair moments") {
        const double r = 0.6;
        const double eta = 0.4;
        InputState input(2, {{SpdcPair{r, eta}, {0, 1}}});
        const double tb = t_bar(SpdcPair{r, eta});
        for (double t : {0.0, tb}) {
            const auto xs = draws(input, OrderingVector::constant(2, t), 100000, 6);
            const auto cov = spdc_covariance(r, eta).cov;
            // E|alpha|^2 = (var x + var p) / 4 at ordering t.
            const double herald = (cov(0, 0) + cov(1, 1) - 2.0 * t) / 4.0;
            const double signal = (cov(2, 2) + cov(3, 3) - 2.0 * t) / 4.0;
            // E[alpha_h alpha_s] = (<x_h x_s> - <p_h p_s>) / 4 (imaginary part vanishes here).
            const double pair = (cov(0, 2) - cov(1, 3)) / 4.0;
            std::vector<double> prod;
            for (const auto& a : xs) prod.push_back((a(0) * a(1)).real());
            const auto mh = ref::moments(photon_moment(xs, 0));
            const auto ms = ref::moments(photon_moment(xs, 1));
            const auto mp = ref::moments(prod);
            CAPTURE(t);
            CHECK(ref::within_se(mh.mean, herald, mh.sd, xs.size()));
            CHECK(ref::within_se(ms.mean, signal, ms.sd, xs.size()));
            CHECK(ref::within_se(mp.mean, pair, mp.sd, xs.size()));
        }
    }
}

TEST_CASE("Gaussian state helpers") {
    InputState input(3, {{Coherent{{1.0, 2.0}}, {0}}, {Thermal{0.5}, {2}}});
    const auto w = wigner_state(input);
    CHECK(w.mean(0) == doctest::Approx(2.0));
    CHECK(w.mean(1) == doctest::Approx(4.0));
    CHECK(w.cov(4, 4) == doctest::Approx(2.0));
    const auto shifted = with_ordering(w, OrderingVector::constant(3, 1.0));
    CHECK(shifted.cov(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(shifted.cov(4, 4) == doctest::Approx(1.0));
    CHECK_THROWS_AS(wigner_state(InputState(1, {{MixedSinglePhoton{}, {0}}})), UnsupportedSource);
}

TEST_CASE("source validation") {
    CHECK_THROWS_AS(validate(MixedSinglePhoton{1.2, 0.5}), ConfigError);
    CHECK_THROWS_AS(validate(Thermal{-1.0}), ConfigError);
    CHECK_THROWS_AS(validate(SpdcPair{-0.1, 0.5}), ConfigError);
    CHECK_THROWS_AS(InputState(2, {{Vacuum{}, {0}}, {Vacuum{}, {0}}}), ConfigError);
    CHECK_THROWS_AS(InputState(2, {{SpdcPair{0.3, 1.0}, {0}}}), ConfigError);
    CHECK(port_count(SpdcPair{}) == 2);
    CHECK(is_gaussian(Thermal{}));
    CHECK_FALSE(is_gaussian(MixedSinglePhoton{}));
}
