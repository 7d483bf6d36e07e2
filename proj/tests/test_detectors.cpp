#include <doctest.h>

#include "pqdsim/detectors.hpp"
#include "pqdsim/errors.hpp"
#include "reference.hpp"

using namespace pqdsim;

namespace {

const double kInvPi = 1.0 / ref::kPi;

// s-ordered PQD of the coherent state |alpha>: Gaussian with E|beta - alpha|^2 = (1 - s)/2.
double coherent_pqd(Complex beta, Complex alpha, double s) {
    const double w = (1.0 - s) / 2.0;
    return std::exp(-std::norm(beta - alpha) / w) / (ref::kPi * w);
}

}  // namespace

TEST_CASE("pqd_off and pqd_on values") {
    const DetectorModel ideal{1.0, 0.0};
    CHECK(pqd_off(0.0, 1.0, ideal) == doctest::Approx(kInvPi).epsilon(1e-15));
    CHECK(pqd_on(0.0, 1.0, ideal) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(pqd_off(Complex(2.0, -1.0), 0.3, DetectorModel{0.8, 1.0}) == 0.0);
    // Ideal efficiency at s = -1 makes the denominator vanish.
    CHECK_THROWS_AS(pqd_off(0.0, -1.0, ideal), SingularOrdering);
    CHECK(pqd_off(0.0, -1.0, DetectorModel{0.5, 0.0}) == doctest::Approx(2.0 * kInvPi).epsilon(1e-15));
    CHECK(pqd_off(0.0, 0.0, ideal) == doctest::Approx(2.0 * kInvPi).epsilon(1e-15));
    CHECK(pqd_on(Complex(30.0, 0.0), 1.0, DetectorModel{0.95, 0.05}) == doctest::Approx(kInvPi).epsilon(1e-15));
    CHECK(pqd_on(0.0, 1.0, DetectorModel{0.95, 0.05}) == doctest::Approx(0.05 * kInvPi).epsilon(1e-14));
}

TEST_CASE("s_bar") {
    CHECK(s_bar(DetectorModel{0.95, 0.0}) == 1.0);
    CHECK(s_bar(DetectorModel{0.95, 0.044}) == doctest::Approx(0.9074).epsilon(1e-4));
    CHECK(s_bar(DetectorModel{1.0, 1.0}) == -1.0);
    CHECK_THROWS_AS(s_bar(DetectorModel{0.0, 0.1}), DegenerateDetector);
    CHECK_THROWS_AS(validate(DetectorModel{0.9, 1.2}), ConfigError);
}

TEST_CASE("per-mode completeness") {
    RngStream rng(1);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const DetectorModel d{rng.uniform(), rng.uniform()};
        const double s = 1.0 - 1.9 * rng.uniform();
        const Complex beta(3.0 * rng.normal(), 3.0 * rng.normal());
        if (1.0 - d.efficiency * (1.0 - s) / 2.0 <= 0.0) continue;
        worst = std::max(worst, std::abs(ref::kPi * (pqd_off(beta, s, d) + pqd_on(beta, s, d)) - 1.0));
    }
    CHECK(worst <= 4e-16);
}

TEST_CASE("click PQD nonnegative exactly from s_bar") {
    for (const DetectorModel d : {DetectorModel{0.95, 0.05}, DetectorModel{0.6, 0.2}, DetectorModel{1.0, 0.01}}) {
        const double sb = s_bar(d);
        auto grid_min = [&](double s) {
            double lo = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 1000; ++i) lo = std::min(lo, pqd_on(std::sqrt(10.0 * i / 999.0), s, d));
            return lo;
        };
        CAPTURE(d.efficiency);
        CHECK(grid_min(sb + 0.01) >= 0.0);
        CHECK(grid_min(sb) >= -1e-15);
        CHECK(grid_min(sb - 0.01) < 0.0);
        // The minimum sits at the origin.
        CHECK(grid_min(sb + 0.01) == pqd_on(0.0, sb + 0.01, d));
    }
}

TEST_CASE("click probability at s = 1 is the Born rule for coherent light") {
    for (double p : {0.0, 0.05, 0.3}) {
        for (double eta : {0.2, 0.95, 1.0}) {
            for (double b2 : {0.0, 0.5, 3.0}) {
                const DetectorModel d{eta, p};
                const Complex beta(std::sqrt(b2), 0.0);
                CHECK(click_probability(beta, 1.0, d) ==
                      doctest::Approx(1.0 - (1.0 - p) * std::exp(-eta * b2)).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("detector PQD quadratures") {
    SUBCASE("integral of the no-click PQD is Tr(Pi_0) = (1 - p_D)/eta_D") {
        for (const DetectorModel d : {DetectorModel{0.95, 0.05}, DetectorModel{0.5, 0.0}}) {
            for (double s : {0.0, 0.5, 1.0}) {
                const double total = ref::radial_integral([&](double r) { return pqd_off(r, s, d); }, 12.0);
                CHECK(std::abs(total - (1.0 - d.random_count) / d.efficiency) <= 1e-6);
            }
        }
    }
    SUBCASE("overlap with a coherent-state PQD gives the Born rule") {
        const DetectorModel d{0.8, 0.1};
        const Complex alpha(0.6, -0.3);
        for (double s : {-0.5, 0.0, 0.6}) {
            const double half_width = 4.0 * std::sqrt((1.0 - s) / 2.0) + 1.0;
            const double off = ref::kPi * ref::plane_integral(
                                              [&](Complex beta) { return coherent_pqd(beta, alpha, s) * pqd_off(beta, s, d); },
                                              alpha, half_width, 400);
            CAPTURE(s);
            CHECK(std::abs(off - (1.0 - d.random_count) * std::exp(-d.efficiency * std::norm(alpha))) <= 1e-6);
        }
    }
}

TEST_CASE("click probability monotonicity") {
    const double s = 0.2;
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double v = click_probability(std::sqrt(0.2 * i), s, DetectorModel{0.9, 0.1});
        CHECK(v > prev);
        prev = v;
    }
    prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double v = click_probability(0.7, s, DetectorModel{0.9, 0.05 * i});
        CHECK(v > prev);
        prev = v;
    }
    prev = -1.0;
    for (int i = 1; i <= 20; ++i) {
        const double v = click_probability(0.7, 1.0, DetectorModel{0.05 * i, 0.1});
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("sample_outcome") {
    RngStream rng(6);
    SUBCASE("ideal detectors on vacuum never click") {
        const std::vector<DetectorModel> dets(3, DetectorModel{1.0, 0.0});
        for (int i = 0; i < 100; ++i)
            CHECK(sample_outcome(Amplitudes::Zero(3), OrderingVector::constant(3, 1.0), dets, rng).to_string() == "000");
    }
    SUBCASE("bright light always clicks") {
        const std::vector<DetectorModel> dets(1, DetectorModel{0.95, 0.0});
        Amplitudes beta(1);
        beta << 10.0;
        for (int i = 0; i < 100; ++i)
            CHECK(sample_outcome(beta, OrderingVector::constant(1, 1.0), dets, rng).bits[0] == 1);
    }
    SUBCASE("random counts on vacuum at rate p_D") {
        const std::vector<DetectorModel> dets(1, DetectorModel{0.95, 0.05});
        std::vector<double> xs;
        for (int i = 0; i < 100000; ++i)
            xs.push_back(sample_outcome(Amplitudes::Zero(1), OrderingVector::constant(1, 1.0), dets, rng).bits[0]);
        const auto m = ref::moments(xs);
        CHECK(ref::within_se(m.mean, 0.05, m.sd, xs.size()));
    }
    SUBCASE("ordering below s_bar is refused, naming the mode") {
        const std::vector<DetectorModel> dets{DetectorModel{0.9, 0.2}, DetectorModel{0.9, 0.01}};
        try {
            OutcomeSampler(dets, OrderingVector({0.6, 0.6}));
            FAIL("expected NegativeQuasiprobability");
        } catch (const NegativeQuasiprobability& e) {
            CHECK(e.mode() == 1);
        }
    }
    SUBCASE("outcome strings") {
        CHECK(Outcome::from_string("0110").bits == std::vector<std::uint8_t>{0, 1, 1, 0});
        CHECK(Outcome{{1, 0}}.to_string() == "10");
        CHECK_THROWS_AS(Outcome::from_string("01x"), InvalidDimension);
    }
}
