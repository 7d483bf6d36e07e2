#include "pqdsim/detectors.hpp"

#include <cmath>
#include <numbers>

#include "pqdsim/errors.hpp"

namespace pqdsim {

namespace {

constexpr double kOrderingSlack = 1e-12;

double denominator(double s, const DetectorModel& det) {
    const double den = 1.0 - det.efficiency * (1.0 - s) / 2.0;
    if (!(den > 0.0)) {
        throw SingularOrdering("detector PQD singular: 1 - eta_D(1-s)/2 = " + std::to_string(den) + " <= 0");
    }
    return den;
}

}  // namespace

void validate(const DetectorModel& det) {
    if (!(det.efficiency >= 0.0 && det.efficiency <= 1.0)) {
        throw ConfigError("detectors.eta_d", "must lie in [0, 1], got " + std::to_string(det.efficiency));
    }
    if (!(det.random_count >= 0.0 && det.random_count <= 1.0)) {
        throw ConfigError("detectors.p_d", "must lie in [0, 1], got " + std::to_string(det.random_count));
    }
}

std::string Outcome::to_string() const {
    std::string s(bits.size(), '0');
    for (std::size_t k = 0; k < bits.size(); ++k)
        if (bits[k]) s[k] = '1';
    return s;
}

Outcome Outcome::from_string(const std::string& text) {
    Outcome o;
    o.bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw InvalidDimension("outcome string must contain only 0/1");
        o.bits.push_back(c == '1' ? 1 : 0);
    }
    return o;
}

double pqd_off(Complex beta, double s, const DetectorModel& det) {
    // Pi_0 vanishes identically when every trial yields a random count.
    if (det.random_count >= 1.0) return 0.0;
    const double den = denominator(s, det);
    return (1.0 - det.random_count) / std::numbers::pi * std::exp(-det.efficiency * std::norm(beta) / den) / den;
}

double pqd_on(Complex beta, double s, const DetectorModel& det) {
    return 1.0 / std::numbers::pi - pqd_off(beta, s, det);
}

double click_probability(Complex beta, double s, const DetectorModel& det) {
    return std::numbers::pi * pqd_on(beta, s, det);
}

double s_bar(const DetectorModel& det) {
    if (det.efficiency <= 0.0) throw DegenerateDetector("s_bar undefined for eta_D = 0");
    return 1.0 - 2.0 * det.random_count / det.efficiency;
}

OrderingVector s_bar_vector(const std::vector<DetectorModel>& dets) {
    std::vector<double> v;
    v.reserve(dets.size());
    for (const auto& d : dets) v.push_back(s_bar(d));
    return OrderingVector(std::move(v));
}

OutcomeSampler::OutcomeSampler(const std::vector<DetectorModel>& dets, const OrderingVector& s) {
    if (dets.size() != s.size()) throw InvalidDimension("one ordering parameter per detector required");
    modes_.reserve(dets.size());
    for (std::size_t k = 0; k < dets.size(); ++k) {
        const auto& det = dets[k];
        validate(det);
        if (det.efficiency > 0.0 && s[k] < s_bar(det) - kOrderingSlack) {
            throw NegativeQuasiprobability(k, "output ordering s=" + std::to_string(s[k]) +
                                                  " below s_bar=" + std::to_string(s_bar(det)));
        }
        if (det.random_count >= 1.0) {
            modes_.push_back({0.0, 0.0});
            continue;
        }
        const double den = denominator(s[k], det);
        modes_.push_back({(1.0 - det.random_count) / den, det.efficiency / den});
    }
}

void OutcomeSampler::draw(const Amplitudes& beta, RngStream& rng, std::uint8_t* out) const {
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const auto& m = modes_[k];
        const double off = m.off_scale * std::exp(-m.rate * std::norm(beta(static_cast<Eigen::Index>(k))));
        out[k] = rng.uniform() >= off ? 1 : 0;
    }
}

Outcome sample_outcome(const Amplitudes& beta, const OrderingVector& s, const std::vector<DetectorModel>& dets,
                       RngStream& rng) {
    if (static_cast<std::size_t>(beta.size()) != dets.size()) {
        throw InvalidDimension("beta length differs from detector count");
    }
    OutcomeSampler sampler(dets, s);
    Outcome o;
    o.bits.resize(dets.size());
    sampler.draw(beta, rng, o.bits.data());
    return o;
}

}  // namespace pqdsim
