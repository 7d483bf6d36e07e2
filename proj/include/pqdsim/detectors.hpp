#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqdsim/linalg.hpp"
#include "pqdsim/rng.hpp"
#include "pqdsim/states.hpp"

namespace pqdsim {

/// On-off detector: Pi_0 = (1 - p_D) sum_m (1 - eta_D)^m |m><m|, Pi_1 = I - Pi_0.
struct DetectorModel {
    double efficiency = 1.0;   // eta_D
    double random_count = 0.0; // p_D

    bool operator==(const DetectorModel&) const = default;
};

void validate(const DetectorModel& det);

/// Joint on-off outcome, one bit per mode.
struct Outcome {
    std::vector<std::uint8_t> bits;

    std::string to_string() const;
    static Outcome from_string(const std::string& text);
    bool operator==(const Outcome&) const = default;
};

/// (-s)-ordered PQD of the no-click element at beta.
double pqd_off(Complex beta, double s, const DetectorModel& det);

/// (-s)-ordered PQD of the click element: 1/pi - pqd_off.
double pqd_on(Complex beta, double s, const DetectorModel& det);

/// pi * pqd_on: the click probability handed to the outcome draw.
double click_probability(Complex beta, double s, const DetectorModel& det);

/// Smallest s at which pqd_on is nonnegative everywhere: 1 - 2 p_D / eta_D.
double s_bar(const DetectorModel& det);

/// s_bar for each detector.
OrderingVector s_bar_vector(const std::vector<DetectorModel>& dets);

/// Independent per-mode click draws given beta. Construction checks s_k >= s_bar_k.
class OutcomeSampler {
public:
    OutcomeSampler(const std::vector<DetectorModel>& dets, const OrderingVector& s);

    std::size_t modes() const noexcept { return modes_.size(); }

    /// Writes one byte (0/1) per mode to `out`.
    void draw(const Amplitudes& beta, RngStream& rng, std::uint8_t* out) const;

private:
    struct Mode {
        double off_scale;  // (1 - p_D) / den
        double rate;       // eta_D / den
    };
    std::vector<Mode> modes_;
};

Outcome sample_outcome(const Amplitudes& beta, const OrderingVector& s, const std::vector<DetectorModel>& dets,
                       RngStream& rng);

}  // namespace pqdsim
