#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "pqdsim/linalg.hpp"
#include "pqdsim/rng.hpp"

namespace pqdsim {

// Phase-space convention used throughout: quadratures (x, p) with vacuum
// Wigner covariance I2 and alpha = (x + i p) / 2. The vacuum Wigner function
// is then (2/pi) exp(-2|alpha|^2), and a Gaussian state with Wigner
// covariance sigma has t-ordered covariance sigma - t I.

struct Vacuum {
    bool operator==(const Vacuum&) const = default;
};

/// (1 - mu eta_B)|0><0| + mu eta_B |1><1|.
struct MixedSinglePhoton {
    double purity = 1.0;      // mu
    double mode_match = 1.0;  // eta_B
    double eta_bar() const { return purity * mode_match; }
    bool operator==(const MixedSinglePhoton&) const = default;
};

struct Coherent {
    Complex amplitude{0.0, 0.0};
    bool operator==(const Coherent&) const = default;
};

struct Thermal {
    double mean_photons = 0.0;
    bool operator==(const Thermal&) const = default;
};

/// Two-mode squeezed vacuum whose signal arm passed a beamsplitter of
/// transmissivity sqrt(transmissivity). Occupies a herald and a signal port.
struct SpdcPair {
    double squeezing = 0.0;       // r
    double transmissivity = 1.0;  // eta_BL
    bool operator==(const SpdcPair&) const = default;
};

using SourceModel = std::variant<Vacuum, MixedSinglePhoton, Coherent, Thermal, SpdcPair>;

std::size_t port_count(const SourceModel& source);
bool is_gaussian(const SourceModel& source);
std::string source_name(const SourceModel& source);

/// Throws ConfigError naming the out-of-range parameter.
void validate(const SourceModel& source);

/// A source and the ports it feeds; SpdcPair ports are {herald, signal}.
struct SourceAssignment {
    SourceModel source;
    std::vector<std::size_t> ports;
    bool operator==(const SourceAssignment&) const = default;
};

/// Product input state over `modes` ports; ports with no assignment hold vacuum.
class InputState {
public:
    InputState(std::size_t modes, std::vector<SourceAssignment> assignments);

    std::size_t modes() const noexcept { return modes_; }
    const std::vector<SourceAssignment>& assignments() const noexcept { return assignments_; }

    bool operator==(const InputState&) const = default;

private:
    std::size_t modes_;
    std::vector<SourceAssignment> assignments_;
};

/// Per-mode operator-ordering parameters (diagonal of s or t). Entries <= 1.
class OrderingVector {
public:
    OrderingVector() = default;
    explicit OrderingVector(std::vector<double> values);
    static OrderingVector constant(std::size_t modes, double value);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }
    const std::vector<double>& values() const noexcept { return values_; }
    RealVector as_vector() const;

    bool operator==(const OrderingVector&) const = default;

private:
    std::vector<double> values_;
};

/// Gaussian (t)-PQD: mean (x,p interleaved per mode) and covariance, at `ordering`.
struct GaussianPQDState {
    OrderingVector ordering;
    RealVector mean;
    RealMatrix cov;

    std::size_t modes() const { return static_cast<std::size_t>(mean.size() / 2); }
};

/// Same state at another ordering: cov + diag(old - new) on both quadratures.
GaussianPQDState with_ordering(const GaussianPQDState& state, const OrderingVector& t);

/// Wigner (t = 0) description of a fully Gaussian input; throws UnsupportedSource otherwise.
GaussianPQDState wigner_state(const InputState& input);

/// t-ordered quasiprobability of (1 - eta_bar)|0><0| + eta_bar |1><1| at alpha.
double pqd_single_photon_mixture(Complex alpha, double t, double eta_bar);

/// Largest ordering at which the source's PQD is nonnegative.
double t_bar(const SourceModel& source);

/// t_bar for every port of the input (1 on vacuum ports).
OrderingVector t_bar_vector(const InputState& input);

/// Wigner covariance of the lossy two-mode squeezed vacuum, (x_h, p_h, x_s, p_s) order.
GaussianPQDState spdc_covariance(double squeezing, double transmissivity);

/// Draws alpha from the product of per-source t-PQDs. Construction checks
/// t_k <= t_bar_k for each mode and precomputes everything the draw needs.
class InputSampler {
public:
    InputSampler(const InputState& input, const OrderingVector& t);

    void draw(RngStream& rng, Amplitudes& alpha);

private:
    struct Component {
        enum class Kind { Fixed, Isotropic, SinglePhoton, Pair } kind;
        std::size_t port = 0;
        std::size_t signal = 0;
        Complex center{0.0, 0.0};
        double sigma = 0.0;        // std dev of each of Re/Im alpha
        double photon_weight = 0;  // weight of the |alpha|^2 exp(..) term
        double gamma_scale = 0;    // scale of the Gamma(2) law of |alpha|^2
        std::size_t pair_index = 0;
    };

    std::size_t modes_;
    std::vector<Component> components_;
    std::vector<RealGaussianSampler> pair_samplers_;
    RealVector scratch_;
};

Amplitudes sample_input_pqd(const InputState& input, const OrderingVector& t, RngStream& rng);

}  // namespace pqdsim
