#include "pqdsim/states.hpp"

#include <cmath>
#include <numbers>

#include "pqdsim/errors.hpp"

namespace pqdsim {

namespace {

constexpr double kOrderingSlack = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_unit_interval(double v, const char* field) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field, "must lie in [0, 1], got " + std::to_string(v));
}

// Places a 2x2-block-per-mode Gaussian into the global state.
void embed(RealVector& mean, RealMatrix& cov, const std::vector<std::size_t>& ports,
           const RealVector& local_mean, const RealMatrix& local_cov) {
    for (std::size_t a = 0; a < ports.size(); ++a) {
        const auto ga = static_cast<Eigen::Index>(2 * ports[a]);
        mean.segment(ga, 2) = local_mean.segment(static_cast<Eigen::Index>(2 * a), 2);
        for (std::size_t b = 0; b < ports.size(); ++b) {
            const auto gb = static_cast<Eigen::Index>(2 * ports[b]);
            cov.block(ga, gb, 2, 2) =
                local_cov.block(static_cast<Eigen::Index>(2 * a), static_cast<Eigen::Index>(2 * b), 2, 2);
        }
    }
}

}  // namespace

std::size_t port_count(const SourceModel& source) {
    return std::holds_alternative<SpdcPair>(source) ? 2 : 1;
}

bool is_gaussian(const SourceModel& source) { return !std::holds_alternative<MixedSinglePhoton>(source); }

std::string source_name(const SourceModel& source) {
    return std::visit(overloaded{[](const Vacuum&) { return "vacuum"; },
                                 [](const MixedSinglePhoton&) { return "single_photon"; },
                                 [](const Coherent&) { return "coherent"; },
                                 [](const Thermal&) { return "thermal"; },
                                 [](const SpdcPair&) { return "spdc"; }},
                      source);
}

void validate(const SourceModel& source) {
    std::visit(overloaded{[](const Vacuum&) {},
                          [](const MixedSinglePhoton& s) {
                              require_unit_interval(s.purity, "mu");
                              require_unit_interval(s.mode_match, "eta_b");
                          },
                          [](const Coherent& s) {
                              if (!std::isfinite(s.amplitude.real()) || !std::isfinite(s.amplitude.imag()))
                                  throw ConfigError("amplitude", "must be finite");
                          },
                          [](const Thermal& s) {
                              if (!(s.mean_photons >= 0.0) || !std::isfinite(s.mean_photons))
                                  throw ConfigError("nbar", "must be finite and >= 0");
                          },
                          [](const SpdcPair& s) {
                              if (!(s.squeezing >= 0.0) || !std::isfinite(s.squeezing))
                                  throw ConfigError("r", "must be finite and >= 0");
                              require_unit_interval(s.transmissivity, "eta_bl");
                          }},
               source);
}

InputState::InputState(std::size_t modes, std::vector<SourceAssignment> assignments)
    : modes_(modes), assignments_(std::move(assignments)) {
    if (modes_ == 0) throw ConfigError("M", "mode count must be >= 1");
    std::vector<bool> used(modes_, false);
    for (const auto& a : assignments_) {
        validate(a.source);
        if (a.ports.size() != port_count(a.source)) {
            throw ConfigError("sources", source_name(a.source) + " needs " +
                                             std::to_string(port_count(a.source)) + " port(s)");
        }
        for (std::size_t p : a.ports) {
            if (p >= modes_) throw ConfigError("sources", "port " + std::to_string(p) + " out of range");
            if (used[p]) throw ConfigError("sources", "port " + std::to_string(p) + " assigned twice");
            used[p] = true;
        }
    }
}

OrderingVector::OrderingVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v) || v > 1.0 + kOrderingSlack) {
            throw SingularOrdering("ordering parameter " + std::to_string(v) + " exceeds 1");
        }
    }
}

OrderingVector OrderingVector::constant(std::size_t modes, double value) {
    return OrderingVector(std::vector<double>(modes, value));
}

RealVector OrderingVector::as_vector() const {
    return Eigen::Map<const RealVector>(values_.data(), static_cast<Eigen::Index>(values_.size()));
}

GaussianPQDState with_ordering(const GaussianPQDState& state, const OrderingVector& t) {
    if (t.size() != state.modes()) throw InvalidDimension("ordering length differs from mode count");
    GaussianPQDState out{t, state.mean, state.cov};
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double shift = state.ordering[k] - t[k];
        const auto i = static_cast<Eigen::Index>(2 * k);
        out.cov(i, i) += shift;
        out.cov(i + 1, i + 1) += shift;
    }
    return out;
}

GaussianPQDState wigner_state(const InputState& input) {
    const auto n = static_cast<Eigen::Index>(2 * input.modes());
    RealVector mean = RealVector::Zero(n);
    RealMatrix cov = RealMatrix::Identity(n, n);
    for (const auto& a : input.assignments()) {
        std::visit(overloaded{[](const Vacuum&) {},
                              [&](const MixedSinglePhoton&) {
                                  throw UnsupportedSource("single-photon sources have no Gaussian PQD (port " +
                                                          std::to_string(a.ports[0]) + ")");
                              },
                              [&](const Coherent& s) {
                                  RealVector m(2);
                                  m << 2.0 * s.amplitude.real(), 2.0 * s.amplitude.imag();
                                  embed(mean, cov, a.ports, m, RealMatrix::Identity(2, 2));
                              },
                              [&](const Thermal& s) {
                                  embed(mean, cov, a.ports, RealVector::Zero(2),
                                        (2.0 * s.mean_photons + 1.0) * RealMatrix::Identity(2, 2));
                              },
                              [&](const SpdcPair& s) {
                                  const auto pair = spdc_covariance(s.squeezing, s.transmissivity);
                                  embed(mean, cov, a.ports, pair.mean, pair.cov);
                              }},
                   a.source);
    }
    return {OrderingVector::constant(input.modes(), 0.0), mean, cov};
}

double pqd_single_photon_mixture(Complex alpha, double t, double eta_bar) {
    if (t >= 1.0) throw SingularOrdering("single-photon PQD is singular for t >= 1");
    const double a = 1.0 - t;
    const double r2 = std::norm(alpha);
    return (2.0 / std::numbers::pi) * (a * (a - 2.0 * eta_bar) + 4.0 * eta_bar * r2) *
           std::exp(-2.0 * r2 / a) / (a * a * a);
}

double t_bar(const SourceModel& source) {
    return std::visit(overloaded{[](const MixedSinglePhoton& s) { return 1.0 - 2.0 * s.eta_bar(); },
                                 [](const SpdcPair& s) {
                                     const double sh = std::sinh(s.squeezing);
                                     const double sh2 = sh * sh;
                                     const double e = s.transmissivity;
                                     return 1.0 + (1.0 + e) * sh2 -
                                            sh * std::sqrt((1.0 + e) * (1.0 + e) * sh2 + 4.0 * e);
                                 },
                                 [](const auto&) { return 1.0; }},
                      source);
}

OrderingVector t_bar_vector(const InputState& input) {
    std::vector<double> values(input.modes(), 1.0);
    for (const auto& a : input.assignments()) {
        const double tb = t_bar(a.source);
        for (std::size_t p : a.ports) values[p] = tb;
    }
    return OrderingVector(std::move(values));
}

GaussianPQDState spdc_covariance(double squeezing, double transmissivity) {
    const double c = std::cosh(2.0 * squeezing);
    const double off = std::sqrt(transmissivity) * std::sinh(2.0 * squeezing);
    const double signal = 1.0 + transmissivity * (c - 1.0);
    RealMatrix cov(4, 4);
    // clang-format off
    cov << c,   0.0,  off,    0.0,
           0.0, c,    0.0,   -off,
           off, 0.0,  signal, 0.0,
           0.0, -off, 0.0,    signal;
    // clang-format on
    return {OrderingVector::constant(2, 0.0), RealVector::Zero(4), cov};
}

InputSampler::InputSampler(const InputState& input, const OrderingVector& t) : modes_(input.modes()) {
    if (t.size() != modes_) throw InvalidDimension("ordering length differs from mode count");
    const OrderingVector bound = t_bar_vector(input);
    for (std::size_t k = 0; k < modes_; ++k) {
        if (t[k] > bound[k] + kOrderingSlack) {
            throw NegativeQuasiprobability(k, "input ordering t=" + std::to_string(t[k]) +
                                                  " exceeds t_bar=" + std::to_string(bound[k]));
        }
    }

    std::vector<bool> assigned(modes_, false);
    for (const auto& a : input.assignments()) {
        for (std::size_t p : a.ports) assigned[p] = true;
        const std::size_t port = a.ports[0];
        const double spread = std::max(0.0, 1.0 - t[port]);  // E|alpha|^2 = spread/2 for a vacuum-like term
        std::visit(overloaded{[&](const Vacuum&) {
                                  components_.push_back({Component::Kind::Isotropic, port, 0, {},
                                                         std::sqrt(spread / 4.0)});
                              },
                              [&](const Coherent& s) {
                                  components_.push_back({Component::Kind::Isotropic, port, 0, s.amplitude,
                                                         std::sqrt(spread / 4.0)});
                              },
                              [&](const Thermal& s) {
                                  const double var = (2.0 * s.mean_photons + spread) / 4.0;
                                  components_.push_back({Component::Kind::Isotropic, port, 0, {}, std::sqrt(var)});
                              },
                              [&](const MixedSinglePhoton& s) {
                                  // W = w0 * Gaussian(E|a|^2 = spread/2) + w1 * (|a|^2 e^{-2|a|^2/spread} term),
                                  // w1 = 2 eta_bar / spread; |alpha|^2 of the second term ~ Gamma(2, spread/2).
                                  Component c{Component::Kind::SinglePhoton, port};
                                  c.sigma = std::sqrt(spread / 4.0);
                                  c.photon_weight = spread > 0.0 ? std::min(1.0, 2.0 * s.eta_bar() / spread) : 0.0;
                                  c.gamma_scale = spread / 2.0;
                                  components_.push_back(c);
                              },
                              [&](const SpdcPair& s) {
                                  OrderingVector local({t[a.ports[0]], t[a.ports[1]]});
                                  const auto pqd = with_ordering(spdc_covariance(s.squeezing, s.transmissivity), local);
                                  Component c{Component::Kind::Pair, a.ports[0], a.ports[1]};
                                  c.pair_index = pair_samplers_.size();
                                  pair_samplers_.emplace_back(pqd.cov);
                                  components_.push_back(c);
                              }},
                   a.source);
    }
    for (std::size_t k = 0; k < modes_; ++k) {
        if (!assigned[k]) {
            components_.push_back({Component::Kind::Isotropic, k, 0, {}, std::sqrt(std::max(0.0, 1.0 - t[k]) / 4.0)});
        }
    }
    for (auto& c : components_)
        if (c.kind == Component::Kind::Isotropic && c.sigma == 0.0) c.kind = Component::Kind::Fixed;
}

void InputSampler::draw(RngStream& rng, Amplitudes& alpha) {
    alpha.resize(static_cast<Eigen::Index>(modes_));
    for (const auto& c : components_) {
        const auto p = static_cast<Eigen::Index>(c.port);
        switch (c.kind) {
            case Component::Kind::Fixed:
                alpha(p) = c.center;
                break;
            case Component::Kind::Isotropic: {
                const double re = rng.normal();
                const double im = rng.normal();
                alpha(p) = c.center + c.sigma * Complex(re, im);
                break;
            }
            case Component::Kind::SinglePhoton: {
                if (rng.uniform() < c.photon_weight) {
                    const double u1 = 1.0 - rng.uniform();
                    const double u2 = 1.0 - rng.uniform();
                    const double radius = std::sqrt(-c.gamma_scale * std::log(u1 * u2));
                    const double phase = 2.0 * std::numbers::pi * rng.uniform();
                    alpha(p) = std::polar(radius, phase);
                } else {
                    const double re = rng.normal();
                    const double im = rng.normal();
                    alpha(p) = c.sigma * Complex(re, im);
                }
                break;
            }
            case Component::Kind::Pair: {
                pair_samplers_[c.pair_index].draw(rng, scratch_);
                alpha(p) = 0.5 * Complex(scratch_(0), scratch_(1));
                alpha(static_cast<Eigen::Index>(c.signal)) = 0.5 * Complex(scratch_(2), scratch_(3));
                break;
            }
        }
    }
}

Amplitudes sample_input_pqd(const InputState& input, const OrderingVector& t, RngStream& rng) {
    InputSampler sampler(input, t);
    Amplitudes alpha;
    sampler.draw(rng, alpha);
    return alpha;
}

}  // namespace pqdsim
