#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pqdsim/detectors.hpp"
#include "pqdsim/experiment.hpp"
#include "pqdsim/rng.hpp"

namespace pqdsim {

/// Outcomes of one sampling run, stored sample-major (modes bytes per sample).
struct SampleBatch {
    std::size_t modes = 0;
    std::vector<std::uint8_t> bits;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::string config_hash;
    int condition = 2;
    /// Histogram keyed by bitstring; left empty above 24 modes.
    std::map<std::string, std::uint64_t> counts;

    std::size_t size() const { return modes ? bits.size() / modes : 0; }
    Outcome outcome(std::size_t i) const;
    std::string outcome_string(std::size_t i) const;
};

struct SamplerOptions {
    unsigned workers = 1;
    std::size_t batch_size = 4096;  // samples per derived RNG substream
    bool histogram = true;
};

inline constexpr std::size_t kMaxHistogramModes = 24;

/// Input PQD -> transition function -> measurement PQD, at (s_bar, t_bar).
/// Throws NotSimulatable when Sigma-bar is not PSD.
SampleBatch run_condition2(const ExperimentConfig& config, std::size_t n_samples, const RngStream& rng,
                           const SamplerOptions& options = {});

/// Output Gaussian (s_bar)-PQD -> measurement PQD. Gaussian sources only
/// (UnsupportedSource otherwise); NotSimulatable if the output covariance at s_bar is not PSD.
SampleBatch run_condition1(const ExperimentConfig& config, std::size_t n_samples, const RngStream& rng,
                           const SamplerOptions& options = {});

/// Condition 1 for all-Gaussian SPDC configs, condition 2 otherwise, unless `condition` forces one.
SampleBatch run_sampler(const ExperimentConfig& config, std::size_t n_samples, const RngStream& rng,
                        const SamplerOptions& options = {}, std::optional<int> condition = std::nullopt);

struct EmpiricalStats {
    std::vector<double> click_rate;
    double mean_clicks = 0.0;
    std::map<std::string, std::uint64_t> histogram;
};

EmpiricalStats empirical_stats(const SampleBatch& batch);

enum class SampleFormat { Csv, Jsonl };

/// CSV rows are bitstrings; JSONL rows are {"n":"0101"}.
void write_samples(const SampleBatch& batch, std::ostream& out, SampleFormat format);

}  // namespace pqdsim
