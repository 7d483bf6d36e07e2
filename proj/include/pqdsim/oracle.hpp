#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqdsim/experiment.hpp"
#include "pqdsim/linalg.hpp"
#include "pqdsim/sampler.hpp"

namespace pqdsim {

using Occupation = std::vector<int>;

/// Occupation vectors of `modes` modes with total photon number <= max_total,
/// in lexicographic order.
class FockBasis {
public:
    FockBasis(std::size_t modes, int max_total);
    std::size_t modes() const noexcept { return modes_; }
    int max_total() const noexcept { return max_total_; }
    std::size_t dimension() const noexcept { return states_.size(); }
    const std::vector<Occupation>& states() const noexcept { return states_; }
    const Occupation& operator[](std::size_t i) const { return states_[i]; }
    /// Position of `n` in states(); throws InvalidDimension if absent.
    std::size_t index_of(const Occupation& n) const;

private:
    std::size_t modes_;
    int max_total_;
    std::vector<Occupation> states_;
};

/// Occupations of `modes` modes with exactly `total` photons, lexicographic.
std::vector<Occupation> occupations_with_total(std::size_t modes, int total);

/// Click-pattern distribution over all 2^M outcomes. Index i encodes the
/// outcome with mode 0 as the most significant bit.
class ProbabilityTable {
public:
    ProbabilityTable(std::size_t modes, std::vector<double> probs);
    std::size_t modes() const noexcept { return modes_; }
    std::size_t size() const noexcept { return probs_.size(); }
    const std::vector<double>& probs() const noexcept { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }
    double probability(const std::string& outcome) const;
    std::string outcome(std::size_t i) const;
    std::vector<std::string> outcomes() const;
    double total() const;

private:
    std::size_t modes_;
    std::vector<double> probs_;
};

inline constexpr std::size_t kOracleMaxDilatedModes = 12;
inline constexpr int kOracleMaxNmax = 12;
inline constexpr double kOracleMaxWork = 2e9;
inline constexpr double kTruncationTolerance = 1e-6;

/// Exact on-off click distribution by truncated Fock-space propagation.
/// Input loss (eta_B, eta_BL) is folded into the transfer matrix; a lossy
/// network is dilated to a unitary on 2M modes and the environment traced.
/// Throws OracleLimit beyond the size limits and TruncationError when the
/// dropped input mass exceeds 1e-6.
ProbabilityTable exact_distribution(const ExperimentConfig& config, int n_max = 4);

/// Input probability mass dropped by truncating every source at n_max.
double truncation_error(const InputState& input, int n_max);

/// Smallest n_max whose truncation error is within kTruncationTolerance
/// (capped at kOracleMaxNmax + 1, which the oracle then refuses).
int suggested_n_max(const InputState& input);

/// |perm(U[S, T])|^2 for collision-free input ports S and output ports T.
double ideal_probability_permanent(const ComplexMatrix& u, const std::vector<std::size_t>& inputs,
                                   const std::vector<std::size_t>& outputs);

/// Half the L1 distance. Throws MismatchedOutcomeSpace when the mode counts differ.
double tv_distance(const ProbabilityTable& p, const ProbabilityTable& q);
double tv_distance(const ProbabilityTable& p, const SampleBatch& batch);

/// Distribution of the listed modes only (in the order given).
ProbabilityTable marginalize(const ProbabilityTable& table, const std::vector<std::size_t>& keep);

nlohmann::json table_to_json(const ProbabilityTable& table);

}  // namespace pqdsim
