#pragma once

#include <cstdint>
#include <random>

namespace pqdsim {

/// Reproducible random stream identified by (seed, stream id).
///
/// Two streams built from the same pair produce the same draw sequence.
/// substream() derives child streams deterministically, so work split into
/// indexed batches draws the same numbers no matter how many threads run it.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Child stream for batch/task `index`; does not advance this stream.
    RngStream substream(std::uint64_t index) const;

    /// Uniform on [0, 1).
    double uniform() { return uniform_(engine_); }

    /// Standard normal.
    double normal() { return normal_(engine_); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pqdsim
