#include "pqdsim/sampler.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "pqdsim/config.hpp"
#include "pqdsim/simulability.hpp"

namespace pqdsim {

namespace {

struct Condition2Engine {
    InputSampler input;
    TransitionSampler transition;
    OutcomeSampler outcome;
    Amplitudes alpha;
    Amplitudes beta;

    void draw(RngStream& rng, std::uint8_t* out) {
        input.draw(rng, alpha);
        transition.sample(alpha, rng, beta);
        outcome.draw(beta, rng, out);
    }
};

struct Condition1Engine {
    RealGaussianSampler gaussian;
    RealVector mean;
    OutcomeSampler outcome;
    RealVector x;
    Amplitudes beta;

    void draw(RngStream& rng, std::uint8_t* out) {
        gaussian.draw(rng, x);
        x += mean;
        const auto m = mean.size() / 2;
        beta.resize(m);
        for (Eigen::Index k = 0; k < m; ++k) beta(k) = 0.5 * Complex(x(2 * k), x(2 * k + 1));
        outcome.draw(beta, rng, out);
    }
};

void fill_histogram(SampleBatch& batch) {
    if (batch.modes > kMaxHistogramModes) return;
    std::unordered_map<std::uint32_t, std::uint64_t> packed;
    const std::size_t n = batch.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t key = 0;
        const std::uint8_t* row = batch.bits.data() + i * batch.modes;
        for (std::size_t k = 0; k < batch.modes; ++k) key = (key << 1) | row[k];
        ++packed[key];
    }
    for (const auto& [key, count] : packed) {
        std::string s(batch.modes, '0');
        for (std::size_t k = 0; k < batch.modes; ++k)
            if ((key >> (batch.modes - 1 - k)) & 1u) s[k] = '1';
        batch.counts.emplace(std::move(s), count);
    }
}

// Batch b always draws from rng.substream(b) into its own slice, so the
// result does not depend on how batches are spread over workers.
template <class Engine>
SampleBatch run_batches(const Engine& prototype, const ExperimentConfig& config, std::size_t n_samples,
                        const RngStream& rng, const SamplerOptions& options, int condition) {
    SampleBatch batch;
    batch.modes = config.modes();
    batch.bits.assign(n_samples * batch.modes, 0);
    batch.seed = rng.seed();
    batch.stream_id = rng.stream_id();
    batch.config_hash = config_hash(config);
    batch.condition = condition;

    const std::size_t per_batch = std::max<std::size_t>(1, options.batch_size);
    const std::size_t n_batches = (n_samples + per_batch - 1) / per_batch;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        try {
            Engine engine = prototype;
            for (std::size_t b = next++; b < n_batches; b = next++) {
                RngStream stream = rng.substream(b);
                const std::size_t begin = b * per_batch;
                const std::size_t end = std::min(n_samples, begin + per_batch);
                for (std::size_t i = begin; i < end; ++i) engine.draw(stream, batch.bits.data() + i * batch.modes);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(std::max<std::size_t>(1, n_batches))));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    if (options.histogram) fill_histogram(batch);
    return batch;
}

}  // namespace

Outcome SampleBatch::outcome(std::size_t i) const {
    const auto first = bits.begin() + static_cast<std::ptrdiff_t>(i * modes);
    return Outcome{{first, first + static_cast<std::ptrdiff_t>(modes)}};
}

std::string SampleBatch::outcome_string(std::size_t i) const {
    std::string s(modes, '0');
    for (std::size_t k = 0; k < modes; ++k)
        if (bits[i * modes + k]) s[k] = '1';
    return s;
}

SampleBatch run_condition2(const ExperimentConfig& config, std::size_t n_samples, const RngStream& rng,
                           const SamplerOptions& options) {
    SimulabilityReport report = check_second_condition(config);
    if (!report.simulatable) {
        throw NotSimulatable(std::move(report), "Sigma-bar is not positive semidefinite; refusing to sample");
    }
    const auto& [s, t] = *report.ordering;
    const ExperimentConfig effective = report.loss_referred ? *refer_input_loss(config) : config;
    const Condition2Engine prototype{InputSampler(effective.input, t), TransitionSampler(effective.transfer, s, t),
                                     OutcomeSampler(config.detectors, s), {}, {}};
    return run_batches(prototype, config, n_samples, rng, options, 2);
}

SampleBatch run_condition1(const ExperimentConfig& config, std::size_t n_samples, const RngStream& rng,
                           const SamplerOptions& options) {
    if (!all_gaussian(config.input)) {
        throw UnsupportedSource("the output-state route needs Gaussian sources only");
    }
    const OrderingVector s = detector_orderings(config.detectors);
    const auto out = with_ordering(propagate_gaussian(wigner_state(config.input), config.transfer), s);
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(out.cov, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kPsdTol) {
        throw NotSimulatable(check_second_condition(config),
                             "output covariance at s_bar is not positive semidefinite; refusing to sample");
    }
    const Condition1Engine prototype{RealGaussianSampler(out.cov), out.mean, OutcomeSampler(config.detectors, s),
                                     {}, {}};
    return run_batches(prototype, config, n_samples, rng, options, 1);
}

SampleBatch run_sampler(const ExperimentConfig& config, std::size_t n_samples, const RngStream& rng,
                        const SamplerOptions& options, std::optional<int> condition) {
    const int chosen =
        condition.value_or(config.scheme == Scheme::Spdc && all_gaussian(config.input) ? 1 : 2);
    if (chosen == 1) return run_condition1(config, n_samples, rng, options);
    if (chosen == 2) return run_condition2(config, n_samples, rng, options);
    throw ConfigError("condition", "must be 1 or 2");
}

EmpiricalStats empirical_stats(const SampleBatch& batch) {
    const std::size_t n = batch.size();
    if (n == 0) throw EmptyBatch("empirical statistics of an empty batch");
    EmpiricalStats stats;
    std::vector<std::uint64_t> clicks(batch.modes, 0);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < batch.modes; ++k) {
            const std::uint8_t b = batch.bits[i * batch.modes + k];
            clicks[k] += b;
            total += b;
        }
    }
    stats.click_rate.reserve(batch.modes);
    for (auto c : clicks) stats.click_rate.push_back(static_cast<double>(c) / static_cast<double>(n));
    stats.mean_clicks = static_cast<double>(total) / static_cast<double>(n);
    if (!batch.counts.empty() || batch.modes > kMaxHistogramModes) {
        stats.histogram = batch.counts;
    } else {
        for (std::size_t i = 0; i < n; ++i) ++stats.histogram[batch.outcome_string(i)];
    }
    return stats;
}

void write_samples(const SampleBatch& batch, std::ostream& out, SampleFormat format) {
    const std::size_t n = batch.size();
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        line = batch.outcome_string(i);
        if (format == SampleFormat::Csv) {
            out << line << '\n';
        } else {
            out << "{\"n\":\"" << line << "\"}\n";
        }
    }
}

}  // namespace pqdsim
