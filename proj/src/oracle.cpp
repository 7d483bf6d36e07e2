#include "pqdsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "pqdsim/errors.hpp"

namespace pqdsim {

namespace {

// One pure component of the input mixture, sparse in the Fock basis.
struct PureComponent {
    double weight = 1.0;
    std::map<Occupation, Complex> amplitudes;
};

constexpr double kMaxSectorSize = 4e6;

using LocalTerms = std::vector<std::pair<Occupation, Complex>>;

double factorial(int n) { return std::tgamma(n + 1.0); }

double coherent_tail(double mean, int n_max) {
    double term = std::exp(-mean);
    double kept = term;
    for (int n = 1; n <= n_max; ++n) {
        term *= mean / n;
        kept += term;
    }
    return std::max(0.0, 1.0 - kept);
}

double source_tail(const SourceModel& source, int n_max) {
    if (const auto* c = std::get_if<Coherent>(&source)) return coherent_tail(std::norm(c->amplitude), n_max);
    if (const auto* t = std::get_if<Thermal>(&source)) {
        const double q = t->mean_photons / (1.0 + t->mean_photons);
        return std::pow(q, n_max + 1);
    }
    if (const auto* p = std::get_if<SpdcPair>(&source)) return std::pow(std::tanh(p->squeezing), 2 * (n_max + 1));
    return 0.0;
}

void tensor(std::vector<PureComponent>& components, const LocalTerms& terms) {
    for (auto& c : components) {
        std::map<Occupation, Complex> next;
        for (const auto& [occ, amp] : c.amplitudes) {
            for (const auto& [local, coeff] : terms) {
                Occupation n = occ;
                for (std::size_t k = 0; k < n.size(); ++k) n[k] += local[k];
                next[n] += amp * coeff;
            }
        }
        c.amplitudes = std::move(next);
    }
}

Occupation single(std::size_t modes, std::size_t port, int count) {
    Occupation n(modes, 0);
    n[port] = count;
    return n;
}

// Truncated input mixture; `attenuation` collects intensity losses folded into L.
std::vector<PureComponent> build_input(const InputState& input, int n_max, std::vector<double>& attenuation) {
    const std::size_t m = input.modes();
    attenuation.assign(m, 1.0);
    std::vector<PureComponent> components(1);
    components[0].amplitudes[Occupation(m, 0)] = 1.0;

    for (const auto& a : input.assignments()) {
        if (const auto* p = std::get_if<MixedSinglePhoton>(&a.source)) {
            attenuation[a.ports[0]] *= p->eta_bar();
            tensor(components, {{single(m, a.ports[0], 1), 1.0}});
        } else if (const auto* c = std::get_if<Coherent>(&a.source)) {
            LocalTerms terms;
            Complex amp = std::exp(-0.5 * std::norm(c->amplitude));
            for (int n = 0; n <= n_max; ++n) {
                if (n > 0) amp *= c->amplitude / std::sqrt(static_cast<double>(n));
                terms.emplace_back(single(m, a.ports[0], n), amp);
            }
            tensor(components, terms);
        } else if (const auto* t = std::get_if<Thermal>(&a.source)) {
            const double q = t->mean_photons / (1.0 + t->mean_photons);
            std::vector<PureComponent> mixed;
            for (int n = 0; n <= n_max; ++n) {
                const double w = (1.0 - q) * std::pow(q, n);
                for (auto c2 : components) {
                    c2.weight *= w;
                    std::map<Occupation, Complex> shifted;
                    for (const auto& [occ, amp] : c2.amplitudes) {
                        Occupation k = occ;
                        k[a.ports[0]] += n;
                        shifted[k] += amp;
                    }
                    c2.amplitudes = std::move(shifted);
                    mixed.push_back(std::move(c2));
                }
            }
            components = std::move(mixed);
        } else if (const auto* s = std::get_if<SpdcPair>(&a.source)) {
            attenuation[a.ports[1]] *= s->transmissivity;
            const double th = std::tanh(s->squeezing);
            LocalTerms terms;
            for (int n = 0; n <= n_max; ++n) {
                Occupation k(m, 0);
                k[a.ports[0]] = n;
                k[a.ports[1]] = n;
                terms.emplace_back(std::move(k), std::pow(th, n) / std::cosh(s->squeezing));
            }
            tensor(components, terms);
        }
    }
    return components;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double norm_factor(const Occupation& n) {
    double f = 1.0;
    for (int c : n) f *= factorial(c);
    return f;
}

// Occupations of a fixed photon number in lexicographic order, with the
// index reached by adding one photon to each mode.
class SectorIndex {
public:
    explicit SectorIndex(std::size_t dims) : dims_(dims) {}

    std::size_t size(int total) { return states(total).size(); }

    const std::vector<Occupation>& states(int total) {
        auto it = states_.find(total);
        if (it == states_.end()) it = states_.emplace(total, occupations_with_total(dims_, total)).first;
        return it->second;
    }

    const std::vector<std::uint32_t>& successors(int total) {
        auto it = succ_.find(total);
        if (it != succ_.end()) return it->second;
        const auto& from = states(total);
        std::vector<std::uint32_t> out(from.size() * dims_);
        for (std::size_t i = 0; i < from.size(); ++i) {
            for (std::size_t k = 0; k < dims_; ++k) {
                Occupation n = from[i];
                ++n[k];
                out[i * dims_ + k] = static_cast<std::uint32_t>(rank(n, total + 1));
            }
        }
        return succ_.emplace(total, std::move(out)).first->second;
    }

private:
    // Sectors of `modes` modes holding `total` photons.
    static std::size_t count(std::size_t modes, int total) {
        return static_cast<std::size_t>(std::llround(binomial(static_cast<int>(modes) + total - 1, total)));
    }

    std::size_t rank(const Occupation& n, int total) const {
        std::size_t r = 0;
        int left = total;
        for (std::size_t k = 0; k + 1 < dims_; ++k) {
            for (int c = 0; c < n[k]; ++c) r += count(dims_ - k - 1, left - c);
            left -= n[k];
        }
        return r;
    }

    std::size_t dims_;
    std::map<int, std::vector<Occupation>> states_;
    std::map<int, std::vector<std::uint32_t>> succ_;
};

std::size_t outcome_index(const std::string& s) {
    std::size_t i = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw MismatchedOutcomeSpace("outcome \"" + s + "\" is not a bitstring");
        i = (i << 1) | static_cast<std::size_t>(c == '1');
    }
    return i;
}

}  // namespace

std::vector<Occupation> occupations_with_total(std::size_t modes, int total) {
    std::vector<Occupation> out;
    if (modes == 0) {
        if (total == 0) out.emplace_back();
        return out;
    }
    Occupation n(modes, 0);
    // Depth-first over modes, smallest count first, which yields lexicographic order.
    auto rec = [&](auto&& self, std::size_t k, int left) -> void {
        if (k + 1 == modes) {
            n[k] = left;
            out.push_back(n);
            return;
        }
        for (int c = 0; c <= left; ++c) {
            n[k] = c;
            self(self, k + 1, left - c);
        }
    };
    rec(rec, 0, total);
    return out;
}

FockBasis::FockBasis(std::size_t modes, int max_total) : modes_(modes), max_total_(max_total) {
    if (max_total < 0) throw InvalidDimension("Fock basis needs max_total >= 0");
    for (int total = 0; total <= max_total; ++total) {
        auto sector = occupations_with_total(modes, total);
        states_.insert(states_.end(), sector.begin(), sector.end());
    }
    std::sort(states_.begin(), states_.end());
}

std::size_t FockBasis::index_of(const Occupation& n) const {
    const auto it = std::lower_bound(states_.begin(), states_.end(), n);
    if (it == states_.end() || *it != n) throw InvalidDimension("occupation not in the truncated basis");
    return static_cast<std::size_t>(it - states_.begin());
}

ProbabilityTable::ProbabilityTable(std::size_t modes, std::vector<double> probs)
    : modes_(modes), probs_(std::move(probs)) {
    if (modes > 30) throw InvalidDimension("probability table limited to 30 modes");
    if (probs_.size() != (std::size_t{1} << modes)) {
        throw InvalidDimension("probability table needs 2^M entries");
    }
    for (auto& p : probs_) {
        if (p < -1e-12 || !std::isfinite(p)) throw Error("probability table entry is negative or not finite");
        p = std::max(p, 0.0);
    }
}

double ProbabilityTable::probability(const std::string& outcome) const {
    if (outcome.size() != modes_) throw MismatchedOutcomeSpace("outcome length differs from mode count");
    return probs_[outcome_index(outcome)];
}

std::string ProbabilityTable::outcome(std::size_t i) const {
    std::string s(modes_, '0');
    for (std::size_t k = 0; k < modes_; ++k)
        if ((i >> (modes_ - 1 - k)) & 1u) s[k] = '1';
    return s;
}

std::vector<std::string> ProbabilityTable::outcomes() const {
    std::vector<std::string> out;
    out.reserve(probs_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i) out.push_back(outcome(i));
    return out;
}

double ProbabilityTable::total() const {
    double t = 0.0;
    for (double p : probs_) t += p;
    return t;
}

double truncation_error(const InputState& input, int n_max) {
    double kept = 1.0;
    for (const auto& a : input.assignments()) kept *= 1.0 - source_tail(a.source, n_max);
    return 1.0 - kept;
}

int suggested_n_max(const InputState& input) {
    int n = 1;
    while (n <= kOracleMaxNmax && truncation_error(input, n) > kTruncationTolerance) ++n;
    return n;
}

ProbabilityTable exact_distribution(const ExperimentConfig& config, int n_max) {
    const std::size_t m = config.modes();
    if (n_max < 0 || n_max > kOracleMaxNmax) {
        throw OracleLimit("oracle n_max must lie in [0, " + std::to_string(kOracleMaxNmax) + "]");
    }
    if (m > kOracleMaxDilatedModes) {
        throw OracleLimit("oracle limited to " + std::to_string(kOracleMaxDilatedModes) +
                          " dilated modes; config has " + std::to_string(m) + " modes");
    }
    const double error = truncation_error(config.input, n_max);
    if (error > kTruncationTolerance) {
        int suggested = n_max;
        while (suggested < 1024 && truncation_error(config.input, suggested) > kTruncationTolerance) ++suggested;
        throw TruncationError(error, suggested,
                              "input truncation drops " + std::to_string(error) + " of the probability mass; use n_max >= " +
                                  std::to_string(suggested));
    }

    std::vector<double> attenuation;
    const auto components = build_input(config.input, n_max, attenuation);
    Eigen::VectorXd rows(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) rows(static_cast<Eigen::Index>(k)) = std::sqrt(attenuation[k]);
    const ComplexMatrix l = rows.cast<Complex>().asDiagonal() * config.transfer.matrix();

    const auto mi = static_cast<Eigen::Index>(m);
    const bool lossless = (l.adjoint() * l - ComplexMatrix::Identity(mi, mi)).norm() < 1e-12;
    const ComplexMatrix u = lossless ? l : dilate_to_unitary(TransferMatrix(l));
    const auto dims = static_cast<std::size_t>(u.rows());
    if (dims > kOracleMaxDilatedModes) {
        throw OracleLimit("lossy network on " + std::to_string(m) + " modes dilates to " + std::to_string(dims) +
                          " modes; oracle limit is " + std::to_string(kOracleMaxDilatedModes));
    }

    // Group inputs by photon number and estimate the expansion work up front.
    std::vector<std::map<int, std::vector<std::pair<Occupation, Complex>>>> sectors(components.size());
    double work = 0.0;
    int max_total = 0;
    for (std::size_t c = 0; c < components.size(); ++c) {
        for (const auto& [occ, amp] : components[c].amplitudes) {
            if (amp == Complex(0.0, 0.0)) continue;
            int total = 0;
            for (int x : occ) total += x;
            sectors[c][total].emplace_back(occ, amp);
            max_total = std::max(max_total, total);
            for (int i = 0; i < total; ++i) work += binomial(static_cast<int>(dims) + i - 1, i) * static_cast<double>(dims);
        }
    }
    if (work > kOracleMaxWork || binomial(static_cast<int>(dims) + max_total - 1, max_total) > kMaxSectorSize) {
        throw OracleLimit("oracle work estimate " + std::to_string(work) + " exceeds limit " +
                          std::to_string(kOracleMaxWork) + "; reduce n_max or the photon number");
    }

    // Each input Fock state is prod_j (sum_k U_jk a_k^+)^{n_j} / sqrt(n_j!) |0>;
    // expand the polynomial one creation operator at a time.
    SectorIndex index(dims);
    std::map<Occupation, double> measured;
    for (std::size_t c = 0; c < components.size(); ++c) {
        for (const auto& [total, inputs] : sectors[c]) {
            std::vector<Complex> acc(index.size(total), Complex(0.0, 0.0));
            for (const auto& [occ, amp] : inputs) {
                std::vector<Complex> poly{Complex(1.0, 0.0)};
                int degree = 0;
                for (std::size_t j = 0; j < occ.size(); ++j) {
                    for (int rep = 0; rep < occ[j]; ++rep) {
                        const auto& succ = index.successors(degree);
                        std::vector<Complex> next(index.size(degree + 1), Complex(0.0, 0.0));
                        for (std::size_t i = 0; i < poly.size(); ++i) {
                            if (poly[i] == Complex(0.0, 0.0)) continue;
                            for (std::size_t k = 0; k < dims; ++k)
                                next[succ[i * dims + k]] += poly[i] * u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
                        }
                        poly = std::move(next);
                        ++degree;
                    }
                }
                const Complex scale = amp / std::sqrt(norm_factor(occ));
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * poly[i];
            }
            const auto& outputs = index.states(total);
            for (std::size_t i = 0; i < acc.size(); ++i) {
                const double p = components[c].weight * std::norm(acc[i]) * norm_factor(outputs[i]);
                if (p == 0.0) continue;
                measured[Occupation(outputs[i].begin(), outputs[i].begin() + static_cast<std::ptrdiff_t>(m))] += p;
            }
        }
    }

    // Diagonal on-off POVM: P(off | m photons) = (1 - p_D)(1 - eta_D)^m.
    std::vector<double> probs(std::size_t{1} << m, 0.0);
    std::vector<double> off(m);
    double mass = 0.0;
    for (const auto& [occ, p] : measured) {
        mass += p;
        for (std::size_t k = 0; k < m; ++k) {
            const auto& d = config.detectors[k];
            off[k] = (1.0 - d.random_count) * std::pow(1.0 - d.efficiency, occ[k]);
        }
        for (std::size_t i = 0; i < probs.size(); ++i) {
            double q = p;
            for (std::size_t k = 0; k < m; ++k) q *= ((i >> (m - 1 - k)) & 1u) ? 1.0 - off[k] : off[k];
            probs[i] += q;
        }
    }
    if (mass > 0.0)
        for (auto& p : probs) p /= mass;
    return ProbabilityTable(m, std::move(probs));
}

double ideal_probability_permanent(const ComplexMatrix& u, const std::vector<std::size_t>& inputs,
                                   const std::vector<std::size_t>& outputs) {
    if (inputs.size() != outputs.size()) throw InvalidDimension("input and output port sets differ in size");
    const auto n = static_cast<Eigen::Index>(inputs.size());
    ComplexMatrix sub(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const auto r = static_cast<Eigen::Index>(inputs[a]);
            const auto c = static_cast<Eigen::Index>(outputs[b]);
            if (r >= u.rows() || c >= u.cols()) throw InvalidDimension("port index outside the matrix");
            sub(a, b) = u(r, c);
        }
    }
    return std::norm(permanent(sub));
}

double tv_distance(const ProbabilityTable& p, const ProbabilityTable& q) {
    if (p.modes() != q.modes()) throw MismatchedOutcomeSpace("tables cover different mode counts");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return 0.5 * d;
}

double tv_distance(const ProbabilityTable& p, const SampleBatch& batch) {
    if (p.modes() != batch.modes) throw MismatchedOutcomeSpace("batch and table cover different mode counts");
    const std::size_t n = batch.size();
    if (n == 0) throw EmptyBatch("distance to an empty batch");
    std::vector<double> freq(p.size(), 0.0);
    if (!batch.counts.empty()) {
        for (const auto& [s, count] : batch.counts) freq[outcome_index(s)] += static_cast<double>(count);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t idx = 0;
            for (std::size_t k = 0; k < batch.modes; ++k) idx = (idx << 1) | batch.bits[i * batch.modes + k];
            freq[idx] += 1.0;
        }
    }
    for (auto& f : freq) f /= static_cast<double>(n);
    return tv_distance(p, ProbabilityTable(p.modes(), std::move(freq)));
}

ProbabilityTable marginalize(const ProbabilityTable& table, const std::vector<std::size_t>& keep) {
    const std::size_t m = table.modes();
    for (auto k : keep)
        if (k >= m) throw InvalidDimension("marginal mode index out of range");
    const std::size_t r = keep.size();
    std::vector<double> probs(std::size_t{1} << r, 0.0);
    for (std::size_t i = 0; i < table.size(); ++i) {
        std::size_t j = 0;
        for (auto k : keep) j = (j << 1) | ((i >> (m - 1 - k)) & 1u);
        probs[j] += table[i];
    }
    return ProbabilityTable(r, std::move(probs));
}

nlohmann::json table_to_json(const ProbabilityTable& table) {
    nlohmann::json probs = nlohmann::json::object();
    for (std::size_t i = 0; i < table.size(); ++i) probs[table.outcome(i)] = table[i];
    return {{"modes", table.modes()}, {"probabilities", probs}, {"total", table.total()}};
}

}  // namespace pqdsim
