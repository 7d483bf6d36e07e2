#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "pqdsim/rng.hpp"

namespace pqdsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Complex amplitudes of all modes, as a row vector. A linear-optical
/// network acts from the right: beta = alpha * L.
using Amplitudes = Eigen::RowVectorXcd;

inline constexpr double kContractionTol = 1e-9;
inline constexpr double kPsdTol = 1e-10;

/// Square transfer matrix of a (possibly lossy) linear-optical network.
/// Construction enforces finite entries and largest singular value <= 1 + tol.
class TransferMatrix {
public:
    explicit TransferMatrix(ComplexMatrix matrix, double tol = kContractionTol);

    static TransferMatrix identity(std::size_t modes);

    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    std::size_t modes() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

    bool operator==(const TransferMatrix& other) const { return matrix_ == other.matrix_; }

private:
    ComplexMatrix matrix_;
};

/// Largest singular value.
double spectral_norm(const ComplexMatrix& m);

/// Haar-random m x m unitary (QR of a complex Ginibre matrix, R-diagonal phases removed).
ComplexMatrix haar_unitary(std::size_t m, RngStream& rng);

/// 2M x 2M unitary whose top-left block is L:
///   [ L            (I - L L^+)^1/2 ]
///   [ (I-L^+L)^1/2      -L^+      ]
/// with both square roots taken through the SVD of L.
ComplexMatrix dilate_to_unitary(const TransferMatrix& transfer);

/// Permanent by Ryser's formula in Gray-code order, O(2^n n). Requires n <= 30.
Complex permanent(const ComplexMatrix& a);

/// Draws from a real Gaussian with fixed covariance. Eigenvalues in
/// [-kPsdTol, kPsdTol] are treated as exactly zero; the corresponding
/// directions are deterministic. Holds scratch space: give each thread its own copy.
class RealGaussianSampler {
public:
    explicit RealGaussianSampler(const RealMatrix& cov);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(factor_.rows()); }

    /// Writes a zero-mean draw into `out` (resized if needed).
    void draw(RngStream& rng, RealVector& out);

private:
    RealMatrix factor_;  // dimension x rank
    RealVector scratch_;
};

/// Circularly-symmetric complex Gaussian for row vectors z, with
/// E[(z - mean)^+ (z - mean)] = cov. Same singular-direction rule as above.
class ComplexGaussianSampler {
public:
    explicit ComplexGaussianSampler(const ComplexMatrix& cov);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(factor_.rows()); }
    std::size_t rank() const noexcept { return static_cast<std::size_t>(factor_.cols()); }

    /// Adds a zero-mean draw to `z`.
    void add_draw(RngStream& rng, Amplitudes& z);

private:
    ComplexMatrix factor_;  // conj(V sqrt(D)), dimension x rank
    Eigen::VectorXcd scratch_;
};

Amplitudes sample_complex_gaussian(const Amplitudes& mean, const ComplexMatrix& cov, RngStream& rng);

}  // namespace pqdsim
