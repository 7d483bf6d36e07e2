#include "pqdsim/linalg.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "pqdsim/errors.hpp"

namespace pqdsim {

namespace {

constexpr double kHermitianTol = 1e-10;

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

void check_psd_spectrum(const RealVector& eigenvalues) {
    const double lo = eigenvalues.size() ? eigenvalues.minCoeff() : 0.0;
    if (lo < -kPsdTol) {
        throw NotPositiveSemidefinite("covariance has eigenvalue " + std::to_string(lo) +
                                      " below -1e-10");
    }
}

}  // namespace

TransferMatrix::TransferMatrix(ComplexMatrix matrix, double tol) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw InvalidDimension("transfer matrix must be square and non-empty, got " +
                               std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()));
    }
    if (!all_finite(matrix_)) throw InvalidDimension("transfer matrix has non-finite entries");
    const double norm = spectral_norm(matrix_);
    if (norm > 1.0 + tol) {
        throw NotAContraction("transfer matrix singular value " + std::to_string(norm) + " exceeds 1");
    }
}

TransferMatrix TransferMatrix::identity(std::size_t modes) {
    return TransferMatrix(ComplexMatrix::Identity(static_cast<Eigen::Index>(modes),
                                                  static_cast<Eigen::Index>(modes)));
}

double spectral_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

ComplexMatrix haar_unitary(std::size_t m, RngStream& rng) {
    if (m == 0) throw InvalidDimension("haar_unitary: dimension must be >= 1");
    const auto n = static_cast<Eigen::Index>(m);
    const double scale = 1.0 / std::sqrt(2.0);
    ComplexMatrix z(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(rng.normal(), rng.normal()) * scale;

    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        const double a = std::abs(d);
        q.col(j) *= (a > 0.0) ? d / a : Complex(1.0);
    }
    return q;
}

ComplexMatrix dilate_to_unitary(const TransferMatrix& transfer) {
    const ComplexMatrix& l = transfer.matrix();
    const Eigen::Index n = l.rows();
    Eigen::JacobiSVD<ComplexMatrix> svd(l, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();
    RealVector sine(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double c = std::min(sv(i), 1.0);
        sine(i) = std::sqrt(std::max(0.0, 1.0 - c * c));
    }
    const ComplexMatrix& left = svd.matrixU();
    const ComplexMatrix& right = svd.matrixV();

    ComplexMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = l;
    out.topRightCorner(n, n) = left * sine.asDiagonal() * left.adjoint();
    out.bottomLeftCorner(n, n) = right * sine.asDiagonal() * right.adjoint();
    out.bottomRightCorner(n, n) = -l.adjoint();
    return out;
}

Complex permanent(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) {
        throw InvalidDimension("permanent of non-square " + std::to_string(a.rows()) + "x" +
                               std::to_string(a.cols()) + " matrix");
    }
    const int n = static_cast<int>(a.rows());
    if (n > 30) throw InvalidDimension("permanent: n > 30 not supported");
    if (n == 0) return Complex(1.0);

    // perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij,
    // visiting subsets in Gray-code order so each step adds or removes one column.
    std::vector<Complex> row_sums(static_cast<std::size_t>(n), Complex(0.0));
    Complex total(0.0);
    std::uint32_t gray = 0;
    const std::uint32_t subsets = 1u << n;
    for (std::uint32_t k = 1; k < subsets; ++k) {
        const int col = std::countr_zero(k);
        const std::uint32_t bit = 1u << col;
        gray ^= bit;
        if (gray & bit) {
            for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] += a(i, col);
        } else {
            for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] -= a(i, col);
        }
        Complex prod = row_sums[0];
        for (int i = 1; i < n; ++i) prod *= row_sums[static_cast<std::size_t>(i)];
        if (std::popcount(gray) % 2 == 0) total += prod;
        else total -= prod;
    }
    return (n % 2 == 0) ? total : -total;
}

RealGaussianSampler::RealGaussianSampler(const RealMatrix& cov) {
    if (cov.rows() != cov.cols()) throw InvalidDimension("covariance must be square");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kHermitianTol) {
        throw NotPositiveSemidefinite("covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(0.5 * (cov + cov.transpose()));
    check_psd_spectrum(eig.eigenvalues());
    const Eigen::Index n = cov.rows();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (eig.eigenvalues()(i) > kPsdTol) ++rank;
    factor_.resize(n, rank);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ev = eig.eigenvalues()(i);
        if (ev > kPsdTol) factor_.col(c++) = eig.eigenvectors().col(i) * std::sqrt(ev);
    }
    scratch_.resize(rank);
}

void RealGaussianSampler::draw(RngStream& rng, RealVector& out) {
    for (Eigen::Index i = 0; i < scratch_.size(); ++i) scratch_(i) = rng.normal();
    out.resize(factor_.rows());
    out.noalias() = factor_ * scratch_;
}

ComplexGaussianSampler::ComplexGaussianSampler(const ComplexMatrix& cov) {
    if (cov.rows() != cov.cols()) throw InvalidDimension("covariance must be square");
    if (cov.size() && (cov - cov.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
        throw NotPositiveSemidefinite("covariance is not Hermitian");
    }
    const Eigen::Index n = cov.rows();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(ComplexMatrix(0.5 * (cov + cov.adjoint())));
    check_psd_spectrum(eig.eigenvalues());
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (eig.eigenvalues()(i) > kPsdTol) ++rank;
    // With w = V sqrt(D) g, E[w w^+] = cov; the row-vector convention needs
    // z = w^+ = conj(V sqrt(D)) conj(g), and conj(g) has the same law as g.
    factor_.resize(n, rank);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ev = eig.eigenvalues()(i);
        if (ev > kPsdTol) factor_.col(c++) = eig.eigenvectors().col(i).conjugate() * std::sqrt(ev);
    }
    scratch_.resize(rank);
}

void ComplexGaussianSampler::add_draw(RngStream& rng, Amplitudes& z) {
    static const double scale = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < scratch_.size(); ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        scratch_(i) = Complex(re * scale, im * scale);
    }
    z.transpose().noalias() += factor_ * scratch_;
}

Amplitudes sample_complex_gaussian(const Amplitudes& mean, const ComplexMatrix& cov, RngStream& rng) {
    if (cov.rows() != mean.size()) throw InvalidDimension("mean and covariance sizes differ");
    ComplexGaussianSampler sampler(cov);
    Amplitudes z = mean;
    sampler.add_draw(rng, z);
    return z;
}

}  // namespace pqdsim
