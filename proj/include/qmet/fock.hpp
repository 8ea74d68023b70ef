#pragma once

// Truncated Fock-space representation of one- and two-mode optical states,
// the ladder/number operators, and the unitaries (displacement, squeezing,
// beam splitter, phase shift) everything else is built from.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "qmet/errors.hpp"

namespace qmet {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;

struct FockSpace {
    int dim;
    double tail_tol;

    explicit FockSpace(int dim_, double tail_tol_ = 1e-8)
        : dim(dim_), tail_tol(tail_tol_) {
        if (dim < 2) throw OutOfRange("FockSpace: dim must be >= 2");
        if (!(tail_tol > 0.0 && tail_tol <= 1e-4))
            throw OutOfRange("FockSpace: tail_tol must lie in (0, 1e-4]");
    }

    friend bool operator==(const FockSpace& a, const FockSpace& b) {
        return a.dim == b.dim;
    }
};

// Probability mass in the top 3 Fock levels of a photon-number distribution.
inline double tail_mass(const Eigen::VectorXd& pn) {
    const Eigen::Index d = pn.size();
    const Eigen::Index start = std::max<Eigen::Index>(d - 3, 1);
    return pn.segment(start, d - start).sum();
}

inline void require_same_space(const FockSpace& a, const FockSpace& b,
                               const char* where) {
    if (!(a == b)) throw SpaceMismatch(std::string(where) + ": FockSpace dims differ");
}

class SingleModeState {
  public:
    SingleModeState(const FockSpace& space, Vec amp) : space_(space), amp_(std::move(amp)) {
        if (amp_.size() != space_.dim)
            throw SpaceMismatch("SingleModeState: amplitude length != dim");
        const double n = amp_.norm();
        if (n < 1e-14) throw DegenerateState("SingleModeState: zero vector");
        amp_ /= n;
        if (tail_mass(photon_distribution()) >= space_.tail_tol)
            throw TruncationError("SingleModeState: top-3-level mass exceeds tail_tol; "
                                  "increase dim");
    }

    const FockSpace& space() const { return space_; }
    const Vec& amp() const { return amp_; }
    cxd amp(int n) const { return amp_(n); }

    Eigen::VectorXd photon_distribution() const { return amp_.cwiseAbs2(); }

    double mean_n() const {
        const Eigen::VectorXd p = photon_distribution();
        double s = 0;
        for (int n = 0; n < space_.dim; ++n) s += n * p(n);
        return s;
    }

    double var_n() const {
        const Eigen::VectorXd p = photon_distribution();
        double m1 = 0, m2 = 0;
        for (int n = 0; n < space_.dim; ++n) {
            m1 += n * p(n);
            m2 += double(n) * n * p(n);
        }
        return m2 - m1 * m1;
    }

  private:
    FockSpace space_;
    Vec amp_;
};

class TwoModeState {
  public:
    // Amplitudes are row-major in (m, n) = (photons in a, photons in b).
    TwoModeState(const FockSpace& space, Vec amp) : space_(space), amp_(std::move(amp)) {
        const int d = space_.dim;
        if (amp_.size() != Eigen::Index(d) * d)
            throw SpaceMismatch("TwoModeState: amplitude length != dim^2");
        const double n = amp_.norm();
        if (n < 1e-14) throw DegenerateState("TwoModeState: zero vector");
        amp_ /= n;
        if (tail_mass(marginal_a()) >= space_.tail_tol ||
            tail_mass(marginal_b()) >= space_.tail_tol)
            throw TruncationError("TwoModeState: marginal top-3-level mass exceeds "
                                  "tail_tol; increase dim");
    }

    const FockSpace& space() const { return space_; }
    const Vec& amp() const { return amp_; }
    cxd amp(int m, int n) const { return amp_(Eigen::Index(m) * space_.dim + n); }

    Eigen::VectorXd marginal_a() const {
        const int d = space_.dim;
        Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) p(m) += std::norm(amp_(Eigen::Index(m) * d + n));
        return p;
    }

    Eigen::VectorXd marginal_b() const {
        const int d = space_.dim;
        Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) p(n) += std::norm(amp_(Eigen::Index(m) * d + n));
        return p;
    }

    TwoModeState swapped_modes() const {
        const int d = space_.dim;
        Vec out(Eigen::Index(d) * d);
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n)
                out(Eigen::Index(n) * d + m) = amp_(Eigen::Index(m) * d + n);
        return TwoModeState(space_, std::move(out));
    }

  private:
    FockSpace space_;
    Vec amp_;
};

class TwoModeDensity {
  public:
    TwoModeDensity(const FockSpace& space, Mat rho) : space_(space), mat_(std::move(rho)) {
        const Eigen::Index d2 = Eigen::Index(space_.dim) * space_.dim;
        if (mat_.rows() != d2 || mat_.cols() != d2)
            throw SpaceMismatch("TwoModeDensity: matrix is not dim^2 x dim^2");
        const double herm = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
        if (herm >= kHermTol)
            throw NotPositive("TwoModeDensity: not Hermitian (max dev " +
                              std::to_string(herm) + ")");
        mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
        const double tr = mat_.trace().real();
        if (std::abs(tr - 1.0) >= kTraceTol)
            throw NotPositive("TwoModeDensity: trace != 1 (got " + std::to_string(tr) + ")");
    }

    const FockSpace& space() const { return space_; }
    const Mat& mat() const { return mat_; }

    // Positivity is validated lazily: eigendecomposing at every construction
    // would dominate the cost of loss sweeps.
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Mat> es(mat_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    Eigen::VectorXd diagonal_probs() const { return mat_.diagonal().real(); }

  private:
    FockSpace space_;
    Mat mat_;
};

class ModeOperator {
  public:
    ModeOperator(const FockSpace& space, Mat m) : space_(space), mat_(std::move(m)) {
        if (mat_.rows() != space_.dim || mat_.cols() != space_.dim)
            throw SpaceMismatch("ModeOperator: matrix is not dim x dim");
    }

    const FockSpace& space() const { return space_; }
    const Mat& mat() const { return mat_; }

  private:
    FockSpace space_;
    Mat mat_;
};

// ---------------------------------------------------------------------------
// Ladder and number operators

inline ModeOperator annihilation(const FockSpace& space) {
    Mat a = Mat::Zero(space.dim, space.dim);
    for (int n = 1; n < space.dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return ModeOperator(space, std::move(a));
}

inline ModeOperator creation(const FockSpace& space) {
    return ModeOperator(space, annihilation(space).mat().adjoint());
}

inline ModeOperator number_op(const FockSpace& space) {
    Mat n = Mat::Zero(space.dim, space.dim);
    for (int k = 0; k < space.dim; ++k) n(k, k) = double(k);
    return ModeOperator(space, std::move(n));
}

// ---------------------------------------------------------------------------
// Unitaries from anti-Hermitian generators, via eigendecomposition of the
// Hermitian matrix H = -iG.  exp(G) = V diag(e^{i lambda}) V^dagger.

inline Mat unitary_from_generator(const Mat& g) {
    const Mat h = cxd(0, -1) * g;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Eigen::VectorXd& lam = es.eigenvalues();
    Vec phases(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        phases(i) = std::exp(cxd(0, lam(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline SingleModeState vacuum(const FockSpace& space) {
    Vec v = Vec::Zero(space.dim);
    v(0) = 1.0;
    return SingleModeState(space, std::move(v));
}

namespace detail {

// Exponentiating a generator truncated at dim corrupts the rows near the
// cutoff (amplitude reflects off the truncation edge instead of leaving the
// space).  Evaluating in a padded space and keeping the top-left dim x dim
// block leaves every retained entry exact to machine precision whenever the
// column's image passes truncation health at dim.
inline Mat padded_ladder(int work_dim) {
    Mat a = Mat::Zero(work_dim, work_dim);
    for (int n = 1; n < work_dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

inline int work_dim_for(const FockSpace& space) { return 2 * space.dim + 64; }

}  // namespace detail

inline ModeOperator displacement(const FockSpace& space, cxd alpha) {
    const Mat a = detail::padded_ladder(detail::work_dim_for(space));
    const Mat g = alpha * a.adjoint() - std::conj(alpha) * a;
    Mat u = unitary_from_generator(g).topLeftCorner(space.dim, space.dim);
    // D(alpha)|0> must be representable in this space.
    Eigen::VectorXd pn = u.col(0).cwiseAbs2();
    if (tail_mass(pn) >= space.tail_tol || pn.sum() < 1.0 - space.tail_tol)
        throw TruncationError("displacement: coherent state fails tail_tol at |alpha| = " +
                              std::to_string(std::abs(alpha)));
    return ModeOperator(space, std::move(u));
}

inline ModeOperator squeeze(const FockSpace& space, cxd z) {
    const Mat a = detail::padded_ladder(detail::work_dim_for(space));
    const Mat g = 0.5 * (std::conj(z) * a * a - z * a.adjoint() * a.adjoint());
    Mat u = unitary_from_generator(g).topLeftCorner(space.dim, space.dim);
    Eigen::VectorXd pn = u.col(0).cwiseAbs2();
    if (tail_mass(pn) >= space.tail_tol || pn.sum() < 1.0 - space.tail_tol)
        throw TruncationError("squeeze: squeezed vacuum fails tail_tol at |z| = " +
                              std::to_string(std::abs(z)));
    return ModeOperator(space, std::move(u));
}

// Closed-form squeezed vacuum S(z)|0>: only even levels populated,
// c_{2m+2}/c_{2m} = -e^{i theta} tanh r * sqrt((2m+1)(2m+2)) / (2(m+1)).
inline SingleModeState squeezed_vacuum_amplitudes(const FockSpace& space, cxd z) {
    const double r = std::abs(z);
    Vec c = Vec::Zero(space.dim);
    if (r < 1e-300) {
        c(0) = 1.0;
        return SingleModeState(space, std::move(c));
    }
    const cxd phase = z / r;
    c(0) = 1.0 / std::sqrt(std::cosh(r));
    const double t = std::tanh(r);
    for (int m = 0; 2 * m + 2 < space.dim; ++m) {
        const double ratio = std::sqrt(double(2 * m + 1) * (2 * m + 2)) / (2.0 * (m + 1));
        c(2 * m + 2) = c(2 * m) * (-phase * t) * ratio;
    }
    Eigen::VectorXd pn = c.cwiseAbs2();
    if (tail_mass(pn) / pn.sum() >= space.tail_tol)
        throw TruncationError("squeezed_vacuum_amplitudes: fails tail_tol at r = " +
                              std::to_string(r));
    return SingleModeState(space, std::move(c));
}

// ---------------------------------------------------------------------------
// Two-mode operations

inline TwoModeState tensor(const SingleModeState& a, const SingleModeState& b) {
    require_same_space(a.space(), b.space(), "tensor");
    const int d = a.space().dim;
    Vec out(Eigen::Index(d) * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) out(Eigen::Index(m) * d + n) = a.amp(m) * b.amp(n);
    return TwoModeState(a.space(), std::move(out));
}

// Balanced beam splitter exp(i (pi/4) (a^dag b + a b^dag)), built block by
// block in total photon number N = m + n (the generator conserves N).
inline Mat beam_splitter_5050_matrix(const FockSpace& space) {
    const int d = space.dim;
    const Eigen::Index d2 = Eigen::Index(d) * d;
    Mat u = Mat::Zero(d2, d2);
    for (int N = 0; N <= 2 * (d - 1); ++N) {
        const int m_lo = std::max(0, N - d + 1);
        const int m_hi = std::min(N, d - 1);
        const int nb = m_hi - m_lo + 1;
        // H restricted to the block, basis |m, N-m>, m = m_lo..m_hi.
        Mat h = Mat::Zero(nb, nb);
        for (int i = 0; i + 1 < nb; ++i) {
            const int m = m_lo + i;
            // <m+1, N-m-1| a^dag b |m, N-m> = sqrt((m+1)(N-m))
            const double v = 0.25 * M_PI * std::sqrt(double(m + 1) * (N - m));
            h(i + 1, i) = v;
            h(i, i + 1) = v;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        Vec ph(nb);
        for (int i = 0; i < nb; ++i) ph(i) = std::exp(cxd(0, es.eigenvalues()(i)));
        Mat ub = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
                const int mi = m_lo + i, mj = m_lo + j;
                u(Eigen::Index(mi) * d + (N - mi), Eigen::Index(mj) * d + (N - mj)) =
                    ub(i, j);
            }
    }
    return u;
}

// The dim^2 x dim^2 beam splitter is reused heavily (measurement sweeps,
// Bayesian likelihood grids); cache it per dimension.
inline std::shared_ptr<const Mat> beam_splitter_5050(const FockSpace& space) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const Mat>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(space.dim);
    if (it != cache.end()) return it->second;
    auto m = std::make_shared<const Mat>(beam_splitter_5050_matrix(space));
    cache.emplace(space.dim, m);
    return m;
}

// Relative phase phi = phi_a - phi_b, applied to mode a only: c_{mn} -> e^{i phi m} c_{mn}.
inline TwoModeState phase_shift(const TwoModeState& psi, double phi) {
    const int d = psi.space().dim;
    Vec out = psi.amp();
    for (int m = 0; m < d; ++m) {
        const cxd ph = std::exp(cxd(0, phi * m));
        out.segment(Eigen::Index(m) * d, d) *= ph;
    }
    return TwoModeState(psi.space(), std::move(out));
}

inline TwoModeDensity phase_shift(const TwoModeDensity& rho, double phi) {
    const int d = rho.space().dim;
    Vec ph(Eigen::Index(d) * d);
    for (int m = 0; m < d; ++m)
        ph.segment(Eigen::Index(m) * d, d).setConstant(std::exp(cxd(0, phi * m)));
    Mat out = ph.asDiagonal() * rho.mat() * ph.conjugate().asDiagonal();
    return TwoModeDensity(rho.space(), std::move(out));
}

inline TwoModeState apply_two_mode(const Mat& u, const TwoModeState& psi) {
    if (u.cols() != psi.amp().size())
        throw SpaceMismatch("apply_two_mode: unitary size != dim^2");
    return TwoModeState(psi.space(), u * psi.amp());
}

inline TwoModeDensity apply_two_mode(const Mat& u, const TwoModeDensity& rho) {
    if (u.cols() != rho.mat().rows())
        throw SpaceMismatch("apply_two_mode: unitary size != dim^2");
    return TwoModeDensity(rho.space(), u * rho.mat() * u.adjoint());
}

inline TwoModeDensity pure_density(const TwoModeState& psi) {
    return TwoModeDensity(psi.space(), psi.amp() * psi.amp().adjoint());
}

}  // namespace qmet
