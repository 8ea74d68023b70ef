#pragma once

// Fisher-information quantities: pure- and mixed-state QFI for the relative
// phase, the Mandel-Q decomposition, closed-form oracles for the SES and SCS
// families, the photon-counting measurement distribution, CFI, and the
// Cramér-Rao bound.

#include <cmath>
#include <string>
#include <vector>

#include "qmet/csv.hpp"
#include "qmet/fock.hpp"
#include "qmet/states.hpp"

namespace qmet {

// ---------------------------------------------------------------------------
// Photon-number moments

struct PhotonMoments {
    double mean_a = 0, mean_b = 0;
    double var_a = 0, var_b = 0;
    double cov = 0;
};

namespace detail {

// All moments involve only |c_{mn}|^2 (for states) or the diagonal of rho:
// the number operators are diagonal in the Fock basis.
inline PhotonMoments moments_from_joint(const Eigen::VectorXd& p, int d) {
    double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            const double w = p(Eigen::Index(m) * d + n);
            ma += m * w;
            mb += n * w;
            maa += double(m) * m * w;
            mbb += double(n) * n * w;
            mab += double(m) * n * w;
        }
    PhotonMoments out;
    out.mean_a = ma;
    out.mean_b = mb;
    out.var_a = maa - ma * ma;
    out.var_b = mbb - mb * mb;
    out.cov = mab - ma * mb;
    return out;
}

}  // namespace detail

inline PhotonMoments photon_moments(const TwoModeState& psi) {
    return detail::moments_from_joint(psi.amp().cwiseAbs2(), psi.space().dim);
}

inline PhotonMoments photon_moments(const TwoModeDensity& rho) {
    return detail::moments_from_joint(rho.diagonal_probs(), rho.space().dim);
}

inline PhotonMoments photon_moments(const Probe& x) {
    return std::visit([](const auto& v) { return photon_moments(v); }, x);
}

// ---------------------------------------------------------------------------
// Path symmetry

// A state is path-symmetric when exchanging the modes changes it by at most a
// phase per total-photon-number sector, optionally composed with complex
// conjugation.  Phases diagonal in total photon number commute with the
// relative-number generator, and conjugation flips none of the photon-number
// statistics, so either variant keeps the two modes statistically identical.
// The plain global-phase test |<psi|SWAP|psi>| = 1 is tried first.  Sectors
// clipped by the cutoff mismatch at the tail-mass level, so the default
// tolerance tracks the space's tail budget.
inline bool check_path_symmetry(const TwoModeState& psi, double tol = 0.0) {
    if (tol <= 0.0) tol = std::max(1e-8, 10.0 * psi.space().tail_tol);
    const TwoModeState sw = psi.swapped_modes();
    if (std::abs(std::abs(psi.amp().dot(sw.amp())) - 1.0) < tol) return true;

    // Probability mass each branch fails to explain, summed over sectors.
    // Sectors past the truncation edge (N >= dim) lose their ideal partners
    // and break the phase relation, but carry only tail-level mass, so a
    // mass-weighted aggregate is the right test.
    const int d = psi.space().dim;
    double dev_linear = 0;  // vs SWAP psi_N = e^{i theta_N} psi_N per sector
    double dev_conj = 0;    // vs SWAP psi_N = e^{i theta_N} conj(psi_N)
    for (int N = 0; N <= 2 * (d - 1); ++N) {
        const int m_lo = std::max(0, N - d + 1);
        const int m_hi = std::min(N, d - 1);
        const int nb = m_hi - m_lo + 1;
        Vec v(nb), w(nb);
        for (int i = 0; i < nb; ++i) {
            const int m = m_lo + i;
            v(i) = psi.amp(m, N - m);
            w(i) = psi.amp(N - m, m);
        }
        const double nrm2 = v.squaredNorm();  // == w.squaredNorm(): permutation
        cxd lin = 0, con = 0;
        for (int i = 0; i < nb; ++i) {
            lin += std::conj(v(i)) * w(i);
            con += v(i) * w(i);
        }
        dev_linear += nrm2 - std::abs(lin);
        dev_conj += nrm2 - std::abs(con);
    }
    return std::min(dev_linear, dev_conj) < tol;
}

// ---------------------------------------------------------------------------
// QFI, pure states

// F_Q = 2(Var - Cov) for a path-symmetric pure probe, cross-checked against
// the equivalent variance of the photon-number difference.
inline double qfi_pure(const TwoModeState& psi) {
    if (!check_path_symmetry(psi))
        throw NotPathSymmetric("qfi_pure: probe is not path-symmetric; "
                               "2(Var - Cov) would be over-optimistic");
    const PhotonMoments mom = photon_moments(psi);
    const double f_vc = 2.0 * (0.5 * (mom.var_a + mom.var_b) - mom.cov);

    const int d = psi.space().dim;
    const Eigen::VectorXd p = psi.amp().cwiseAbs2();
    double m1 = 0, m2 = 0;
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            const double w = double(m) - n;
            const double pk = p(Eigen::Index(m) * d + n);
            m1 += w * pk;
            m2 += w * w * pk;
        }
    const double f_var = m2 - m1 * m1;
    if (std::abs(f_vc - f_var) > 1e-9 * std::max(1.0, std::abs(f_var)))
        throw NotPathSymmetric("qfi_pure: 2(Var - Cov) and Var(n_a - n_b) disagree");
    return f_vc;
}

// ---------------------------------------------------------------------------
// QFI, mixed states

// F_Q = sum_{i,j} 2 (l_i - l_j)^2 / (l_i + l_j) |<l_i|G|l_j>|^2 with the
// relative-number generator G = (n_a - n_b)/2.  Eigenpairs with
// l_i + l_j < eig_tol * l_max are skipped.  The result is independent of the
// accumulated phase (the family is unitary); when check_phase_invariance is
// set this is asserted by re-evaluating at phi = 0.7.  The flag exists so
// optimizer hot loops can skip the second eigendecomposition.
inline double qfi_mixed(const TwoModeDensity& rho, double eig_tol = 1e-12,
                        bool check_phase_invariance = true) {
    const int d = rho.space().dim;
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.mat());
    const Eigen::VectorXd& lam = es.eigenvalues();
    if (lam.minCoeff() < -1e-10)
        throw NotPositive("qfi_mixed: density matrix has eigenvalue " +
                          std::to_string(lam.minCoeff()));

    Eigen::VectorXd g(Eigen::Index(d) * d);
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) g(Eigen::Index(m) * d + n) = 0.5 * (m - n);

    const Mat gm = es.eigenvectors().adjoint() * g.asDiagonal() * es.eigenvectors();
    const double cutoff = eig_tol * lam.maxCoeff();
    double f = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        for (Eigen::Index j = 0; j < lam.size(); ++j) {
            const double s = lam(i) + lam(j);
            if (s < cutoff) continue;
            const double diff = lam(i) - lam(j);
            f += 2.0 * diff * diff / s * std::norm(gm(i, j));
        }

    if (check_phase_invariance) {
        const double f2 = qfi_mixed(phase_shift(rho, 0.7), eig_tol, false);
        if (std::abs(f - f2) > 1e-8 * std::max(1.0, std::abs(f)))
            throw DegenerateState("qfi_mixed: result is phase-dependent (got " +
                                  std::to_string(f) + " vs " + std::to_string(f2) + ")");
    }
    return f;
}

inline double qfi(const Probe& x) {
    if (std::holds_alternative<TwoModeState>(x))
        return qfi_pure(std::get<TwoModeState>(x));
    return qfi_mixed(std::get<TwoModeDensity>(x));
}

// ---------------------------------------------------------------------------
// Mandel decomposition F_Q = nbar (1 + Q)(1 - J)

struct MandelDecomposition {
    double q;          // (Var - <n_a>) / <n_a>, mode a
    double j;          // Cov / Var
    double qfi;        // nbar (1 + q)(1 - j)
    bool j_boundary;   // true when j sits at the -1 limit (NOON states)
};

inline MandelDecomposition mandel_decomposition(const TwoModeState& psi) {
    const double f_ref = qfi_pure(psi);  // also enforces path symmetry
    const PhotonMoments mom = photon_moments(psi);
    if (mom.mean_a <= 1e-12)
        throw DegenerateState("mandel_decomposition: <n_a> = 0");
    const double var = 0.5 * (mom.var_a + mom.var_b);
    if (var <= 1e-12)
        throw DegenerateState("mandel_decomposition: Var = 0");

    MandelDecomposition out;
    out.q = (var - mom.mean_a) / mom.mean_a;
    out.j = mom.cov / var;
    out.j_boundary = out.j <= -1.0 + 1e-9;
    if (!out.j_boundary && !(out.j > -1.0 && out.j < 1.0))
        throw DegenerateState("mandel_decomposition: J outside (-1, 1)");
    const double nbar = mom.mean_a + mom.mean_b;
    out.qfi = nbar * (1.0 + out.q) * (1.0 - out.j);
    if (std::abs(out.qfi - f_ref) > 1e-9 * std::max(1.0, std::abs(f_ref)))
        throw DegenerateState("mandel_decomposition: decomposition disagrees with QFI");
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form oracles

struct ClosedForm {
    double qfi;
    double nbar;
};

// SES: F_Q = 3 nbar^2 / (2 N^2) + 2 nbar with N^2 = 1/(2 + 2/cosh|z|) and
// nbar = 2 N^2 sinh^2|z|.
inline ClosedForm ses_qfi_closed(double z) {
    const double r = std::abs(z);
    const double n2 = 1.0 / (2.0 + 2.0 / std::cosh(r));
    const double nbar = 2.0 * n2 * std::sinh(r) * std::sinh(r);
    return {3.0 * nbar * nbar / (2.0 * n2) + 2.0 * nbar, nbar};
}

// SCS: with s_k = sinh(kz), c_k = cosh(kz), tau = tanh(alpha^2),
//   F_Q  = 4(s1^4 + s1^2) + 2 a^2 (tau c4 - s4) + 2 a^4 (c4 - tau s4 - (tau c2 - s2)^2)
//   nbar = 2 s1^2 + 2 a^2 (tau c2 - s2)
// The z argument here carries the same sign as the squeezed_cat builder;
// the oracle-equivalence tests pin this convention down numerically.
inline ClosedForm scs_qfi_closed(double z, double alpha) {
    const double a2 = alpha * alpha;
    const double tau = std::tanh(a2);
    const double s1 = std::sinh(z), s2 = std::sinh(2 * z), s4 = std::sinh(4 * z);
    const double c2 = std::cosh(2 * z), c4 = std::cosh(4 * z);
    const double g2 = tau * c2 - s2;
    const double qfi = 4.0 * (s1 * s1 * s1 * s1 + s1 * s1) + 2.0 * a2 * (tau * c4 - s4) +
                       2.0 * a2 * a2 * (c4 - tau * s4 - g2 * g2);
    const double nbar = 2.0 * s1 * s1 + 2.0 * a2 * g2;
    return {qfi, nbar};
}

// ---------------------------------------------------------------------------
// Cramér-Rao bound

inline double crb(double qfi_value, long mu) {
    if (mu < 1) throw OutOfRange("crb: mu must be >= 1");
    if (qfi_value <= 0.0) throw ZeroInformation("crb: QFI is zero");
    return 1.0 / std::sqrt(double(mu) * qfi_value);
}

// ---------------------------------------------------------------------------
// Photon-counting measurement after the balanced beam splitter

class MeasurementDistribution {
  public:
    MeasurementDistribution(const FockSpace& space, Eigen::VectorXd probs, double phi)
        : space_(space), probs_(std::move(probs)), phi_(phi) {
        const int d = space_.dim;
        if (probs_.size() != Eigen::Index(d) * d)
            throw SpaceMismatch("MeasurementDistribution: size != dim^2");
        for (Eigen::Index k = 0; k < probs_.size(); ++k) {
            if (probs_(k) < -1e-14)
                throw NotPositive("MeasurementDistribution: P(m,n) = " +
                                  std::to_string(probs_(k)));
            if (probs_(k) < 0) probs_(k) = 0;
        }
        if (std::abs(probs_.sum() - 1.0) >= 1e-9)
            throw NotPositive("MeasurementDistribution: probabilities sum to " +
                              std::to_string(probs_.sum()));
    }

    const FockSpace& space() const { return space_; }
    const Eigen::VectorXd& probs() const { return probs_; }
    double prob(int m, int n) const { return probs_(Eigen::Index(m) * space_.dim + n); }
    double phi() const { return phi_; }

  private:
    FockSpace space_;
    Eigen::VectorXd probs_;
    double phi_;
};

inline MeasurementDistribution measurement_distribution(const TwoModeState& psi,
                                                        double phi) {
    const Mat& u = *beam_splitter_5050(psi.space());
    const Vec v = u * phase_shift(psi, phi).amp();
    return MeasurementDistribution(psi.space(), v.cwiseAbs2(), phi);
}

inline MeasurementDistribution measurement_distribution(const TwoModeDensity& rho,
                                                        double phi) {
    const Mat& u = *beam_splitter_5050(rho.space());
    const TwoModeDensity shifted = phase_shift(rho, phi);
    // Only the diagonal of U rho U^dag is needed: row-wise quadratic forms.
    const Eigen::Index d2 = shifted.mat().rows();
    Eigen::VectorXd p(d2);
    const Mat t = u * shifted.mat();
    for (Eigen::Index k = 0; k < d2; ++k)
        p(k) = (t.row(k) * u.row(k).adjoint())(0, 0).real();
    return MeasurementDistribution(rho.space(), std::move(p), phi);
}

inline MeasurementDistribution measurement_distribution(const Probe& x, double phi) {
    return std::visit([&](const auto& v) { return measurement_distribution(v, phi); }, x);
}

// ---------------------------------------------------------------------------
// Classical Fisher information of the photon-counting measurement

inline constexpr double kProbFloor = 1e-14;

// Pure probes: the phase shift is diagonal, so dP/dphi is exact:
// v = U_BS e^{i phi n_a} psi, dv = U_BS (i n_a) e^{i phi n_a} psi,
// dP_k = 2 Re(conj(v_k) dv_k).
inline double cfi(const TwoModeState& psi, double phi) {
    const int d = psi.space().dim;
    const Mat& u = *beam_splitter_5050(psi.space());
    Vec shifted = phase_shift(psi, phi).amp();
    Vec dshifted = shifted;
    for (int m = 0; m < d; ++m)
        dshifted.segment(Eigen::Index(m) * d, d) *= cxd(0, m);
    const Vec v = u * shifted;
    const Vec dv = u * dshifted;
    double f = 0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double p = std::norm(v(k));
        if (p < kProbFloor) continue;
        const double dp = 2.0 * (std::conj(v(k)) * dv(k)).real();
        f += dp * dp / p;
    }
    return f;
}

// Mixed probes: central finite differences with a step-halving consistency
// check (h and h/2 must agree to 1e-4 relative).
inline double cfi(const TwoModeDensity& rho, double phi, double h = 1e-4) {
    const Eigen::VectorXd p0 = measurement_distribution(rho, phi).probs();
    const auto fisher_at = [&](double step) {
        const Eigen::VectorXd pp = measurement_distribution(rho, phi + step).probs();
        const Eigen::VectorXd pm = measurement_distribution(rho, phi - step).probs();
        double f = 0;
        for (Eigen::Index k = 0; k < p0.size(); ++k) {
            if (p0(k) < kProbFloor) continue;
            const double dp = (pp(k) - pm(k)) / (2.0 * step);
            f += dp * dp / p0(k);
        }
        return f;
    };
    const double f1 = fisher_at(h);
    const double f2 = fisher_at(0.5 * h);
    if (std::abs(f1 - f2) > 1e-4 * std::max(std::abs(f2), 1e-9))
        throw DerivativeInconsistent("cfi: step-halving check failed (" +
                                     std::to_string(f1) + " vs " + std::to_string(f2) +
                                     ")");
    return f2;
}

inline double cfi(const Probe& x, double phi) {
    return std::visit([&](const auto& v) { return cfi(v, phi); }, x);
}

// Scanning the CFI of a mixed probe over many phi values with the
// finite-difference route costs several dim^2 x dim^2 products per point.
// The phase dependence is a trigonometric polynomial: with U = U_BS and
// outcome row u_k, P(k|phi) = sum_{m,m'} s_k(m,m') e^{i phi (m-m')}, so both
// P and dP/dphi are exact sums over the 2*dim-1 offsets.  This class
// precomputes the offset table once and then evaluates the CFI at any phi in
// O(dim^3).  Used for scans; single-point cfi() remains the reference.
class MixedCfiProfile {
  public:
    explicit MixedCfiProfile(const TwoModeDensity& rho) : d_(rho.space().dim) {
        const Mat& u = *beam_splitter_5050(rho.space());
        const Eigen::Index d2 = Eigen::Index(d_) * d_;
        b_ = Mat::Zero(d2, 2 * d_ - 1);
        Vec uk(d2);
        for (Eigen::Index k = 0; k < d2; ++k) {
            uk = u.row(k).transpose();
            for (int m = 0; m < d_; ++m)
                for (int mp = 0; mp < d_; ++mp) {
                    const cxd s = uk.segment(Eigen::Index(m) * d_, d_).transpose() *
                                  rho.mat().block(Eigen::Index(m) * d_,
                                                  Eigen::Index(mp) * d_, d_, d_) *
                                  uk.segment(Eigen::Index(mp) * d_, d_).conjugate();
                    b_(k, m - mp + d_ - 1) += s;
                }
        }
    }

    double cfi_at(double phi) const {
        double f = 0;
        Vec ph(2 * d_ - 1);
        for (int delta = -(d_ - 1); delta <= d_ - 1; ++delta)
            ph(delta + d_ - 1) = std::exp(cxd(0, phi * delta));
        for (Eigen::Index k = 0; k < b_.rows(); ++k) {
            cxd p = 0, dp = 0;
            for (int delta = -(d_ - 1); delta <= d_ - 1; ++delta) {
                const cxd term = b_(k, delta + d_ - 1) * ph(delta + d_ - 1);
                p += term;
                dp += cxd(0, delta) * term;
            }
            if (p.real() < kProbFloor) continue;
            f += dp.real() * dp.real() / p.real();
        }
        return f;
    }

  private:
    int d_;
    Mat b_;  // offset table, outcomes x (2 dim - 1)
};

// ---------------------------------------------------------------------------
// Report row

struct FisherReport {
    StateSpec state;
    double nbar = 0;
    double eta = 1.0;
    double phi = 0;
    double qfi = 0;
    double cfi_at_phi = 0;
    double crb_value = 0;
    long mu = 1;

    void validate() const {
        if (cfi_at_phi > qfi * (1.0 + 1e-6) + 1e-12)
            throw DegenerateState("FisherReport: CFI exceeds QFI");
        if (qfi > 0 && std::abs(crb_value - crb(qfi, mu)) > 1e-12 * crb_value)
            throw DegenerateState("FisherReport: CRB inconsistent with QFI and mu");
    }

    static std::string csv_header() {
        return "state_family,alpha,z,N,nbar,eta,phi,qfi,cfi,crb,mu\n";
    }

    std::string csv_row() const {
        return csv_join({to_string(state.family), csv_num(state.alpha), csv_num(state.z),
                         std::to_string(state.N), csv_num(nbar), csv_num(eta),
                         csv_num(phi), csv_num(qfi), csv_num(cfi_at_phi),
                         csv_num(crb_value), std::to_string(mu)});
    }
};

}  // namespace qmet
