#pragma once

// Single-mode Wigner functions via the displaced-parity formula, the
// Wigner-overlap fidelity, and a fidelity-based QFI cross-check.
//
// Convention: the phase-space point (x, p) is the displacement beta = x + i p,
// and W(beta) = (2/pi) sum_n (-1)^n <n|D(beta)^dag rho D(beta)|n>.  With this
// normalization the vacuum peaks at 2/pi, W is bounded below by -2/pi, and
// the grid integral of W over dx dp is 1, so the state-overlap fidelity is
// pi * integral of W1*W2.

#include <cmath>
#include <string>

#include "qmet/csv.hpp"
#include "qmet/fock.hpp"

namespace qmet {

struct GridSpec {
    double x_min = -6, x_max = 6;
    double p_min = -6, p_max = 6;
    int resolution = 201;
};

class WignerGrid {
  public:
    WignerGrid(GridSpec spec, Eigen::MatrixXd values)
        : spec_(spec), values_(std::move(values)) {
        if (spec_.resolution < 2) throw OutOfRange("WignerGrid: resolution must be >= 2");
        if (values_.rows() != spec_.resolution || values_.cols() != spec_.resolution)
            throw GridMismatch("WignerGrid: values are not resolution x resolution");
        if (values_.minCoeff() < -2.0 / M_PI - 1e-9)
            throw NotPositive("WignerGrid: value below the -2/pi bound");
    }

    const GridSpec& spec() const { return spec_; }
    // values(i, j) = W(x_i, p_j)
    const Eigen::MatrixXd& values() const { return values_; }

    double x(int i) const {
        return spec_.x_min + (spec_.x_max - spec_.x_min) * i / (spec_.resolution - 1);
    }
    double p(int j) const {
        return spec_.p_min + (spec_.p_max - spec_.p_min) * j / (spec_.resolution - 1);
    }
    double dx() const { return (spec_.x_max - spec_.x_min) / (spec_.resolution - 1); }
    double dp() const { return (spec_.p_max - spec_.p_min) / (spec_.resolution - 1); }

    double integral() const { return values_.sum() * dx() * dp(); }

    std::string to_csv() const {
        std::string out = "x,p,w\n";
        for (int i = 0; i < spec_.resolution; ++i)
            for (int j = 0; j < spec_.resolution; ++j)
                out += csv_join({csv_num(x(i)), csv_num(p(j)), csv_num(values_(i, j))});
        return out;
    }

    friend bool same_grid(const WignerGrid& a, const WignerGrid& b) {
        const GridSpec &s = a.spec_, &t = b.spec_;
        return s.x_min == t.x_min && s.x_max == t.x_max && s.p_min == t.p_min &&
               s.p_max == t.p_max && s.resolution == t.resolution;
    }

  private:
    GridSpec spec_;
    Eigen::MatrixXd values_;
};

namespace detail {

// Clenshaw evaluation of the normalized Laguerre series
//   sum_n c[n] * (-1)^n sqrt(L! n! / (L+n)!) * L_n^L(x)
// along one diagonal of the density matrix.  The normalized polynomials keep
// every intermediate bounded, which is what makes the summation stable at
// large cutoffs where a term-by-term displacement recurrence overflows.
inline cxd wig_laguerre_val(int L, double x, const cxd* c, int n) {
    cxd y0, y1;
    if (n == 1) {
        y0 = c[0];
        y1 = 0.0;
    } else {
        y0 = c[n - 2];
        y1 = c[n - 1];
        for (int k = n - 1; k >= 2; --k) {
            const cxd t0 = c[k - 2] - y1 * std::sqrt(double(k - 1) * (L + k - 1) /
                                                     (double(L + k) * k));
            const cxd t1 = y0 - y1 * (L + 2.0 * k - 1.0 - x) /
                                    std::sqrt(double(L + k) * k);
            y0 = t0;
            y1 = t1;
        }
    }
    return y0 - y1 * (L + 1.0 - x) / std::sqrt(L + 1.0);
}

// W(x, p) for a Fock-basis density matrix, as a Laguerre series over the
// matrix diagonals folded together with Clenshaw/Horner steps.
inline WignerGrid wigner_impl(const Mat& rho, const GridSpec& spec) {
    const int d = int(rho.rows());
    // Off-diagonals enter twice (rho_{n,n+L} and its conjugate); fold the
    // factor into the stored diagonals once.
    std::vector<std::vector<cxd>> diags(d);
    for (int L = 0; L < d; ++L) {
        diags[L].resize(d - L);
        for (int n = 0; n + L < d; ++n)
            diags[L][n] = (L == 0 ? 1.0 : 2.0) * rho(n, n + L);
    }
    Eigen::MatrixXd vals(spec.resolution, spec.resolution);
    const double dx = (spec.x_max - spec.x_min) / (spec.resolution - 1);
    const double dp = (spec.p_max - spec.p_min) / (spec.resolution - 1);
    for (int i = 0; i < spec.resolution; ++i) {
        const double x = spec.x_min + dx * i;
        for (int j = 0; j < spec.resolution; ++j) {
            const double p = spec.p_min + dp * j;
            const cxd a = 2.0 * cxd(x, p);
            const double b = std::norm(a);
            cxd w0 = diags[d - 1][0];
            for (int L = d - 2; L >= 0; --L)
                w0 = wig_laguerre_val(L, b, diags[L].data(), d - L) +
                     w0 * a / std::sqrt(L + 1.0);
            vals(i, j) = (2.0 / M_PI) * std::exp(-0.5 * b) * w0.real();
        }
    }
    WignerGrid grid(spec, std::move(vals));
    if (std::abs(grid.integral() - 1.0) > 1e-3)
        throw GridTooSmall("wigner: grid integral is " + std::to_string(grid.integral()) +
                           "; enlarge the grid or raise the resolution");
    return grid;
}

}  // namespace detail

inline WignerGrid wigner(const SingleModeState& psi, const GridSpec& spec = {}) {
    const Mat rho = psi.amp() * psi.amp().adjoint();
    return detail::wigner_impl(rho, spec);
}

// Single-mode density matrix.
inline WignerGrid wigner(const FockSpace& space, const Mat& rho,
                         const GridSpec& spec = {}) {
    if (rho.rows() != space.dim || rho.cols() != space.dim)
        throw SpaceMismatch("wigner: density matrix is not dim x dim");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() >= kHermTol)
        throw NotPositive("wigner: density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw NotPositive("wigner: density matrix is not positive");
    return detail::wigner_impl(rho, spec);
}

inline double wigner_overlap_fidelity(const WignerGrid& w1, const WignerGrid& w2) {
    if (!same_grid(w1, w2))
        throw GridMismatch("wigner_overlap_fidelity: grids differ");
    return M_PI * (w1.values().cwiseProduct(w2.values())).sum() * w1.dx() * w1.dp();
}

// QFI from the Bures expansion of the fidelity under a small relative phase:
// sqrt(F(dphi)) ~= 1 - F_Q dphi^2 / 8, evaluated with the relative-number
// generator e^{i dphi (n_a - n_b)/2} so the result matches qfi_pure.
inline double qfi_from_fidelity(const TwoModeState& psi, double dphi = 1e-3) {
    const int d = psi.space().dim;
    Vec rotated = psi.amp();
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
            rotated(Eigen::Index(m) * d + n) *= std::exp(cxd(0, 0.5 * dphi * (m - n)));
    const double fid = std::norm(psi.amp().dot(rotated));
    return 8.0 * (1.0 - std::sqrt(fid)) / (dphi * dphi);
}

}  // namespace qmet
