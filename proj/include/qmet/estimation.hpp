#pragma once

// Constrained maximization of Fisher information at fixed mean photon number,
// and the grid-based Bayesian phase-estimation Monte Carlo.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qmet/csv.hpp"
#include "qmet/fock.hpp"
#include "qmet/loss.hpp"
#include "qmet/metrology.hpp"
#include "qmet/states.hpp"

namespace qmet {

// ---------------------------------------------------------------------------
// Constrained optimization

enum class Merit { QFI, CFI_best_phi };

struct OptimizationResult {
    StateFamily family;
    double best_alpha = 0;
    double best_z = 0;
    double nbar_achieved = 0;
    double figure_of_merit = 0;
    double eta = 1.0;

    static std::string csv_header() {
        return "state_family,best_alpha,best_z,nbar,eta,figure_of_merit\n";
    }
    std::string csv_row() const {
        return csv_join({to_string(family), csv_num(best_alpha), csv_num(best_z),
                         csv_num(nbar_achieved), csv_num(eta), csv_num(figure_of_merit)});
    }
};

struct OptimizerOptions {
    double alpha_max = 3.0;
    double z_max = 2.0;
    int coarse_z_points = 49;
    double merit_rel_tol = 1e-5;
    int phi_grid = 64;             // for Merit::CFI_best_phi
    double phi_hi = M_PI;          // CFI scan range [0, phi_hi)
};

namespace detail {

// Mean photon number of the lossless probe as a function of its parameters.
inline double probe_nbar_closed(StateFamily family, double alpha, double z) {
    switch (family) {
        case StateFamily::Coherent: return alpha * alpha;
        case StateFamily::SqueezedVacuum: return std::sinh(z) * std::sinh(z);
        case StateFamily::Cat: {
            const double a2 = alpha * alpha;
            return a2 * std::tanh(a2);
        }
        case StateFamily::SqueezedCat: return scs_qfi_closed(z, alpha).nbar;
        case StateFamily::SES: return ses_qfi_closed(z).nbar;
        case StateFamily::SVCS: return alpha * alpha + std::sinh(z) * std::sinh(z);
        case StateFamily::SSV: return 2.0 * std::sinh(z) * std::sinh(z);
        case StateFamily::NOON: return 0;  // handled separately
    }
    return 0;
}

// All alpha >= 0 with nbar(alpha; z) = target.  nbar is not monotone in alpha
// for strongly squeezed cats, so every sign change of the residual on a fine
// scan is bracketed and bisected.
inline std::vector<double> solve_alpha_roots(StateFamily family, double z, double target,
                                             double alpha_max) {
    const auto resid = [&](double a) {
        return probe_nbar_closed(family, a, z) - target;
    };
    std::vector<double> roots;
    const int n = 601;
    double prev = resid(0.0);
    if (std::abs(prev) < 1e-12) roots.push_back(0.0);
    for (int i = 1; i <= n; ++i) {
        const double a = alpha_max * i / n;
        const double cur = resid(a);
        if ((prev < 0 && cur >= 0) || (prev > 0 && cur <= 0)) {
            double lo = alpha_max * (i - 1) / n, hi = a;
            double flo = prev;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = resid(mid);
                if ((flo < 0) == (fm < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    return roots;
}

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// Figure of merit for a probe under the given loss.  QFI of pure lossless
// probes uses the pure formula; lossy probes the eigendecomposition formula
// (phase-invariance re-check disabled: this runs inside optimizer loops).
inline double evaluate_merit(const FockSpace& space, const StateSpec& spec,
                             const LossSpec& loss, Merit merit,
                             const OptimizerOptions& opts = {}) {
    const TwoModeState psi = build_probe(space, spec);
    const bool lossless = loss.eta_a == 1.0 && loss.eta_b == 1.0;
    if (merit == Merit::QFI) {
        if (lossless) return qfi_pure(psi);
        return qfi_mixed(apply_loss(psi, loss), 1e-12, false);
    }
    if (lossless) {
        double best = 0, best_phi = 0;
        for (int i = 0; i < opts.phi_grid; ++i) {
            const double phi = opts.phi_hi * i / opts.phi_grid;
            const double f = cfi(psi, phi);
            if (f > best) {
                best = f;
                best_phi = phi;
            }
        }
        const double step = opts.phi_hi / opts.phi_grid;
        const double refined = detail::golden_max(
            [&](double phi) { return cfi(psi, phi); }, std::max(0.0, best_phi - step),
            best_phi + step, 1e-5);
        return std::max(best, cfi(psi, refined));
    }
    // Mixed probe: locate the peak with the trigonometric profile, then
    // confirm the value through the guarded finite-difference route.
    const TwoModeDensity rho = apply_loss(psi, loss);
    const MixedCfiProfile prof(rho);
    double best = 0, best_phi = 0;
    for (int i = 0; i < opts.phi_grid; ++i) {
        const double phi = opts.phi_hi * i / opts.phi_grid;
        const double f = prof.cfi_at(phi);
        if (f > best) {
            best = f;
            best_phi = phi;
        }
    }
    const double step = opts.phi_hi / opts.phi_grid;
    const double refined = detail::golden_max(
        [&](double phi) { return prof.cfi_at(phi); }, std::max(0.0, best_phi - step),
        best_phi + step, 1e-5);
    if (prof.cfi_at(refined) > best) best_phi = refined;
    return cfi(rho, best_phi);
}

inline OptimizationResult optimize_at_nbar(const FockSpace& space, StateFamily family,
                                           double nbar_target, const LossSpec& loss,
                                           Merit merit, const OptimizerOptions& opts = {}) {
    if (nbar_target <= 0) throw Unachievable("optimize_at_nbar: nbar_target must be > 0");
    OptimizationResult out;
    out.family = family;
    out.eta = 0.5 * (loss.eta_a + loss.eta_b);

    const auto finish = [&](double alpha, double z) {
        StateSpec spec{family, alpha, z, 0};
        out.best_alpha = alpha;
        out.best_z = z;
        out.nbar_achieved = mean_photons(build_probe(space, spec));
        if (std::abs(out.nbar_achieved - nbar_target) > 1e-4)
            throw Unachievable("optimize_at_nbar: constraint missed (achieved " +
                               std::to_string(out.nbar_achieved) + ")");
        out.figure_of_merit = evaluate_merit(space, spec, loss, merit, opts);
        return out;
    };

    switch (family) {
        case StateFamily::NOON: {
            const int n = int(std::lround(nbar_target));
            if (std::abs(nbar_target - n) > 1e-4 || n < 1 || n >= space.dim)
                throw Unachievable("optimize_at_nbar: NOON needs integer nbar < dim");
            StateSpec spec{family, 0, 0, n};
            out.best_alpha = 0;
            out.best_z = 0;
            out.nbar_achieved = double(n);
            out.figure_of_merit = evaluate_merit(space, spec, loss, merit, opts);
            return out;
        }
        case StateFamily::Coherent: return finish(std::sqrt(nbar_target), 0);
        case StateFamily::SqueezedVacuum:
            return finish(0, std::asinh(std::sqrt(nbar_target)));
        case StateFamily::SSV:
            return finish(0, std::asinh(std::sqrt(0.5 * nbar_target)));
        case StateFamily::SES: {
            // nbar = cosh z (cosh z - 1)  =>  cosh z = (1 + sqrt(1 + 4 nbar)) / 2.
            const double c = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * nbar_target));
            return finish(0, std::acosh(c));
        }
        case StateFamily::Cat: {
            const auto roots = detail::solve_alpha_roots(family, 0, nbar_target,
                                                         opts.alpha_max);
            if (roots.empty())
                throw Unachievable("optimize_at_nbar: cat cannot reach nbar_target");
            return finish(roots.front(), 0);
        }
        case StateFamily::SVCS:
        case StateFamily::SqueezedCat: break;  // two-parameter search below
    }

    // Two-parameter families: walk the nbar-constraint contour parametrized
    // by z; for each z the closed-form residual gives the admissible alphas.
    const auto candidates_at = [&](double z) {
        std::vector<double> as;
        if (family == StateFamily::SVCS) {
            const double s2 = std::sinh(z) * std::sinh(z);
            if (s2 <= nbar_target) as.push_back(std::sqrt(nbar_target - s2));
        } else {
            as = detail::solve_alpha_roots(family, z, nbar_target, opts.alpha_max);
        }
        return as;
    };
    const auto best_at = [&](double z) -> std::pair<double, double> {  // (merit, alpha)
        double bm = -1, ba = 0;
        for (double a : candidates_at(z)) {
            try {
                StateSpec spec{family, a, z, 0};
                const double m = evaluate_merit(space, spec, loss, merit, opts);
                if (m > bm) {
                    bm = m;
                    ba = a;
                }
            } catch (const TruncationError&) {
                // Contour point outside truncation health: skip it.
            }
        }
        return {bm, ba};
    };

    double best_merit = -1, best_z = 0, best_alpha = 0;
    const int nz = opts.coarse_z_points;
    for (int i = 0; i < nz; ++i) {
        const double z = -opts.z_max + 2.0 * opts.z_max * i / (nz - 1);
        const auto [m, a] = best_at(z);
        if (m > best_merit) {
            best_merit = m;
            best_z = z;
            best_alpha = a;
        }
    }
    if (best_merit < 0)
        throw Unachievable("optimize_at_nbar: no contour point reaches nbar_target");

    const double dz = 2.0 * opts.z_max / (nz - 1);
    const double zr = detail::golden_max(
        [&](double z) { return best_at(z).first; },
        std::max(-opts.z_max, best_z - dz), std::min(opts.z_max, best_z + dz),
        opts.merit_rel_tol);
    const auto [mr, ar] = best_at(zr);
    if (mr > best_merit) {
        best_merit = mr;
        best_z = zr;
        best_alpha = ar;
    }
    return finish(best_alpha, best_z);
}

// ---------------------------------------------------------------------------
// Bayesian phase estimation (grid posterior)

struct PriorSupport {
    double lo = 0.0;
    double hi = 0.5 * M_PI;
};

class PhasePosterior {
  public:
    // density over cell centers of [lo, hi); sum(density) * cell = 1.
    PhasePosterior(PriorSupport support, Eigen::VectorXd density)
        : support_(support), density_(std::move(density)) {
        if (density_.size() < 200)
            throw GridTooSmall("PhasePosterior: grid must have >= 200 points");
        const double s = density_.sum() * cell();
        if (std::abs(s - 1.0) > 1e-9)
            throw NotPositive("PhasePosterior: density integrates to " +
                              std::to_string(s));
    }

    const Eigen::VectorXd& density() const { return density_; }
    const PriorSupport& support() const { return support_; }
    int size() const { return int(density_.size()); }
    double cell() const { return (support_.hi - support_.lo) / density_.size(); }
    double phase(int g) const { return support_.lo + (g + 0.5) * cell(); }

    double mean() const {
        double m = 0;
        for (int g = 0; g < size(); ++g) m += phase(g) * density_(g);
        return m * cell();
    }

    double sigma() const {
        const double m = mean();
        double v = 0;
        for (int g = 0; g < size(); ++g) {
            const double d = phase(g) - m;
            v += d * d * density_(g);
        }
        return std::sqrt(v * cell());
    }

  private:
    PriorSupport support_;
    Eigen::VectorXd density_;
};

namespace detail {

// Likelihood table P(outcome k | phi_g) for all grid phases, outcomes indexed
// k = m * dim + n.
inline Eigen::MatrixXd likelihood_table(const Probe& x, const PriorSupport& support,
                                        int grid_size) {
    const FockSpace& space = std::visit([](const auto& v) -> const FockSpace& {
        return v.space();
    }, x);
    const int d = space.dim;
    Eigen::MatrixXd table(Eigen::Index(d) * d, grid_size);
    const double cell = (support.hi - support.lo) / grid_size;
    for (int g = 0; g < grid_size; ++g) {
        const double phi = support.lo + (g + 0.5) * cell;
        table.col(g) = measurement_distribution(x, phi).probs();
    }
    return table;
}

inline int sample_outcome(const Eigen::VectorXd& probs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng) * probs.sum();
    for (Eigen::Index k = 0; k < probs.size(); ++k) {
        u -= probs(k);
        if (u <= 0) return int(k);
    }
    return int(probs.size() - 1);
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                      std::uint32_t(trial), std::uint32_t(trial >> 32)};
    return std::mt19937_64(seq);
}

inline PhasePosterior run_trial(const Eigen::MatrixXd& table,
                                const Eigen::VectorXd& truth, int mu,
                                const PriorSupport& support, std::mt19937_64& rng) {
    const int grid_size = int(table.cols());
    const double cell = (support.hi - support.lo) / grid_size;
    Eigen::VectorXd post = Eigen::VectorXd::Constant(grid_size, 1.0 / (grid_size * cell));
    for (int i = 0; i < mu; ++i) {
        const int k = sample_outcome(truth, rng);
        post = post.cwiseProduct(table.row(k).transpose());
        const double s = post.sum() * cell;
        if (s <= 0)
            throw ZeroLikelihood("bayes_trial: sampled outcome has zero likelihood on "
                                 "the whole grid");
        post /= s;
    }
    return PhasePosterior(support, std::move(post));
}

}  // namespace detail

inline PhasePosterior bayes_trial(const Probe& x, double phi_true, int mu,
                                  int grid_size, std::uint64_t seed,
                                  PriorSupport support = {}) {
    if (phi_true < support.lo || phi_true > support.hi)
        throw OutOfRange("bayes_trial: phi_true outside prior support");
    const Eigen::MatrixXd table = detail::likelihood_table(x, support, grid_size);
    const Eigen::VectorXd truth = measurement_distribution(x, phi_true).probs();
    std::mt19937_64 rng = detail::trial_rng(seed, 0);
    return detail::run_trial(table, truth, mu, support, rng);
}

struct BayesReport {
    double phi_true = 0;
    int mu = 0;
    int trials = 0;
    double mean_sigma = 0;
    double crb_reference = 0;
    std::uint64_t seed = 0;
    std::vector<double> trial_sigmas;

    static std::string csv_header() {
        return "trial,phi_true,mu,sigma,mean_sigma,crb_reference,seed\n";
    }
    std::string csv_rows() const {
        std::string out;
        for (size_t t = 0; t < trial_sigmas.size(); ++t)
            out += csv_join({std::to_string(t), csv_num(phi_true), std::to_string(mu),
                             csv_num(trial_sigmas[t]), csv_num(mean_sigma),
                             csv_num(crb_reference), std::to_string(seed)});
        return out;
    }
};

inline BayesReport bayes_ensemble(const Probe& x, double phi_true, int mu, int trials,
                                  int grid_size, std::uint64_t seed,
                                  PriorSupport support = {}) {
    if (trials < 1) throw OutOfRange("bayes_ensemble: trials must be >= 1");
    if (phi_true < support.lo || phi_true > support.hi)
        throw OutOfRange("bayes_ensemble: phi_true outside prior support");
    const Eigen::MatrixXd table = detail::likelihood_table(x, support, grid_size);
    const Eigen::VectorXd truth = measurement_distribution(x, phi_true).probs();

    BayesReport report;
    report.phi_true = phi_true;
    report.mu = mu;
    report.trials = trials;
    report.seed = seed;
    report.trial_sigmas.reserve(trials);
    double acc = 0;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng = detail::trial_rng(seed, std::uint64_t(t));
        const double s = detail::run_trial(table, truth, mu, support, rng).sigma();
        report.trial_sigmas.push_back(s);
        acc += s;
    }
    report.mean_sigma = acc / trials;
    if (mu >= 1) report.crb_reference = crb(qfi(x), mu);
    return report;
}

}  // namespace qmet
