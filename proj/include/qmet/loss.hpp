#pragma once

// Photon loss as independent fictitious beam splitters of transmissivity
// eta_a, eta_b on the two arms, implemented as a Kraus channel per mode.

#include <nlohmann/json.hpp>

#include <cmath>
#include <vector>

#include "qmet/fock.hpp"
#include "qmet/states.hpp"

namespace qmet {

struct LossSpec {
    double eta_a = 1.0;
    double eta_b = 1.0;
};

inline void to_json(nlohmann::json& j, const LossSpec& l) {
    j = nlohmann::json{{"eta_a", l.eta_a}, {"eta_b", l.eta_b}};
}

inline void from_json(const nlohmann::json& j, LossSpec& l) {
    l.eta_a = j.value("eta_a", 1.0);
    l.eta_b = j.value("eta_b", 1.0);
    if (l.eta_a < 0 || l.eta_a > 1 || l.eta_b < 0 || l.eta_b > 1)
        throw ConfigError("LossSpec: eta_a, eta_b must lie in [0, 1]");
}

namespace detail {

// <n-k|K_k|n> = sqrt(C(n,k)) eta^{(n-k)/2} (1-eta)^{k/2}.  Written with the
// surviving photon number m = n - k: coef(k, m) = sqrt(C(m+k,k)) * ...
inline double kraus_coef(double eta, int k, int m) {
    double binom = 1.0;
    for (int i = 1; i <= k; ++i) binom *= double(m + i) / i;
    return std::sqrt(binom) * std::pow(eta, 0.5 * m) * std::pow(1.0 - eta, 0.5 * k);
}

// Loss on one mode of a two-mode density matrix.  Each Kraus operator K_k is
// supported on a single superdiagonal, so the channel is a sum of weighted
// block (mode a) or in-block (mode b) shifts; no dim^2 x dim^2 operator
// products are formed.
inline Mat lossy_mode_a(const Mat& rho, int d, double eta) {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (int k = 0; k < d; ++k) {
        if (k > 0 && eta == 1.0) break;
        for (int m = 0; m + k < d; ++m) {
            const double am = kraus_coef(eta, k, m);
            for (int mp = 0; mp + k < d; ++mp) {
                const double w = am * kraus_coef(eta, k, mp);
                out.block(Eigen::Index(m) * d, Eigen::Index(mp) * d, d, d) +=
                    w * rho.block(Eigen::Index(m + k) * d, Eigen::Index(mp + k) * d, d, d);
            }
        }
    }
    return out;
}

inline Mat lossy_mode_b(const Mat& rho, int d, double eta) {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (int l = 0; l < d; ++l) {
        if (l > 0 && eta == 1.0) break;
        Eigen::VectorXd b(d - l);
        for (int n = 0; n + l < d; ++n) b(n) = kraus_coef(eta, l, n);
        const auto bd = b.asDiagonal();
        for (int m = 0; m < d; ++m)
            for (int mp = 0; mp < d; ++mp)
                out.block(Eigen::Index(m) * d, Eigen::Index(mp) * d, d - l, d - l) +=
                    bd *
                    rho.block(Eigen::Index(m) * d + l, Eigen::Index(mp) * d + l, d - l,
                              d - l) *
                    bd;
    }
    return out;
}

}  // namespace detail

// Explicit Kraus operators, mainly for completeness checks in tests; the
// channel itself uses the shift structure directly.
inline std::vector<ModeOperator> kraus_set(const FockSpace& space, double eta) {
    if (eta < 0 || eta > 1) throw OutOfRange("kraus_set: eta must lie in [0, 1]");
    std::vector<ModeOperator> ops;
    ops.reserve(space.dim);
    for (int k = 0; k < space.dim; ++k) {
        Mat kk = Mat::Zero(space.dim, space.dim);
        for (int m = 0; m + k < space.dim; ++m)
            kk(m, m + k) = detail::kraus_coef(eta, k, m);
        ops.emplace_back(space, std::move(kk));
    }
    return ops;
}

inline TwoModeDensity apply_loss(const TwoModeDensity& rho, const LossSpec& loss) {
    if (loss.eta_a < 0 || loss.eta_a > 1 || loss.eta_b < 0 || loss.eta_b > 1)
        throw OutOfRange("apply_loss: eta must lie in [0, 1]");
    const int d = rho.space().dim;
    Mat m = detail::lossy_mode_a(rho.mat(), d, loss.eta_a);
    m = detail::lossy_mode_b(m, d, loss.eta_b);
    return TwoModeDensity(rho.space(), std::move(m));
}

inline TwoModeDensity apply_loss(const TwoModeState& psi, const LossSpec& loss) {
    return apply_loss(pure_density(psi), loss);
}

inline TwoModeDensity apply_loss(const Probe& x, const LossSpec& loss) {
    return std::visit([&](const auto& v) { return apply_loss(v, loss); }, x);
}

}  // namespace qmet
