#pragma once

// Constructors for the probe states compared in the interferometer study:
// coherent, cat, squeezed cat (SCS), squeezed-entangled (SES), NOON,
// coherent-plus-squeezed-vacuum (SVCS) and separable squeezed vacuum (SSV).

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <variant>

#include "qmet/fock.hpp"

namespace qmet {

enum class StateFamily { Coherent, SqueezedVacuum, Cat, SqueezedCat, SES, NOON, SVCS, SSV };

inline std::string to_string(StateFamily f) {
    switch (f) {
        case StateFamily::Coherent: return "Coherent";
        case StateFamily::SqueezedVacuum: return "SqueezedVacuum";
        case StateFamily::Cat: return "Cat";
        case StateFamily::SqueezedCat: return "SqueezedCat";
        case StateFamily::SES: return "SES";
        case StateFamily::NOON: return "NOON";
        case StateFamily::SVCS: return "SVCS";
        case StateFamily::SSV: return "SSV";
    }
    return "?";
}

inline StateFamily family_from_string(const std::string& s) {
    if (s == "Coherent") return StateFamily::Coherent;
    if (s == "SqueezedVacuum") return StateFamily::SqueezedVacuum;
    if (s == "Cat") return StateFamily::Cat;
    if (s == "SqueezedCat" || s == "SCS") return StateFamily::SqueezedCat;
    if (s == "SES") return StateFamily::SES;
    if (s == "NOON") return StateFamily::NOON;
    if (s == "SVCS") return StateFamily::SVCS;
    if (s == "SSV") return StateFamily::SSV;
    throw ConfigError("unknown state family: " + s);
}

// alpha is real non-negative, z real (either sign covers the squeezing
// orientation relative to the cat axis); only the fields meaningful for the
// family are read.
struct StateSpec {
    StateFamily family = StateFamily::Coherent;
    double alpha = 0.0;
    double z = 0.0;
    int N = 0;
};

inline void to_json(nlohmann::json& j, const StateSpec& s) {
    j = nlohmann::json{{"family", to_string(s.family)},
                       {"alpha", s.alpha},
                       {"z", s.z},
                       {"N", s.N}};
}

inline void from_json(const nlohmann::json& j, StateSpec& s) {
    s.family = family_from_string(j.at("family").get<std::string>());
    s.alpha = j.value("alpha", 0.0);
    s.z = j.value("z", 0.0);
    s.N = j.value("N", 0);
    if (s.alpha < 0) throw ConfigError("StateSpec: alpha must be >= 0");
    if (s.N < 0) throw ConfigError("StateSpec: N must be >= 0");
}

// ---------------------------------------------------------------------------
// Single-mode builders

// |alpha> with c_n = e^{-alpha^2/2} alpha^n / sqrt(n!), alpha real.
inline SingleModeState coherent(const FockSpace& space, double alpha) {
    if (alpha == 0.0) return vacuum(space);
    Vec c(space.dim);
    c(0) = std::exp(-0.5 * alpha * alpha);
    for (int n = 1; n < space.dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
    return SingleModeState(space, std::move(c));
}

// N (|alpha> + |-alpha>): even Fock levels only.
inline SingleModeState cat(const FockSpace& space, double alpha) {
    const SingleModeState plus = coherent(space, alpha);
    Vec c = Vec::Zero(space.dim);
    for (int n = 0; n < space.dim; n += 2) c(n) = 2.0 * plus.amp(n);
    return SingleModeState(space, std::move(c));
}

// S(z) applied to the cat, renormalized.
inline SingleModeState squeezed_cat(const FockSpace& space, double z, double alpha) {
    const SingleModeState c = cat(space, alpha);
    if (z == 0.0) return c;
    const ModeOperator s = squeeze(space, z);
    return SingleModeState(space, s.mat() * c.amp());
}

// ---------------------------------------------------------------------------
// Two-mode builders

inline TwoModeState two_mode_scs(const FockSpace& space, double z, double alpha) {
    const SingleModeState psi = squeezed_cat(space, z, alpha);
    return tensor(psi, psi);
}

inline TwoModeState ses(const FockSpace& space, double z) {
    const SingleModeState sz = squeezed_vacuum_amplitudes(space, z);
    const int d = space.dim;
    Vec out = Vec::Zero(Eigen::Index(d) * d);
    for (int n = 0; n < d; ++n) {
        out(Eigen::Index(n) * d + 0) += sz.amp(n);  // |z, 0>
        out(Eigen::Index(0) * d + n) += sz.amp(n);  // |0, z>
    }
    return TwoModeState(space, std::move(out));
}

inline TwoModeState noon(const FockSpace& space, int N) {
    if (N < 0 || N >= space.dim) throw OutOfRange("noon: need 0 <= N < dim");
    const int d = space.dim;
    Vec out = Vec::Zero(Eigen::Index(d) * d);
    if (N == 0) {
        out(0) = 1.0;
    } else {
        out(Eigen::Index(N) * d + 0) = M_SQRT1_2;
        out(Eigen::Index(0) * d + N) = M_SQRT1_2;
    }
    return TwoModeState(space, std::move(out));
}

inline TwoModeState svcs(const FockSpace& space, double alpha, double z) {
    const TwoModeState in = tensor(coherent(space, alpha), squeezed_vacuum_amplitudes(space, z));
    return apply_two_mode(*beam_splitter_5050(space), in);
}

inline TwoModeState ssv(const FockSpace& space, double z) {
    const SingleModeState sz = squeezed_vacuum_amplitudes(space, z);
    return tensor(sz, sz);
}

// Builds the two-mode probe described by a StateSpec.  Single-mode families
// are paired with vacuum in mode b and sent through the balanced splitter, so
// every probe is path-symmetric and carries its textbook relative-phase
// Fisher information (a coherent input gives exactly the shot-noise limit).
inline TwoModeState build_probe(const FockSpace& space, const StateSpec& s) {
    const auto split = [&](const SingleModeState& psi) {
        return apply_two_mode(*beam_splitter_5050(space), tensor(psi, vacuum(space)));
    };
    switch (s.family) {
        case StateFamily::Coherent: return split(coherent(space, s.alpha));
        case StateFamily::SqueezedVacuum:
            return split(squeezed_vacuum_amplitudes(space, s.z));
        case StateFamily::Cat: return split(cat(space, s.alpha));
        case StateFamily::SqueezedCat: return two_mode_scs(space, s.z, s.alpha);
        case StateFamily::SES: return ses(space, s.z);
        case StateFamily::NOON: return noon(space, s.N);
        case StateFamily::SVCS: return svcs(space, s.alpha, s.z);
        case StateFamily::SSV: return ssv(space, s.z);
    }
    throw ConfigError("build_probe: bad family");
}

// ---------------------------------------------------------------------------
// Mean total photon number <n_a + n_b>

inline double mean_photons(const TwoModeState& psi) {
    const Eigen::VectorXd pa = psi.marginal_a();
    const Eigen::VectorXd pb = psi.marginal_b();
    double s = 0;
    for (int n = 0; n < psi.space().dim; ++n) s += n * (pa(n) + pb(n));
    return s;
}

inline double mean_photons(const TwoModeDensity& rho) {
    const int d = rho.space().dim;
    const Eigen::VectorXd p = rho.diagonal_probs();
    double s = 0;
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) s += (m + n) * p(Eigen::Index(m) * d + n);
    return s;
}

using Probe = std::variant<TwoModeState, TwoModeDensity>;

inline double mean_photons(const Probe& x) {
    return std::visit([](const auto& v) { return mean_photons(v); }, x);
}

}  // namespace qmet
