#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <cmath>

#include "qmet/metrology.hpp"
#include "qmet/states.hpp"

using namespace qmet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double single_mode_mean_photons(const SingleModeState& s) {
    double n = 0;
    for (int k = 0; k < s.space().dim; ++k) n += k * std::norm(s.amp()(k));
    return n;
}

}  // namespace

TEST_CASE("family names round-trip") {
    for (StateFamily f : {StateFamily::Coherent, StateFamily::SqueezedVacuum,
                          StateFamily::Cat, StateFamily::SqueezedCat, StateFamily::SES,
                          StateFamily::NOON, StateFamily::SVCS, StateFamily::SSV})
        CHECK(family_from_string(to_string(f)) == f);
    CHECK(family_from_string("SCS") == StateFamily::SqueezedCat);
    CHECK_THROWS_AS(family_from_string("Thermal"), ConfigError);
}

TEST_CASE("StateSpec JSON round-trip") {
    const StateSpec s{StateFamily::SqueezedCat, 1.2, -0.3, 0};
    const nlohmann::json j = s;
    CHECK(j.at("family") == "SqueezedCat");
    const StateSpec back = j.get<StateSpec>();
    CHECK(back.family == s.family);
    CHECK(back.alpha == s.alpha);
    CHECK(back.z == s.z);
    CHECK(back.N == s.N);
}

TEST_CASE("coherent state") {
    const FockSpace sp(30);
    SECTION("alpha = 0 is vacuum") {
        CHECK_THAT(std::abs(coherent(sp, 0.0).amp()(0)), WithinAbs(1.0, 1e-14));
    }
    SECTION("Poisson mean and variance at alpha = 1") {
        const TwoModeState t = tensor(coherent(sp, 1.0), vacuum(sp));
        const PhotonMoments m = photon_moments(t);
        CHECK_THAT(m.mean_a, WithinRel(1.0, 1e-10));
        CHECK_THAT(m.var_a, WithinRel(1.0, 1e-9));
    }
}

TEST_CASE("cat state") {
    const FockSpace sp(40);
    SECTION("alpha = 0 is vacuum") {
        CHECK_THAT(std::abs(cat(sp, 0.0).amp()(0)), WithinAbs(1.0, 1e-14));
    }
    SECTION("normalized with only even amplitudes at alpha = 2") {
        const SingleModeState c = cat(sp, 2.0);
        CHECK_THAT(c.amp().norm(), WithinAbs(1.0, 1e-12));
        for (int n = 1; n < sp.dim; n += 2) CHECK(std::abs(c.amp()(n)) < 1e-14);
    }
    SECTION("mean photons of the even cat") {
        const double a2 = 4.0;
        const double expect = a2 * (2.0 - 2.0 * std::exp(-2.0 * a2)) /
                              (2.0 + 2.0 * std::exp(-2.0 * a2));
        CHECK_THAT(single_mode_mean_photons(cat(sp, 2.0)), WithinRel(expect, 1e-9));
    }
}

TEST_CASE("squeezed cat state") {
    const FockSpace sp(40);
    SECTION("z = 0 reduces to the cat") {
        const Vec diff = squeezed_cat(sp, 0.0, 1.5).amp() - cat(sp, 1.5).amp();
        CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("alpha = 0 reduces to squeezed vacuum") {
        const Vec diff =
            squeezed_cat(sp, 0.6, 0.0).amp() - squeezed_vacuum_amplitudes(sp, 0.6).amp();
        CHECK(diff.cwiseAbs().maxCoeff() < 1e-10);
    }
    SECTION("only even amplitudes") {
        const SingleModeState c = squeezed_cat(sp, 0.5, 1.0);
        for (int n = 1; n < sp.dim; n += 2) CHECK(std::abs(c.amp()(n)) < 1e-14);
    }
    SECTION("mean photons matches half the two-mode closed form") {
        const double z = 0.6, alpha = 1.0;
        const ClosedForm cf = scs_qfi_closed(z, alpha);
        CHECK_THAT(single_mode_mean_photons(squeezed_cat(sp, z, alpha)),
                   WithinRel(0.5 * cf.nbar, 1e-9));
    }
}

TEST_CASE("two-mode squeezed cat") {
    const FockSpace sp(40);
    SECTION("z = alpha = 0 is |0,0>") {
        CHECK_THAT(std::abs(two_mode_scs(sp, 0.0, 0.0).amp()(0)), WithinAbs(1.0, 1e-14));
    }
    SECTION("mode swap leaves the state invariant") {
        const TwoModeState psi = two_mode_scs(sp, 0.4, 1.0);
        CHECK((psi.swapped_modes().amp() - psi.amp()).cwiseAbs().maxCoeff() < 1e-13);
    }
    SECTION("product state has zero photon covariance") {
        CHECK_THAT(photon_moments(two_mode_scs(sp, 0.4, 1.0)).cov,
                   WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("squeezed-entangled state") {
    const FockSpace sp(60);
    SECTION("z = 0 is |0,0>") {
        CHECK_THAT(std::abs(ses(sp, 0.0).amp()(0)), WithinAbs(1.0, 1e-14));
    }
    SECTION("mode-swap invariant") {
        const TwoModeState psi = ses(sp, 0.9);
        CHECK((psi.swapped_modes().amp() - psi.amp()).cwiseAbs().maxCoeff() < 1e-13);
    }
    SECTION("mean photons follows 2 N^2 sinh^2 z") {
        const double z = 0.9;
        const double nsq = 1.0 / (2.0 + 2.0 / std::cosh(z));
        CHECK_THAT(mean_photons(ses(FockSpace(80), z)),
                   WithinRel(2.0 * nsq * std::sinh(z) * std::sinh(z), 1e-9));
    }
    SECTION("golden-ratio cosh z gives nbar = 1") {
        const double z = std::acosh(0.5 * (1.0 + std::sqrt(5.0)));
        CHECK_THAT(mean_photons(ses(FockSpace(140), z)), WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("NOON state") {
    const FockSpace sp(12);
    SECTION("N = 0 is |0,0>") {
        CHECK_THAT(std::abs(noon(sp, 0).amp()(0)), WithinAbs(1.0, 1e-14));
    }
    SECTION("N = 1 single-photon superposition") {
        const TwoModeState psi = noon(sp, 1);
        CHECK_THAT(std::abs(psi.amp()(Eigen::Index(1) * sp.dim)),
                   WithinAbs(1.0 / std::sqrt(2.0), 1e-14));
        CHECK_THAT(mean_photons(psi), WithinAbs(1.0, 1e-12));
    }
    SECTION("QFI is N^2") {
        CHECK_THAT(qfi_pure(noon(sp, 3)), WithinRel(9.0, 1e-10));
    }
    SECTION("N out of range") {
        CHECK_THROWS_AS(noon(sp, 12), OutOfRange);
        CHECK_THROWS_AS(noon(sp, -1), OutOfRange);
    }
}

TEST_CASE("squeezed-vacuum plus coherent through a beam splitter") {
    const FockSpace sp(40);
    SECTION("alpha = z = 0 is |0,0>") {
        CHECK_THAT(std::abs(svcs(sp, 0.0, 0.0).amp()(0)), WithinAbs(1.0, 1e-14));
    }
    SECTION("mean photons is additive through the splitter") {
        CHECK_THAT(mean_photons(svcs(sp, 1.0, 0.5)),
                   WithinRel(1.0 + std::sinh(0.5) * std::sinh(0.5), 1e-9));
    }
    SECTION("coherent-only input is shot-noise limited") {
        CHECK_THAT(qfi_pure(svcs(sp, 1.0, 0.0)), WithinRel(1.0, 1e-8));
    }
}

TEST_CASE("separable squeezed vacuum") {
    const FockSpace sp(80);
    SECTION("z = 0 is |0,0>") {
        CHECK_THAT(std::abs(ssv(sp, 0.0).amp()(0)), WithinAbs(1.0, 1e-14));
    }
    SECTION("QFI follows nbar^2 + 2 nbar") {
        // second photon moments weight the truncation tail by n^2
        const double nbar = 2.0 * std::sinh(1.0) * std::sinh(1.0);
        CHECK_THAT(qfi_pure(ssv(sp, 1.0)), WithinRel(nbar * nbar + 2.0 * nbar, 1e-7));
    }
    SECTION("product state has zero covariance") {
        CHECK_THAT(photon_moments(ssv(sp, 1.0)).cov, WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("mean_photons basics") {
    const FockSpace sp(12);
    CHECK_THAT(mean_photons(tensor(vacuum(sp), vacuum(sp))), WithinAbs(0.0, 1e-14));
    CHECK_THAT(mean_photons(noon(sp, 4)), WithinAbs(4.0, 1e-12));
}

TEST_CASE("build_probe dispatch") {
    const FockSpace sp(40);
    const TwoModeState direct = two_mode_scs(sp, 0.4, 1.0);
    const TwoModeState via =
        build_probe(sp, StateSpec{StateFamily::SqueezedCat, 1.0, 0.4, 0});
    CHECK((direct.amp() - via.amp()).cwiseAbs().maxCoeff() < 1e-14);
    const TwoModeState n2 = build_probe(sp, StateSpec{StateFamily::NOON, 0, 0, 2});
    CHECK_THAT(qfi_pure(n2), WithinRel(4.0, 1e-12));
}
