#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <cmath>

#include "qmet/loss.hpp"
#include "qmet/metrology.hpp"
#include "qmet/states.hpp"

using namespace qmet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("LossSpec JSON") {
    const nlohmann::json j = LossSpec{0.8, 0.9};
    CHECK(j.at("eta_a") == 0.8);
    const LossSpec back = j.get<LossSpec>();
    CHECK(back.eta_b == 0.9);
    const nlohmann::json bad{{"eta_a", 1.5}};
    CHECK_THROWS_AS(bad.get<LossSpec>(), ConfigError);
}

TEST_CASE("Kraus operators") {
    SECTION("eta = 1 keeps only the identity") {
        const FockSpace sp(10);
        const auto ops = kraus_set(sp, 1.0);
        CHECK((ops[0].mat() - Mat::Identity(sp.dim, sp.dim)).cwiseAbs().maxCoeff() <
              1e-14);
        for (size_t k = 1; k < ops.size(); ++k)
            CHECK(ops[k].mat().cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("completeness at eta = 0.73, dim 30") {
        const FockSpace sp(30);
        Mat sum = Mat::Zero(sp.dim, sp.dim);
        for (const ModeOperator& k : kraus_set(sp, 0.73))
            sum += k.mat().adjoint() * k.mat();
        CHECK((sum - Mat::Identity(sp.dim, sp.dim)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SECTION("eta = 0 maps everything to vacuum") {
        const FockSpace sp(20);
        const TwoModeDensity out = apply_loss(noon(sp, 3), LossSpec{0.0, 0.0});
        CHECK_THAT(out.mat()(0, 0).real(), WithinAbs(1.0, 1e-12));
        CHECK_THAT(mean_photons(out), WithinAbs(0.0, 1e-12));
    }
    SECTION("eta out of range") {
        CHECK_THROWS_AS(kraus_set(FockSpace(5), 1.2), OutOfRange);
    }
}

TEST_CASE("apply_loss") {
    SECTION("eta = 1 is the pure projector") {
        const FockSpace sp(35);
        const TwoModeState psi = ses(sp, 0.6);
        const TwoModeDensity rho = apply_loss(psi, LossSpec{});
        const Mat proj = psi.amp() * psi.amp().adjoint();
        CHECK((rho.mat() - proj).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("coherent states stay coherent") {
        const FockSpace sp(30);
        const double alpha = 1.3, eta = 0.6;
        const TwoModeDensity rho =
            apply_loss(tensor(coherent(sp, alpha), vacuum(sp)), LossSpec{eta, 1.0});
        const TwoModeState target =
            tensor(coherent(sp, std::sqrt(eta) * alpha), vacuum(sp));
        const double fid = (target.amp().adjoint() * rho.mat() * target.amp())(0).real();
        CHECK(fid > 1.0 - 1e-9);
    }
    SECTION("mean photons scales linearly with eta") {
        const FockSpace sp(40);
        const TwoModeState psi = two_mode_scs(sp, 0.4, 1.0);
        const double n0 = mean_photons(psi);
        for (double eta : {0.9, 0.6, 0.3})
            CHECK_THAT(mean_photons(apply_loss(psi, LossSpec{eta, eta})),
                       WithinRel(eta * n0, 1e-9));
    }
    SECTION("trace preserved on an 11-point eta grid") {
        const FockSpace sp(24, 1e-5);
        const TwoModeState psi = ssv(sp, 0.5);
        for (int i = 0; i <= 10; ++i) {
            const double eta = i / 10.0;
            const TwoModeDensity rho = apply_loss(psi, LossSpec{eta, eta});
            CHECK_THAT(rho.mat().trace().real(), WithinAbs(1.0, 1e-9));
            CHECK(rho.min_eigenvalue() > -1e-10);
        }
    }
    SECTION("semigroup composition") {
        const FockSpace sp(30);
        const TwoModeState psi =
            two_mode_scs(sp, 0.2, 0.660);  // near the nbar = 1 optimum
        const TwoModeDensity two_step =
            apply_loss(apply_loss(psi, LossSpec{0.9, 0.9}), LossSpec{0.8, 0.8});
        const TwoModeDensity one_step = apply_loss(psi, LossSpec{0.72, 0.72});
        CHECK((two_step.mat() - one_step.mat()).cwiseAbs().maxCoeff() < 1e-8);
    }
    SECTION("asymmetric loss acts on the named mode") {
        const FockSpace sp(15);
        const TwoModeState psi = tensor(coherent(sp, 1.0), coherent(sp, 1.0));
        const TwoModeDensity rho = apply_loss(psi, LossSpec{0.5, 1.0});
        const PhotonMoments m = photon_moments(rho);
        CHECK_THAT(m.mean_a, WithinRel(0.5, 1e-9));
        CHECK_THAT(m.mean_b, WithinRel(1.0, 1e-9));
    }
}
