#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "qmet/estimation.hpp"
#include "qmet/loss.hpp"
#include "qmet/metrology.hpp"
#include "qmet/states.hpp"

using namespace qmet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("optimizer closed-form families") {
    const FockSpace sp(40);
    SECTION("separable squeezed vacuum at nbar = 1") {
        const OptimizationResult r =
            optimize_at_nbar(sp, StateFamily::SSV, 1.0, LossSpec{}, Merit::QFI);
        CHECK_THAT(r.figure_of_merit, WithinRel(3.0, 1e-6));
        CHECK_THAT(r.nbar_achieved, WithinAbs(1.0, 1e-4));
    }
    SECTION("NOON at nbar = 1 is the shot-noise anchor") {
        const OptimizationResult r =
            optimize_at_nbar(sp, StateFamily::NOON, 1.0, LossSpec{}, Merit::QFI);
        CHECK_THAT(r.figure_of_merit, WithinRel(1.0, 1e-9));
    }
    SECTION("coherent light at nbar = 2") {
        const OptimizationResult r =
            optimize_at_nbar(sp, StateFamily::Coherent, 2.0, LossSpec{}, Merit::QFI);
        CHECK_THAT(r.figure_of_merit, WithinRel(2.0, 1e-6));
        CHECK_THAT(r.best_alpha, WithinRel(std::sqrt(2.0), 1e-6));
    }
    SECTION("non-integer NOON target is unachievable") {
        CHECK_THROWS_AS(
            optimize_at_nbar(sp, StateFamily::NOON, 1.5, LossSpec{}, Merit::QFI),
            Unachievable);
    }
}

TEST_CASE("optimizer searched families") {
    const FockSpace sp(80);
    const OptimizationResult r =
        optimize_at_nbar(sp, StateFamily::SqueezedCat, 1.0, LossSpec{}, Merit::QFI);
    SECTION("beats the squeezed-entangled benchmark at nbar = 1") {
        CHECK(r.figure_of_merit >= 6.854);
        CHECK_THAT(r.nbar_achieved, WithinAbs(1.0, 1e-4));
    }
    SECTION("constraint satisfied when parameters are rebuilt") {
        const TwoModeState psi = two_mode_scs(sp, r.best_z, r.best_alpha);
        CHECK_THAT(mean_photons(psi), WithinAbs(1.0, 1e-4));
    }
    SECTION("no random constraint-satisfying point beats the optimum") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> zs(-1.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            const double z = zs(rng);
            const auto roots = detail::solve_alpha_roots(
                StateFamily::SqueezedCat, z, 1.0, 3.0);
            for (const double a : roots) {
                const double f = scs_qfi_closed(z, a).qfi;
                CHECK(f <= r.figure_of_merit * (1.0 + 1e-4));
            }
        }
    }
}

TEST_CASE("optimizer respects loss and merit choices") {
    const FockSpace sp(24, 1e-5);
    const LossSpec loss{0.8, 0.8};
    const OptimizationResult q =
        optimize_at_nbar(sp, StateFamily::SSV, 1.0, loss, Merit::QFI);
    CHECK(q.figure_of_merit < 3.0);
    CHECK(q.figure_of_merit > 0.0);
    const OptimizationResult c =
        optimize_at_nbar(sp, StateFamily::SSV, 1.0, loss, Merit::CFI_best_phi);
    CHECK(c.figure_of_merit <= q.figure_of_merit * (1.0 + 1e-6));
}

TEST_CASE("OptimizationResult CSV") {
    CHECK(OptimizationResult::csv_header() ==
          "state_family,best_alpha,best_z,nbar,eta,figure_of_merit\n");
    OptimizationResult r;
    r.family = StateFamily::SSV;
    r.figure_of_merit = 3.0;
    CHECK(r.csv_row().find("SSV,") == 0);
}

TEST_CASE("phase posterior") {
    SECTION("grid floor") {
        CHECK_THROWS_AS(
            PhasePosterior({}, Eigen::VectorXd::Constant(100, 2.0 / M_PI)),
            GridTooSmall);
    }
    SECTION("flat prior moments") {
        const int g = 1024;
        const double cell = 0.5 * M_PI / g;
        const PhasePosterior flat({}, Eigen::VectorXd::Constant(g, 1.0 / (g * cell)));
        CHECK_THAT(flat.mean(), WithinRel(0.25 * M_PI, 1e-9));
        CHECK_THAT(flat.sigma(), WithinRel(0.5 * M_PI / std::sqrt(12.0), 1e-4));
    }
}

TEST_CASE("Bayesian trials") {
    const FockSpace sp(24, 1e-5);
    const Probe probe(ssv(sp, std::asinh(std::sqrt(0.5))));  // nbar = 1
    SECTION("mu = 0 returns the flat prior") {
        const PhasePosterior post = bayes_trial(probe, 0.6, 0, 1024, 42);
        CHECK_THAT(post.sigma(), WithinRel(0.5 * M_PI / std::sqrt(12.0), 1e-4));
    }
    SECTION("vacuum probe learns nothing") {
        const Probe blind(tensor(vacuum(sp), vacuum(sp)));
        const PhasePosterior post = bayes_trial(blind, 0.6, 50, 1024, 42);
        CHECK_THAT(post.sigma(), WithinRel(0.5 * M_PI / std::sqrt(12.0), 1e-4));
    }
    SECTION("posterior narrows with data and brackets the truth") {
        const PhasePosterior post = bayes_trial(probe, 0.6, 200, 1024, 42);
        CHECK(post.sigma() < 0.1);
        CHECK(std::abs(post.mean() - 0.6) < 5.0 * post.sigma() + 0.05);
    }
    SECTION("phi_true outside the prior support") {
        CHECK_THROWS_AS(bayes_trial(probe, 2.0, 10, 1024, 42), OutOfRange);
    }
}

TEST_CASE("Bayesian ensembles") {
    const FockSpace sp(24, 1e-5);
    const Probe probe(ssv(sp, std::asinh(std::sqrt(0.5))));
    SECTION("trials = 1 reduces to a single trial") {
        const BayesReport r = bayes_ensemble(probe, 0.6, 50, 1, 1024, 7);
        const PhasePosterior single = bayes_trial(probe, 0.6, 50, 1024, 7);
        REQUIRE(r.trial_sigmas.size() == 1);
        CHECK_THAT(r.mean_sigma, WithinRel(single.sigma(), 1e-12));
        // the dim-24 probe carries slightly less than the closed-form QFI of 3
        CHECK_THAT(r.crb_reference, WithinRel(crb(3.0, 50), 2e-4));
    }
    SECTION("fixed seed reproduces byte-identical reports") {
        const BayesReport a = bayes_ensemble(probe, 0.6, 30, 5, 512, 99);
        const BayesReport b = bayes_ensemble(probe, 0.6, 30, 5, 512, 99);
        CHECK(a.csv_rows() == b.csv_rows());
    }
    SECTION("different seeds decorrelate") {
        const BayesReport a = bayes_ensemble(probe, 0.6, 30, 5, 512, 99);
        const BayesReport b = bayes_ensemble(probe, 0.6, 30, 5, 512, 100);
        CHECK(a.csv_rows() != b.csv_rows());
    }
    SECTION("CSV shape") {
        const BayesReport r = bayes_ensemble(probe, 0.6, 10, 3, 512, 1);
        CHECK(BayesReport::csv_header() ==
              "trial,phi_true,mu,sigma,mean_sigma,crb_reference,seed\n");
        const std::string rows = r.csv_rows();
        CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);
    }
}
