#include <doctest.h>

#include <cmath>

#include "mixsel/penalty.hpp"
#include "mixsel/simdata.hpp"
#include "test_support.hpp"

using namespace mixsel;

TEST_CASE("free parameters per component") {
    CHECK(free_params_per_component(2) == 6);
    CHECK(free_params_per_component(1) == 3);
    CHECK(free_params_per_component(19) == 210);
}

TEST_CASE("scad piecewise values") {
    const double lambda = 0.1, a = 3.7;
    CHECK(scad(0.0, lambda, a) == 0.0);
    CHECK(scad(lambda / 2.0, lambda, a) == doctest::Approx(lambda / 2.0).epsilon(1e-15));
    CHECK(scad(a * lambda, lambda, a) ==
          doctest::Approx(lambda * (a + 1.0) / 2.0).epsilon(1e-14));
    CHECK(scad(10.0, lambda, a) == lambda * (a + 1.0) / 2.0);  // constant tail
    CHECK(scad(0.5, 0.0, a) == 0.0);
}

TEST_CASE("scad value equals the integral of its derivative") {
    const double lambda = 0.07, a = 3.7;
    for (double pi : {0.02, 0.07, 0.15, 0.259, a * lambda, 0.4}) {
        const double integral = test_support::simpson(
            [&](double t) { return t == 0.0 ? 1.0 : scad_derivative(t, lambda, a); }, 0.0, pi,
            20000);
        CHECK(scad(pi, lambda, a) == doctest::Approx(integral).epsilon(1e-7));
    }
}

TEST_CASE("scad continuity at the kinks") {
    const double lambda = 0.25, a = 3.7, h = 1e-12;
    CHECK(std::abs(scad(lambda - h, lambda, a) - scad(lambda + h, lambda, a)) <= 1e-11);
    CHECK(std::abs(scad(a * lambda - h, lambda, a) - scad(a * lambda + h, lambda, a)) <= 1e-11);
}

TEST_CASE("scad is nondecreasing") {
    const double lambda = 0.1, a = 3.7;
    double prev = 0.0;
    for (double pi = 0.0; pi <= 0.6; pi += 1e-3) {
        const double cur = scad(pi, lambda, a);
        CHECK(cur >= prev - 1e-15);
        prev = cur;
    }
}

TEST_CASE("scad derivative formula") {
    const double lambda = 0.1, a = 3.7;
    CHECK(scad_derivative(lambda / 2.0, lambda, a) == 1.0);
    CHECK(scad_derivative(2.0 * lambda, lambda, a) == doctest::Approx(1.7 / 2.7).epsilon(1e-14));
    CHECK(scad_derivative(a * lambda + 0.01, lambda, a) == 0.0);
    for (double pi = 0.01; pi < 0.6; pi += 0.013) {
        const double v = scad_derivative(pi, lambda, a);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("scad derivative matches finite differences off the kinks") {
    const double lambda = 0.2, a = 3.7, h = 1e-7;
    for (double pi = 0.005; pi < 1.0; pi += 0.0137) {
        if (std::abs(pi - lambda) < 1e-3 * lambda) continue;
        if (std::abs(pi - a * lambda) < 1e-3 * lambda) continue;
        const double fd = (scad(pi + h, lambda, a) - scad(pi - h, lambda, a)) / (2.0 * h);
        const double exact = scad_derivative(pi, lambda, a);
        const double err = std::abs(fd - exact) / std::max(std::abs(exact), 1e-3);
        CHECK(err < 1e-5);
    }
}

TEST_CASE("penalty_term anchors") {
    PenaltySpec spec = PenaltySpec::log_eps(0.1, 2);
    Vector zeros = Vector::Zero(3);
    CHECK(penalty_term(spec, zeros, 100) == 0.0);

    PenaltySpec off = PenaltySpec::log_eps(0.0, 2);
    Vector some(2);
    some << 0.4, 0.6;
    CHECK(penalty_term(off, some, 100) == 0.0);

    // n lambda D_f = 1, single unit weight
    PenaltySpec unit = PenaltySpec::log_eps(0.01 / 6.0, 2);  // lambda*D_f = 0.01
    Vector one(1);
    one << 1.0;
    const double expected = std::log((1e-6 + 1.0) / 1e-6);
    CHECK(penalty_term(unit, one, 100) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(penalty_term(unit, one, 100) == doctest::Approx(13.8155).epsilon(1e-5));
}

TEST_CASE("zero-weight components contribute exactly zero penalty") {
    Vector w(3);
    w << 0.4, 0.6, 0.0;
    Vector w2(2);
    w2 << 0.4, 0.6;
    for (PenaltySpec spec : {PenaltySpec::log_eps(0.03, 2), PenaltySpec::scad_log(0.03, 2)}) {
        CHECK(penalty_term(spec, w, 500) == penalty_term(spec, w2, 500));
    }
}

TEST_CASE("penalty_term is nondecreasing in each weight") {
    Rng rng(31);
    for (PenaltyKind kind : {PenaltyKind::LogEps, PenaltyKind::ScadLog}) {
        PenaltySpec spec = kind == PenaltyKind::LogEps ? PenaltySpec::log_eps(0.05, 2)
                                                       : PenaltySpec::scad_log(0.05, 2);
        for (int rep = 0; rep < 50; ++rep) {
            Vector w = test_support::random_simplex(4, rng);
            const int j = static_cast<int>(rng.below(4));
            Vector bumped = w;
            bumped[j] += 0.05;  // off the simplex, fine for monotonicity
            CHECK(penalty_term(spec, bumped, 100) >= penalty_term(spec, w, 100) - 1e-12);
        }
    }

    // strict increase below the SCAD saturation point
    PenaltySpec scad_spec = PenaltySpec::scad_log(0.05, 2);
    Vector lo(1), hi(1);
    lo << 0.10;
    hi << 0.12;  // both below a*lambda = 0.185
    CHECK(penalty_term(scad_spec, hi, 100) > penalty_term(scad_spec, lo, 100));
}

TEST_CASE("penalized_objective") {
    Rng rng(77);
    const MixtureModel model = test_support::random_model(2, 2, rng);
    const Matrix data = sample_mixture(model, 30, rng);

    PenaltySpec off = PenaltySpec::log_eps(0.0, 2);
    CHECK(penalized_objective(model, data, off) == log_likelihood(model, data));

    // single component closed form
    Vector one(1);
    one << 1.0;
    const MixtureModel single(one, {model.component(0)});
    PenaltySpec spec = PenaltySpec::log_eps(0.01, 2);
    const double expected = log_likelihood(single, data) -
                            30.0 * 0.01 * 6.0 * std::log((1e-6 + 1.0) / 1e-6);
    CHECK(penalized_objective(single, data, spec) == doctest::Approx(expected).epsilon(1e-12));

    // appending a zero-weight component changes nothing
    Vector padded(2);
    padded << 1.0, 0.0;
    const MixtureModel with_ghost(padded, {model.component(0), model.component(1)});
    CHECK(penalized_objective(with_ghost, data, spec) ==
          doctest::Approx(penalized_objective(single, data, spec)).epsilon(1e-13));

    // relabeling invariance
    Vector w = model.weights();
    Vector swapped(2);
    swapped << w[1], w[0];
    const MixtureModel relabeled(swapped, {model.component(1), model.component(0)});
    for (PenaltySpec s : {PenaltySpec::log_eps(0.02, 2), PenaltySpec::scad_log(0.02, 2)}) {
        CHECK(penalized_objective(model, data, s) ==
              doctest::Approx(penalized_objective(relabeled, data, s)).epsilon(1e-12));
    }
}
