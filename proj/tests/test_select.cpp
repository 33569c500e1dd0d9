#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mixsel/errors.hpp"
#include "mixsel/init.hpp"
#include "mixsel/select.hpp"
#include "mixsel/simdata.hpp"
#include "test_support.hpp"

using namespace mixsel;
using test_support::vec2;

TEST_CASE("bic_value complexity term") {
    DatasetSpec spec = example1_spec(600, 1);
    const Matrix data = generate(spec);
    const MixtureModel& truth = spec.truth;  // M = 3, d = 2
    const double complexity = log_likelihood(truth, data) - bic_value(truth, data);
    CHECK(complexity == doctest::Approx(0.5 * 3 * 6 * std::log(600.0)).epsilon(1e-12));
    CHECK(complexity == doctest::Approx(57.5721).epsilon(1e-4));

    // n = 1: log 1 = 0
    Matrix row(1, 2);
    row << 0.1, 0.2;
    CHECK(bic_value(truth, row) == log_likelihood(truth, row));
}

TEST_CASE("bic differences are exactly the complexity step") {
    DatasetSpec spec = example1_spec(200, 2);
    const Matrix data = generate(spec);

    // duplicating a component with split weights leaves the density unchanged
    Vector w1(1);
    w1 << 1.0;
    const MixtureModel m1(w1, {spec.truth.component(0)});
    Vector w2(2);
    w2 << 0.5, 0.5;
    const MixtureModel m2(w2, {spec.truth.component(0), spec.truth.component(0)});
    Vector w3(3);
    w3 << 0.5, 0.25, 0.25;
    const MixtureModel m3(w3, {spec.truth.component(0), spec.truth.component(0),
                               spec.truth.component(0)});

    const double step = 0.5 * 6.0 * std::log(200.0);
    CHECK(bic_value(m1, data) - bic_value(m2, data) == doctest::Approx(step).epsilon(1e-10));
    CHECK(bic_value(m2, data) - bic_value(m3, data) == doctest::Approx(step).epsilon(1e-10));
    CHECK(bic_value(m1, data) > bic_value(m2, data));
    CHECK(bic_value(m2, data) > bic_value(m3, data));
}

TEST_CASE("lambda_grid") {
    const std::vector<double> grid = lambda_grid(600, 10, 6, 20);
    REQUIRE(grid.size() == 20);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    CHECK(grid.front() == doctest::Approx(0.01 / std::sqrt(600.0)).epsilon(1e-12));
    CHECK(grid.back() < 1.0 / 60.0);

    // a point within a factor of two of sqrt(log n / n)/D_f
    const double target = std::sqrt(std::log(600.0) / 600.0) / 6.0;
    CHECK(target == doctest::Approx(0.0173).epsilon(2e-3));
    const bool covered = std::any_of(grid.begin(), grid.end(), [&](double l) {
        return l >= target / 2.0 && l <= target * 2.0;
    });
    CHECK(covered);

    const std::vector<double> two = lambda_grid(600, 10, 6, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == doctest::Approx(0.01 / std::sqrt(600.0)).epsilon(1e-12));
    CHECK(two[1] == doctest::Approx(0.9 / 60.0).epsilon(1e-12));

    CHECK_THROWS_AS(lambda_grid(600, 10, 6, 1), EmptyRange);
    CHECK_THROWS_AS(lambda_grid(600, 1000, 6, 10), EmptyRange);  // bounds cross
}

TEST_CASE("scad grid spans past the log-eps cap") {
    const std::vector<double> scad_grid = scad_lambda_grid(600, 6, 20);
    CHECK(scad_grid.back() == doctest::Approx(0.075).epsilon(1e-12));
    const PenaltySpec tmpl = PenaltySpec::scad_log(0.0, 2);
    CHECK(lambda_grid_for(tmpl, 600, 10, 20) == scad_grid);
    const PenaltySpec log_tmpl = PenaltySpec::log_eps(0.0, 2);
    CHECK(lambda_grid_for(log_tmpl, 600, 10, 20) == lambda_grid(600, 10, 6, 20));
}

TEST_CASE("select_lambda degenerate grid and ordering invariance") {
    DatasetSpec spec = example1_spec(240, 3);
    const Matrix data = generate(spec);
    const PenaltySpec tmpl = PenaltySpec::log_eps(0.0, 2);

    Rng rng(4);
    const SelectionResult one = select_lambda(data, 4, tmpl, {0.004}, EMConfig{}, rng);
    CHECK(one.best_lambda == 0.004);
    CHECK(one.per_lambda.size() == 1);

    Rng ra(5), rb(5);
    const std::vector<double> grid = lambda_grid(240, 4, 6, 8);
    std::vector<double> shuffled(grid.rbegin(), grid.rend());
    const SelectionResult fwd = select_lambda(data, 4, tmpl, grid, EMConfig{}, ra);
    const SelectionResult rev = select_lambda(data, 4, tmpl, shuffled, EMConfig{}, rb);
    CHECK(fwd.best_lambda == rev.best_lambda);
    CHECK(fwd.best_model.order() == rev.best_model.order());
}

TEST_CASE("select_lambda picks the BIC argmax with ties toward larger lambda") {
    DatasetSpec spec = example1_spec(300, 6);
    const Matrix data = generate(spec);
    Rng rng(7);
    const std::vector<double> grid = lambda_grid(300, 6, 6, 10);
    const SelectionResult sel =
        select_lambda(data, 6, PenaltySpec::log_eps(0.0, 2), grid, EMConfig{}, rng);
    double best = -std::numeric_limits<double>::infinity();
    double best_lambda = 0.0;
    for (const LambdaOutcome& o : sel.per_lambda) {
        if (!o.failed && o.bic >= best) {
            best = o.bic;
            best_lambda = o.lambda;
        }
    }
    CHECK(sel.best_lambda == best_lambda);
}

TEST_CASE("tiny lambda keeps every initial component that carries mass") {
    // M_init equals the true order; nothing should be pruned at lambda -> 0
    Rng data_rng(8);
    Vector w(3);
    w << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
    const MixtureModel truth(w, {{vec2(-8.0, 0.0), Matrix::Identity(2, 2)},
                                 {vec2(8.0, 0.0), Matrix::Identity(2, 2)},
                                 {vec2(0.0, 8.0), Matrix::Identity(2, 2)}});
    const Matrix data = sample_mixture(truth, 300, data_rng);
    Rng rng(9);
    const MixtureModel init = init_from_kmeans(data, 3, 0.0, rng);
    const auto [model, trace] =
        fit_penalized(data, init, PenaltySpec::log_eps(1e-8, 2), EMConfig{});
    CHECK(model.order() == 3);
    CHECK(trace.total_pruned() == 0);
}

TEST_CASE("aic_bic_search on single-Gaussian data selects one component") {
    DatasetSpec spec = single_gaussian_spec(300, 10);
    const Matrix data = generate(spec);
    for (OrderCriterion crit : {OrderCriterion::AIC, OrderCriterion::BIC}) {
        Rng rng(11);
        const OrderSearchResult res = aic_bic_search(data, 3, EMConfig{}, rng, crit);
        CHECK(res.selected_order == 1);
        CHECK(res.per_order.size() == 3);
    }
}

TEST_CASE("aic_bic_search M_max guards") {
    DatasetSpec spec = single_gaussian_spec(100, 12);
    const Matrix data = generate(spec);
    Rng rng(13);
    const OrderSearchResult res = aic_bic_search(data, 1, EMConfig{}, rng, OrderCriterion::BIC);
    CHECK(res.selected_order == 1);

    Rng rng2(14);
    CHECK_THROWS_AS(aic_bic_search(data, 51, EMConfig{}, rng2, OrderCriterion::BIC),
                    InitTooManyComponents);
}

TEST_CASE("selection csv export") {
    DatasetSpec spec = example1_spec(200, 15);
    const Matrix data = generate(spec);
    Rng rng(16);
    const SelectionResult sel = select_lambda(data, 4, PenaltySpec::log_eps(0.0, 2),
                                              lambda_grid(200, 4, 6, 5), EMConfig{}, rng);
    std::ostringstream out;
    write_selection_csv(sel, out);
    std::istringstream lines(out.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "lambda,M_hat,BIC,loglik");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == 5);
}
