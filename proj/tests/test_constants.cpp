#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "mpgame/constants.hpp"
#include "mpgame/errors.hpp"

using namespace mpgame;

namespace {

// Reference values computed independently with mpmath at 60 digits (gamma=1).
// lambda_hat carries the decimal-vs-double gap of the 0.99 pad, so its
// comparison tolerance is looser than the others.
const char* kR1 =
    "0.61803398874989484820458683436563811772030917980576286213544862270526046281890244970721";
const char* kLambdaHat = "2.706185590364246944121926683739544577356";
const char* kRungLimit1000 = "1.005604784813628025126667798581442396353";

HPReal dec(const char* s) { return HPReal::from_decimal(s, 320); }

bool near(const HPReal& a, const HPReal& b, long log2tol) {
    return (a - b).abs() <= HPReal::pow2(log2tol, 64);
}

std::shared_ptr<const MPMap> make_map(long gamma) {
    return std::make_shared<const MPMap>(HPReal(gamma));
}

MPParams params_for(long gamma) { return MPMap(HPReal(gamma)).params(); }

}  // namespace

TEST_CASE("fitted constants at the first exponent") {
    auto map = make_map(1);
    ConstantsEstimate est = estimate_constants(map->params(), 100, 30, 40);

    // The ladder sup is the reciprocal gap defect at n = 1, which is the
    // square of the golden ratio.
    HPReal phi2 = (HPReal(3L, 320) + HPReal(5L, 320).sqrt()) / 2;
    CHECK(near(est.C1_hat, phi2 * HPReal(1.1, 256), -240));

    // Every sampled distortion ratio stays below 1 on this range, so the
    // conservative floor carries the estimate.
    CHECK(est.C2_hat == HPReal(1.5));

    // C3 - C2 recovers gamma/r1 exactly by construction.
    HPReal t = map->gamma().with_prec(256) / map->r1().with_prec(256);
    CHECK(est.C3_hat - est.C2_hat == t);

    // The expansion floor sits on the first branch. The local map is fresh,
    // so its first p-pull matches the estimator's private one bit for bit.
    CHECK(est.lambda_hat == map->deriv(map->p(1, 256)) * HPReal(0.99, 256));
    CHECK(near(est.lambda_hat, dec(kLambdaHat), -50));

    CHECK(est.C4_hat == est.C3_hat * est.lambda_hat / (est.lambda_hat - HPReal(1L, 256)));
    CHECK(est.C4_hat > est.C3_hat);

    for (const HPReal* c : {&est.C1_hat, &est.C2_hat, &est.C3_hat, &est.C4_hat, &est.C5_hat})
        CHECK(*c >= HPReal(1L));
    CHECK(est.lambda_hat > HPReal(1L));
    CHECK(est.C5_hat >= HPReal(1.5));

    CHECK(est.N == 100);
    CHECK(est.depth == 30);
    CHECK(est.k_max == 40);
    CHECK(est.seed == 0xD15704710Aull);
}

TEST_CASE("ladder envelope is stable in the sample size") {
    HPReal c1_small = estimate_constants(params_for(1), 100, 5, 10).C1_hat;
    HPReal c1_large = estimate_constants(params_for(1), 1000, 5, 10).C1_hat;
    // The sup is attained at n = 1, so extending the scan changes nothing.
    CHECK(c1_small == c1_large);
}

TEST_CASE("estimates are deterministic") {
    ConstantsEstimate a = estimate_constants(params_for(1), 100, 10, 5);
    ConstantsEstimate b = estimate_constants(params_for(1), 100, 10, 5);
    CHECK(a.C1_hat == b.C1_hat);
    CHECK(a.C2_hat == b.C2_hat);
    CHECK(a.C3_hat == b.C3_hat);
    CHECK(a.C4_hat == b.C4_hat);
    CHECK(a.C5_hat == b.C5_hat);
    CHECK(a.lambda_hat == b.lambda_hat);
}

TEST_CASE("fitted constants at the second exponent") {
    auto map = make_map(2);
    ConstantsEstimate est = estimate_constants(map->params(), 100, 20, 10);
    HPReal t = map->gamma().with_prec(256) / map->r1().with_prec(256);
    CHECK(est.C3_hat - est.C2_hat == t);
    CHECK(est.C4_hat > est.C3_hat);
    CHECK(est.lambda_hat > HPReal(1L));
    for (const HPReal* c : {&est.C1_hat, &est.C2_hat, &est.C3_hat, &est.C4_hat, &est.C5_hat})
        CHECK(*c >= HPReal(1L));
}

TEST_CASE("estimator rejects undersized grids") {
    MPParams params = params_for(1);
    CHECK_THROWS_AS(estimate_constants(params, 50, 30, 40), DomainError);
    CHECK_THROWS_AS(estimate_constants(params, 100, 0, 40), DomainError);
    CHECK_THROWS_AS(estimate_constants(params, 100, 30, 0), DomainError);
}

TEST_CASE("asymptotics stay inside the certified band") {
    AsymptoticsReport rep = check_asymptotics(params_for(1), 1000);
    CHECK(rep.pass());
    CHECK(rep.rung_pass);
    CHECK(rep.gap_pass);
    CHECK(rep.N == 1000);
    CHECK(rep.train_n == 10);

    // n = 1 row: the rung defect is r_1 itself.
    REQUIRE(!rep.rows.empty());
    CHECK(rep.rows.front().n == 1);
    CHECK(near(rep.rows.front().rung_defect, dec(kR1), -250));

    CHECK(rep.rows.back().n == 1000);
    CHECK(near(rep.rung_limit, dec(kRungLimit1000), -120));

    // The certified band is tight: well under a factor 10 across.
    CHECK(rep.rung_hi / rep.rung_lo < HPReal(10L));
    CHECK(rep.gap_hi / rep.gap_lo < HPReal(10L));

    for (const auto& row : rep.rows) {
        CHECK(row.rung_defect >= rep.rung_lo);
        CHECK(row.rung_defect <= rep.rung_hi);
        CHECK(row.gap_defect >= rep.gap_lo);
        CHECK(row.gap_defect <= rep.gap_hi);
    }
}

TEST_CASE("asymptotics at the second exponent") {
    MPParams params = params_for(2);
    AsymptoticsReport rep = check_asymptotics(params, 300);
    CHECK(rep.pass());
    double limit = rep.rung_limit.to_double();
    CHECK(limit > 0.70);
    CHECK(limit < 0.72);
    CHECK_THROWS_AS(check_asymptotics(params, 50), DomainError);
}
