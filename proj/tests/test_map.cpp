#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "mpgame/errors.hpp"
#include "mpgame/map.hpp"

using namespace mpgame;

namespace {

HPReal dec(const std::string& s, mpfr_prec_t prec = 256) { return HPReal::from_decimal(s, prec); }

bool near(const HPReal& a, const HPReal& b, long log2tol) {
    return (a - b).abs() <= HPReal::pow2(log2tol, a.prec());
}

// Values solved independently with 90-digit bisection/quadratics.
const char* kR1 = "0.61803398874989484820458683436563811772030917980576286213544862270526046281890244970721";
const char* kR2 = "0.43168341659057925307956913349073519941045434462473682676193539713482814746443494575881";
const char* kR3 = "0.32564121541416478216148443286462228361312926666165788196344747651171397421581091795293";
const char* kR4 = "0.25871023152068061600343447127109210049586401011040614826107392102742842337286542132019";
const char* kR5 = "0.21323925264996500752105266934274815225039812414016492117761537850414558413738176389216";
const char* kP1 = "0.86676039917386209299087206249471948351318466860982705289680775110152607790330220610132";
const char* kP2 = "0.7967973691331191365417739480997928148018276906352380182231316617615585729483053109015";
const char* kP3 = "0.75524548014090247197768476579385892030395511498030903839803271035780841488723628929978";
const char* kP4 = "0.72829566128057320269436055151908631933583595437923492242826605998130675992908066900098";
const char* kP5 = "0.70964426698511864915110254258728288222194903982341456887610677981479228248706471666417";
const char* kP6 = "0.69608395097654693649388559662563565223082191091597418372975732214629392319046776482631";
const char* kR1Gamma05 = "0.56984029099805326591139995811956864883979743912894022054473107965674719611746650331647";
const char* kR1Gamma2 = "0.68232780382801932736948373971104825689118858189799857780372860663989667868699802108173";

MPMap& unit_map() {
    static MPMap m(HPReal(1L, 256), 256);
    return m;
}

}  // namespace

TEST_CASE("branch cut for three exponents") {
    CHECK(near(unit_map().r1(), dec(kR1), -240));
    MPMap half(HPReal(0.5, 256), 256);
    CHECK(near(half.r1(), dec(kR1Gamma05), -160));
    MPMap two(HPReal(2L, 256), 256);
    CHECK(near(two.r1(), dec(kR1Gamma2), -155));
    CHECK_THROWS_AS(MPMap(HPReal(0L, 256), 256), DomainError);
    CHECK_THROWS_AS(MPMap(HPReal(-1L, 256), 256), DomainError);
}

TEST_CASE("ladder and branch-cut sequences match frozen references") {
    MPMap& m = unit_map();
    CHECK(m.r(0) == HPReal(1L));
    CHECK(m.p(0) == HPReal(1L));
    CHECK(near(m.r(2), dec(kR2), -195));
    CHECK(near(m.r(3), dec(kR3), -195));
    CHECK(near(m.r(4), dec(kR4), -195));
    CHECK(near(m.r(5), dec(kR5), -195));
    CHECK(near(m.p(1), dec(kP1), -195));
    CHECK(near(m.p(2), dec(kP2), -195));
    CHECK(near(m.p(3), dec(kP3), -195));
    CHECK(near(m.p(4), dec(kP4), -195));
    CHECK(near(m.p(5), dec(kP5), -195));
    CHECK(near(m.p(6), dec(kP6), -195));
}

TEST_CASE("sequences are strictly decreasing and stay in their ranges") {
    MPMap& m = unit_map();
    for (long n = 1; n <= 50; ++n) {
        CHECK(m.r(n) < m.r(n - 1));
        CHECK(m.r(n) > 0L);
        CHECK(m.p(n) < m.p(n - 1));
        CHECK(m.p(n) > m.r1());
    }
    // Defining relations: f(r_{n+1}) = r_n on the left branch, f(p_n) = r_n on the right.
    for (long n : {1L, 3L, 7L, 20L}) {
        CHECK(near(m.eval(m.r(n + 1)), m.r(n), -240));
        CHECK(near(m.eval(m.p(n)), m.r(n), -240));
    }
}

TEST_CASE("on-demand refinement only adds bits") {
    MPMap& m = unit_map();
    HPReal coarse = m.r(8);
    HPReal fine = m.r(8, 512);
    CHECK(fine.prec() >= 512);
    CHECK(near(coarse, fine, -240));
    HPReal pf = m.p(8, 512);
    CHECK(pf.prec() >= 512);
    CHECK(near(m.eval(pf), m.r(8, 512), -480));
}

TEST_CASE("pointwise evaluation") {
    MPMap& m = unit_map();
    CHECK(m.eval(HPReal(0L, 256)).is_zero());
    CHECK(m.eval(HPReal(1L, 256)) == HPReal(1L));
    CHECK(near(m.eval(dec("0.9")), dec("0.71"), -240));
    CHECK(near(m.eval(dec("0.5")), dec("0.75"), -240));
    // The branch cut maps to the fixed point at 0 (fresh map, so the cached
    // cut and the eval-time comparison are the same bits).
    MPMap fresh(HPReal(1L, 256), 256);
    CHECK(near(fresh.eval(fresh.r1()), HPReal(0L), -230));
    CHECK_THROWS_AS(m.eval(dec("1.5")), DomainError);
    CHECK(near(m.deriv(dec("0.5")), dec("2"), -240));
    CHECK(m.deriv(HPReal(0L, 256)) == HPReal(1L));
    CHECK(near(m.deriv(HPReal(1L, 256)), dec("3"), -240));
}

TEST_CASE("branch location is left-closed with 1 on branch 1") {
    MPMap& m = unit_map();
    CHECK(m.branch_of(HPReal(1L, 256)) == 1);
    CHECK(m.branch_of(dec("0.9")) == 1);
    CHECK(m.branch_of(dec("0.8")) == 2);
    CHECK(m.branch_of(dec("0.77")) == 3);

    // 0.62 sits deep in the cell pile-up near the cut; verify the cell bounds.
    long b = m.branch_of(dec("0.62"));
    CHECK(b > 10);
    CHECK(m.p(b) <= dec("0.62"));
    CHECK(m.p(b - 1) > dec("0.62"));

    CHECK_THROWS_AS(m.branch_of(dec("0.5")), DomainError);
    CHECK_THROWS_AS(m.branch_of(m.r1()), DomainError);
    // A freshly solved branch cut is within resolution of the true one.
    CHECK_THROWS_AS(m.branch_of(m.p(3)), BranchBoundaryError);
    CHECK_THROWS_AS(m.branch_of(m.p(1)), BranchBoundaryError);
}

TEST_CASE("first-return map on sample points") {
    MPMap& m = unit_map();
    ReturnValue a = m.induced(dec("0.9"));
    CHECK(a.return_time == 1);
    CHECK(near(a.image, dec("0.71"), -240));

    ReturnValue b = m.induced(dec("0.8"));
    CHECK(b.return_time == 2);
    CHECK(near(b.image, dec("0.6336"), -240));

    ReturnValue c = m.induced(HPReal(1L, 256));
    CHECK(c.return_time == 1);
    CHECK(c.image == HPReal(1L));

    // The image always lands back in the field.
    for (const char* s : {"0.65", "0.7", "0.75", "0.85", "0.95"}) {
        ReturnValue rv = m.induced(dec(s));
        CHECK(rv.image >= m.r1());
        CHECK(rv.image <= HPReal(1L));
        CHECK(rv.return_time >= 1);
    }
}

TEST_CASE("inverse branches undo the return map") {
    MPMap& m = unit_map();
    HPReal y = dec("0.75");
    for (long branch : {1L, 2L, 3L, 7L}) {
        HPReal x = m.inverse_branch(branch, y);
        CHECK(x >= m.p(branch));
        CHECK(x < m.p(branch - 1));
        CHECK(near(m.eval_n(x, branch), y, -235));
        ReturnValue rv = m.induced(x);
        CHECK(rv.return_time == branch);
    }
    CHECK(m.inverse_branch(1, HPReal(1L, 256)) == HPReal(1L));
    // Pulling the left edge of the field back through branch m lands on p_m.
    CHECK(near(m.inverse_branch(4, m.r1()), m.p(4), -230));
    CHECK_THROWS_AS(m.inverse_branch(0, y), DomainError);
    CHECK_THROWS_AS(m.inverse_branch(2, dec("0.3")), DomainError);
}

TEST_CASE("single-branch inverses") {
    MPMap& m = unit_map();
    CHECK(near(m.left_inverse(m.r(3)), m.r(4), -240));
    CHECK(m.left_inverse(HPReal(0L, 256)).is_zero());
    CHECK(near(m.left_inverse(HPReal(1L, 256)), m.r1(), -240));
    CHECK(near(m.right_inverse(m.r(1)), m.p(1), -240));
    CHECK(near(m.right_inverse(HPReal(1L, 256)), HPReal(1L), -240));
    CHECK(near(m.right_inverse(dec("0.71")), dec("0.9"), -240));
    CHECK_THROWS_AS(m.left_inverse(dec("1.01")), DomainError);
}

TEST_CASE("distortion samples against frozen two-point references") {
    MPMap& m = unit_map();

    // One step on the first rung [r2, r1].
    DistortionSample one = m.distortion_sample(1, 1, dec("0.5"), dec("0.45"));
    CHECK(near(one.lhs,
               dec("0.051293294387550533426196144254687238439222361689899411616047674051673529582849907127702"),
               -230));
    CHECK(near(one.factor,
               dec("0.25525831390311474769994721635064971647773014503106187905820624071376289512484298884645"),
               -230));

    // Two steps out of the return cell [p2, p1].
    DistortionSample two =
        m.distortion_sample(2, 2, dec("0.82"), dec("0.85"), DistortionCell::return_branch);
    CHECK(near(two.lhs,
               dec("0.10009425483658469049298958237288622255197606347897359060975320470053952418339092935827"),
               -230));
    CHECK(near(two.factor,
               dec("0.43301886850790959555181787347795665255738138067301167069528137766802979560694760863887"),
               -230));

    // Coincident points give a zero sample.
    DistortionSample zero = m.distortion_sample(1, 1, dec("0.5"), dec("0.5"));
    CHECK(zero.lhs.is_zero());
    CHECK(zero.factor.is_zero());
}

TEST_CASE("distortion samples validate their cell") {
    MPMap& m = unit_map();
    CHECK_THROWS_AS(m.distortion_sample(1, 1, dec("0.5"), dec("0.3")), DomainError);
    CHECK_THROWS_AS(m.distortion_sample(3, 2, dec("0.5"), dec("0.45")), DomainError);
    CHECK_THROWS_AS(m.distortion_sample(0, 1, dec("0.5"), dec("0.45")), DomainError);
    CHECK_THROWS_AS(
        m.distortion_sample(1, 3, dec("0.82"), dec("0.85"), DistortionCell::return_branch),
        DomainError);
}
