#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "mpgame/cylinders.hpp"
#include "mpgame/errors.hpp"
#include "mpgame/map.hpp"

using namespace mpgame;

namespace {

HPReal dec(const std::string& s) { return HPReal::from_decimal(s, 320); }

bool near(const HPReal& a, const HPReal& b, long log2tol) {
    return (a - b).abs() <= HPReal::pow2(log2tol, a.prec());
}

Itinerary extend_copy(Itinerary sigma, long k) {
    sigma.push_back(k);
    return sigma;
}

// Values solved independently with 110-digit quadratics (gamma = 1).
const char* kR1 = "0.61803398874989484820458683436563811772030917980576286213544862270526046281890244970721";
const char* kP1 = "0.86676039917386209299087206249471948351318466860982705289680775110152607790330220610132";
const char* kP2 = "0.7967973691331191365417739480997928148018276906352380182231316617615585729483053109015";
const char* kP3 = "0.75524548014090247197768476579385892030395511498030903839803271035780841488723628929978";
const char* kJ11L = "0.95490906903966410494252641890495622954304408087648660994116773660749691760591393112031";
const char* kJ12L = "0.93066326196387636762439945539182555697579007448576593339531346610453349505477198001995";
const char* kJ15L = "0.89987294672949467966178555426287656816975176851698456012570404153927695945737371639895";
const char* kJ16L = "0.89502112922225910509649581330009392317270720183153522481221800835973371640095934346871";
const char* kJ21L = "0.8441610203046922042152933514467232609135806738460894507169201859823789158138858767529";
const char* kJ22L = "0.83158971132299218949200876510856363496819168593201418731093572187946776471301137446711";
const char* kJ28L = "0.80891321392321116042618021364273423519845810271151657464339818218032305476487918744202";
const char* kJ29L = "0.80764650308602704036388018569783948557845346096089307047737393154627430596507932107569";
const char* kTailRoot2 = "0.24872641042396724478628522812908136579287548880406419076135912839626561508439975639411";

const CylinderTree& tree() {
    static auto map = std::make_shared<const MPMap>(HPReal(1L));
    static CylinderTree t(map);
    return t;
}

}  // namespace

TEST_CASE("root and first generation endpoints") {
    const auto& t = tree();
    ClosedInterval root = t.span({});
    CHECK(near(root.left, dec(kR1), -280));
    CHECK(root.right == 1L);
    CHECK(t.endpoints({}).err == HPReal::pow2(-288));

    CHECK(near(t.span({1}).left, dec(kP1), -280));
    CHECK(t.span({1}).right == 1L);
    CHECK(near(t.span({2}).left, dec(kP2), -280));
    CHECK(near(t.span({2}).right, dec(kP1), -280));
    CHECK(near(t.span({3}).left, dec(kP3), -280));
    CHECK(near(t.span({3}).right, dec(kP2), -280));
}

TEST_CASE("second generation pullbacks") {
    const auto& t = tree();
    CHECK(near(t.span({1, 1}).left, dec(kJ11L), -280));
    CHECK(t.span({1, 1}).right == 1L);
    CHECK(near(t.span({1, 2}).left, dec(kJ12L), -280));
    CHECK(near(t.span({1, 2}).right, dec(kJ11L), -280));
    CHECK(near(t.span({2, 1}).left, dec(kJ21L), -280));
    CHECK(near(t.span({2, 1}).right, dec(kP1), -280));
    CHECK(near(t.span({2, 2}).left, dec(kJ22L), -280));
    CHECK(near(t.span({2, 8}).left, dec(kJ28L), -280));
    CHECK(near(t.span({2, 9}).left, dec(kJ29L), -280));
    CHECK(near(t.span({2, 9}).right, dec(kJ28L), -280));
}

TEST_CASE("requesting higher resolution tightens the certificate") {
    const auto& t = tree();
    auto coarse = t.endpoints({2}, 256);
    auto fine = t.endpoints({2}, 512);
    CHECK(fine.err == HPReal::pow2(-544));
    CHECK(near(coarse.left, fine.left, -286));
    // The memo now answers coarse queries with the refined entry.
    CHECK(t.endpoints({2}, 256).err <= HPReal::pow2(-288));
}

TEST_CASE("children tile their parent") {
    const auto& t = tree();
    // Shared boundaries agree to the certified radius; exact bit equality can
    // be lost once other queries refine parts of the memo.
    for (const Itinerary& sigma : {Itinerary{}, Itinerary{1}, Itinerary{2}, Itinerary{2, 3, 1}}) {
        ClosedInterval parent = t.span(sigma);
        auto kids = t.children(sigma, 25);
        REQUIRE(kids.size() == 25);
        CHECK(near(kids[0].interval.right, parent.right, -285));
        for (size_t i = 1; i < kids.size(); ++i) {
            CHECK(near(kids[i].interval.right, kids[i - 1].interval.left, -285));
            CHECK(kids[i].interval.left < kids[i - 1].interval.left);
        }
        for (const auto& c : kids) {
            CHECK(parent.left - c.interval.left <= HPReal::pow2(-285));
            CHECK(c.interval.right - parent.right <= HPReal::pow2(-285));
        }
    }
    CHECK_THROWS_AS(tree().children({1}, 0), DomainError);
}

TEST_CASE("child widths decrease strictly") {
    const auto& t = tree();
    for (const Itinerary& sigma : {Itinerary{}, Itinerary{2}}) {
        HPReal prev = t.width(extend_copy(sigma, 1));
        for (long k = 2; k <= 100; ++k) {
            HPReal w = t.width(extend_copy(sigma, k));
            CHECK(w < prev);
            prev = w;
        }
    }
}

TEST_CASE("nested prefixes nest spatially") {
    const auto& t = tree();
    Itinerary sigma{3, 1, 2, 4, 2};
    ClosedInterval outer = t.span({});
    for (size_t n = 1; n <= sigma.size(); ++n) {
        Itinerary prefix(sigma.begin(), sigma.begin() + n);
        ClosedInterval inner = t.span(prefix);
        CHECK(inner.left >= outer.left);
        CHECK(inner.right <= outer.right);
        outer = inner;
    }
}

TEST_CASE("locate_K picks the child holding the query fraction") {
    const auto& t = tree();
    CHECK(t.locate_K({}, HPReal(0.5)) == 2);
    CHECK(t.locate_K({}, dec("0.999")) == 1);
    CHECK(t.locate_K({}, dec("0.1")) == 13);
    CHECK(t.locate_K({}, dec("0.001")) == 1177);
    CHECK(t.locate_K({2}, HPReal(0.5)) == 2);

    CHECK_THROWS_AS(t.locate_K({}, HPReal(0L)), DomainError);
    CHECK_THROWS_AS(t.locate_K({}, HPReal(1L)), DomainError);
    CHECK_THROWS_AS(t.locate_K({}, dec("1.25")), DomainError);
    CHECK_THROWS_AS(t.locate_K({}, -HPReal(0.5)), DomainError);

    // Self-consistency: the query point lies in the left-closed child.
    for (const char* z : {"0.07", "0.33", "0.61", "0.94"}) {
        HPReal zeta = dec(z);
        ClosedInterval root = t.span({});
        HPReal q = root.left + zeta * root.width();
        long K = t.locate_K({}, zeta);
        CHECK(t.span({K}).left <= q);
        if (K > 1) CHECK(q < t.span({K - 1}).left);
    }
}

TEST_CASE("commensurate generation on frozen windows") {
    const auto& t = tree();

    auto res = t.commensurate_generation(ClosedInterval(dec("0.80"), dec("0.81")));
    CHECK(res.generation == 2);
    CHECK(res.witness.itinerary == Itinerary{2, 9});

    res = t.commensurate_generation(ClosedInterval(dec("0.8085"), dec("0.8095")));
    CHECK(res.generation == 3);
    CHECK(res.witness.itinerary == Itinerary{2, 8, 5});

    res = t.commensurate_generation(ClosedInterval(dec(kP2), HPReal(1L)));
    CHECK(res.generation == 1);
    CHECK(res.witness.itinerary == Itinerary{1});

    res = t.commensurate_generation(ClosedInterval(dec("0.60"), HPReal(1L)));
    CHECK(res.generation == 0);
    CHECK(res.witness.itinerary.empty());

    CHECK_THROWS_AS(t.commensurate_generation(ClosedInterval(dec("0.60"), dec("0.99"))),
                    DomainError);
}

TEST_CASE("an exact basic interval reports its own generation") {
    const auto& t = tree();
    for (const Itinerary& sigma :
         {Itinerary{}, Itinerary{2}, Itinerary{2, 1}, Itinerary{3, 2}, Itinerary{1, 1, 4}}) {
        auto res = t.commensurate_generation(t.span(sigma));
        CHECK(res.generation == static_cast<long>(sigma.size()));
        CHECK(res.witness.itinerary == sigma);
    }
}

TEST_CASE("interval anchored at a left endpoint") {
    const auto& t = tree();
    // Sharing the left endpoint of J_2 keeps every whole child of J_2 out of
    // reach except the deep tail, so the answer drops one generation further.
    ClosedInterval B(t.span({2}).left, dec("0.85"));
    auto res = t.commensurate_generation(B);
    CHECK(res.generation == 2);
    CHECK(res.witness.itinerary == Itinerary{2, 2});
}

TEST_CASE("witness is contained and rightmost") {
    const auto& t = tree();
    ClosedInterval B(dec("0.80"), dec("0.81"));
    auto res = t.commensurate_generation(B);
    CHECK(res.witness.interval.left >= B.left);
    CHECK(res.witness.interval.right <= B.right);
    // The next sibling to the right pokes out of B.
    CHECK(t.span({2, 8}).right > B.right);
}

TEST_CASE("elements meeting a window") {
    const auto& t = tree();
    ClosedInterval straddle(dec("0.85"), dec("0.90"));

    auto gen0 = t.elements_meeting(straddle, 0);
    REQUIRE(gen0.size() == 1);
    CHECK(gen0[0].itinerary.empty());

    auto gen1 = t.elements_meeting(straddle, 1);
    REQUIRE(gen1.size() == 2);
    CHECK(gen1[0].itinerary == Itinerary{1});
    CHECK(gen1[1].itinerary == Itinerary{2});

    // B covers the left endpoint of J_1, where generation-2 intervals pile up.
    CHECK_THROWS_AS(t.elements_meeting(straddle, 2), ResourceError);

    ClosedInterval narrow(dec("0.895"), dec("0.90"));
    auto gen2 = t.elements_meeting(narrow, 2);
    REQUIRE(gen2.size() == 3);
    CHECK(gen2[0].itinerary == Itinerary{1, 5});
    CHECK(gen2[1].itinerary == Itinerary{1, 6});
    CHECK(gen2[2].itinerary == Itinerary{1, 7});

    CHECK_THROWS_AS(t.elements_meeting(ClosedInterval(dec("0.5"), dec("0.9")), 1), DomainError);
}

TEST_CASE("touching at a single endpoint stops the subtree") {
    const auto& t = tree();
    // B reaches exactly the left endpoint of J_2; the only deeper structure
    // it can meet lives under J_3, plus that single touching point.
    ClosedInterval B(dec("0.77"), t.span({2}).left);
    auto gen1 = t.elements_meeting(B, 1);
    REQUIRE(gen1.size() == 2);
    CHECK(gen1[0].itinerary == Itinerary{2});
    CHECK(gen1[1].itinerary == Itinerary{3});

    auto gen2 = t.elements_meeting(B, 2);
    REQUIRE(gen2.size() >= 2);
    for (const auto& c : gen2) {
        REQUIRE(c.itinerary.size() == 2);
        CHECK(c.itinerary[0] == 3);
    }
    CHECK(gen2[0].itinerary == Itinerary{3, 1});
    CHECK(near(gen2[0].interval.right, B.right, -285));
}

TEST_CASE("left endpoint scan") {
    const auto& t = tree();

    auto hits = t.left_endpoint_scan(ClosedInterval(dec("0.895"), dec("0.90")), 2);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].owner == Itinerary{1, 6});
    CHECK(hits[0].generation == 2);
    CHECK(near(hits[0].point, dec(kJ16L), -280));
    CHECK(hits[1].owner == Itinerary{1, 5});
    CHECK(near(hits[1].point, dec(kJ15L), -280));

    hits = t.left_endpoint_scan(ClosedInterval(dec("0.8085"), dec("0.8095")), 2);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].owner == Itinerary{2, 8});
    CHECK(near(hits[0].point, dec(kJ28L), -280));

    hits = t.left_endpoint_scan(ClosedInterval(dec("0.85"), dec("0.90")), 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].owner == Itinerary{1});
    CHECK(near(hits[0].point, dec(kP1), -280));

    CHECK(t.left_endpoint_scan(ClosedInterval(dec("0.80"), dec("0.81")), 1).empty());

    // Past the accumulation point of J_1's children the family is infinite.
    CHECK_THROWS_AS(t.left_endpoint_scan(ClosedInterval(dec("0.85"), dec("0.90")), 3),
                    ResourceError);
}

TEST_CASE("tail lengths") {
    const auto& t = tree();
    CHECK(t.tail_length({}, 1) == t.width({}));
    CHECK(near(t.tail_length({}, 2), dec(kTailRoot2), -280));
    for (long k = 2; k <= 20; ++k) {
        HPReal diff = t.tail_length({2}, k) - t.tail_length({2}, k + 1);
        CHECK(near(diff, t.width({2, k}), -300));
    }
    CHECK_THROWS_AS(t.tail_length({}, 0), DomainError);
}

TEST_CASE("child laws respect the estimated distortion constant") {
    const auto& t = tree();
    HPReal c5 = t.estimate_C5(3, 60);
    CHECK(c5 >= HPReal(1.5));
    for (const Itinerary& sigma : {Itinerary{}, Itinerary{2}}) {
        HPReal w = t.width(sigma);
        for (long k : {1L, 2L, 5L, 10L, 30L}) {
            HPReal kk(k);
            HPReal tail_ratio = t.tail_length(sigma, k) * kk / w;
            CHECK(tail_ratio <= c5);
            CHECK(tail_ratio * c5 >= 1L);
            HPReal len_ratio = t.width(extend_copy(sigma, k)) * kk * kk / w;
            CHECK(len_ratio <= c5);
            CHECK(len_ratio * c5 >= 1L);
        }
    }

    // Corollary-style sandwich for the located child index.
    for (const char* z : {"0.1", "0.35", "0.77"}) {
        HPReal zeta = dec(z);
        long K = t.locate_K({}, zeta);
        CHECK(HPReal(K + 1) * zeta * c5 >= 1L);
        CHECK(HPReal(K) * zeta <= c5);
    }
}

TEST_CASE("estimate is deterministic across fresh instances") {
    CylinderTree a(std::make_shared<const MPMap>(HPReal(1L)));
    CylinderTree b(std::make_shared<const MPMap>(HPReal(1L)));
    HPReal ca = a.estimate_C5(3, 40);
    CHECK(ca == b.estimate_C5(3, 40));
    // Deepening the sample barely moves the estimate.
    HPReal cb = a.estimate_C5(4, 40);
    CHECK(cb / ca <= dec("1.1"));
    CHECK(cb / ca >= dec("0.9"));
}

TEST_CASE("return map distortion stays bounded inside basic intervals") {
    auto map = std::make_shared<const MPMap>(HPReal(1L));
    CylinderTree t(map);
    for (const Itinerary& sigma : {Itinerary{1, 2}, Itinerary{3, 1, 2}, Itinerary{2, 2, 1, 1},
                                   Itinerary{4, 3, 2, 1, 2}}) {
        ClosedInterval J = t.span(sigma);
        HPReal x = J.left + J.width() * dec("0.3");
        HPReal y = J.left + J.width() * dec("0.8");
        HPReal log_ratio(0L);
        for (size_t step = 0; step < sigma.size(); ++step) {
            long m = map->branch_of(x);
            REQUIRE(m == sigma[step]);
            REQUIRE(map->branch_of(y) == m);
            HPReal fx = x, fy = y;
            for (long j = 0; j < m; ++j) {
                log_ratio = log_ratio + map->deriv(fx).log() - map->deriv(fy).log();
                fx = map->eval(fx);
                fy = map->eval(fy);
            }
            x = fx;
            y = fy;
            CHECK(log_ratio.abs() <= HPReal(12L));
        }
    }
}

TEST_CASE("concurrent span queries agree") {
    auto map = std::make_shared<const MPMap>(HPReal(1L));
    CylinderTree t(map);
    std::vector<std::thread> workers;
    for (long i = 1; i <= 4; ++i)
        workers.emplace_back([&t, i] { (void)t.children({i}, 12); });
    for (auto& w : workers) w.join();
    for (long i = 1; i <= 4; ++i) {
        auto kids = t.children({i}, 12);
        CHECK(kids[0].interval.right == t.span({i}).right);
        for (size_t k = 1; k < kids.size(); ++k)
            CHECK(kids[k].interval.right == kids[k - 1].interval.left);
    }
}

TEST_CASE("second map exponent sanity") {
    auto map = std::make_shared<const MPMap>(HPReal(2L));
    CylinderTree t(map);
    auto kids = t.children({}, 10);
    CHECK(kids[0].interval.right == 1L);
    for (size_t k = 1; k < kids.size(); ++k)
        CHECK(kids[k].interval.right == kids[k - 1].interval.left);
    HPReal zeta = dec("0.5");
    long K = t.locate_K({}, zeta);
    CHECK(K >= 1);
    ClosedInterval root = t.span({});
    HPReal q = root.left + zeta * root.width();
    CHECK(t.span({K}).left <= q);
    if (K > 1) CHECK(q < t.span({K - 1}).left);
}

TEST_CASE("itinerary formatting") {
    CHECK(itinerary_to_string({}) == "()");
    CHECK(itinerary_to_string({2, 9}) == "2.9");
    CHECK(itinerary_to_string({1, 1, 4}) == "1.1.4");
}
