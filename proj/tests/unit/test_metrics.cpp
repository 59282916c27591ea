#include "roofpedia/errors.hpp"
#include "roofpedia/metrics.hpp"

#include "../support/fixtures.hpp"
#include "../support/golden_tables.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace roofpedia;
using namespace roofpedia::metrics;

namespace {

tagging::CityRegistry registry_of(const std::vector<oracle::LabelledBuilding>& bs, bool truth_side) {
    tagging::CityRegistry r;
    r.city = "T";
    for (const auto& b : bs) {
        footprints::BuildingFootprint fp;
        fp.id = b.id;
        fp.parent_id = b.parent;
        fp.area_m2 = b.area_m2;
        fp.green = truth_side ? b.truth : b.pred;
        r.footprints.push_back(fp);
    }
    tagging::recompute_totals(r);
    return r;
}

std::vector<oracle::LabelledBuilding> buildings(int n, int positives_pred, int positives_truth) {
    std::vector<oracle::LabelledBuilding> out;
    for (int i = 0; i < n; ++i)
        out.push_back({"b" + std::to_string(i), "b" + std::to_string(i), 100.0 + i, i < positives_pred, i < positives_truth});
    return out;
}

} // namespace

TEST_CASE("confusion on identical registries") {
    const auto bs = buildings(100, 10, 10);
    const auto c = confusion(registry_of(bs, false), registry_of(bs, true), Typology::Green, Unit::Count);
    CHECK(c.total == 100);
    CHECK(c.tp == 10);
    CHECK(c.fp == 0);
    const auto empty = confusion(registry_of(buildings(100, 0, 10), false), registry_of(bs, true), Typology::Green, Unit::Count);
    CHECK(empty.tp == 0);
    CHECK(empty.fp == 0);
    CHECK(empty.pred == 0);
}

TEST_CASE("confusion matches set algebra on random labels") {
    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.3);
    for (int round = 0; round < 20; ++round) {
        std::vector<oracle::LabelledBuilding> bs;
        for (int i = 0; i < 200; ++i) {
            const std::string parent = "p" + std::to_string(i / (1 + round % 3));
            bs.push_back({"f" + std::to_string(i), parent, 50.0 + (i * 37) % 400, coin(rng), coin(rng)});
        }
        const auto pred = registry_of(bs, false), truth = registry_of(bs, true);
        for (bool by_area : {false, true}) {
            const auto want = oracle::set_confusion(bs, by_area);
            const auto got = confusion(pred, truth, Typology::Green, by_area ? Unit::Area : Unit::Count);
            CHECK(got.total == doctest::Approx(want.total));
            CHECK(got.truth == doctest::Approx(want.truth));
            CHECK(got.pred == doctest::Approx(want.pred));
            CHECK(got.tp == doctest::Approx(want.tp));
            CHECK(got.fp == doctest::Approx(want.fp));
        }
    }
}

TEST_CASE("confusion rejects registries over different footprints") {
    auto a = buildings(5, 1, 1);
    auto b = a;
    b.back().id = "other";
    CHECK_THROWS_AS(confusion(registry_of(a, false), registry_of(b, true), Typology::Green, Unit::Count), DataError);
}

TEST_CASE("percentages") {
    const auto berlin = make_confusion(Unit::Count, 754, 153, 158, 121);
    CHECK(berlin.fp == 37);
    CHECK(*percent_matching(berlin) == doctest::Approx(79.08).epsilon(0.0001));
    CHECK(std::abs(percent_fp(berlin) - 4.91) < 0.005);
    CHECK(std::abs(percent_cover(berlin) - 16.05) < 0.005);

    const auto ny = make_confusion(Unit::Area, 449264, 41442, 41442, 41442);
    CHECK(*percent_matching(ny) == 100.0);
    CHECK(percent_fp(ny) == 0.0);
    const auto dc = make_confusion(Unit::Area, 905803, 161260, 268043, 161260);
    CHECK(std::abs(percent_fp(dc) - 11.79) < 0.005);
    const auto zurich = make_confusion(Unit::Area, 221836, 97946, 92136, 84677);
    CHECK(std::abs(percent_cover(zurich) - 38.17) < 0.005);

    CHECK(percent_cover(make_confusion(Unit::Count, 10, 2, 2, 0)) == 0.0);
    CHECK_FALSE(percent_matching(make_confusion(Unit::Count, 10, 0, 2, 0)).has_value());
    CHECK_THROWS_AS(percent_fp(make_confusion(Unit::Count, 0, 0, 0, 0)), DomainError);
    CHECK_THROWS_AS(make_confusion(Unit::Count, 10, 2, 2, 3), DomainError);
    CHECK_THROWS_AS(make_confusion(Unit::Count, 10, 11, 2, 0), DomainError);
}

TEST_CASE("evaluation report averages") {
    const std::vector<RegionTally> one = {{"R", 1.0, make_confusion(Unit::Count, 754, 153, 158, 121)}};
    const auto r1 = evaluation_report(one, Typology::Green, Unit::Count);
    CHECK(*r1.avg_matching == *r1.rows[0].pct_matching);
    CHECK(r1.avg_fp == r1.rows[0].pct_fp);

    const auto& t1 = golden::evaluation_tables()[0];
    std::vector<RegionTally> rows;
    for (const auto& r : t1.rows)
        rows.push_back({r.region, r.area_km2, make_confusion(Unit::Count, r.total, r.truth, r.pred, r.matching)});
    const auto rep = evaluation_report(rows, Typology::Green, Unit::Count);
    CHECK(std::abs(*rep.avg_matching - 77.45) < 0.01);
    CHECK(std::abs(rep.avg_fp - 1.92) < 0.01);
    CHECK(std::abs(rep.avg_cover - 8.04) < 0.01);

    rows.push_back({"Empty", std::nullopt, make_confusion(Unit::Count, 100, 0, 3, 0)});
    const auto with_na = evaluation_report(rows, Typology::Green, Unit::Count);
    CHECK(*with_na.avg_matching == doctest::Approx(*rep.avg_matching));
    CHECK(with_na.warnings.size() == 1);
    CHECK_THROWS_AS(evaluation_report(std::span<const RegionTally>(), Typology::Green, Unit::Count), DomainError);
}

TEST_CASE("csv layout") {
    const std::vector<RegionTally> rows = {{"Berlin 1", 1.2, make_confusion(Unit::Count, 754, 153, 158, 121)},
                                           {"A, B", std::nullopt, make_confusion(Unit::Count, 100, 0, 3, 0)}};
    const auto csv = to_csv(evaluation_report(rows, Typology::Green, Unit::Count));
    CHECK(csv == "Region,Area km²,Total,Truth,Pred,Matching,%Matching,%FP,%Cover\n"
                 "Berlin 1,1.20,754,153,158,121,79.08,4.91,16.05\n"
                 "\"A, B\",,100,0,3,0,N/A,3.00,0.00\n"
                 "Average,,,,,,79.08,3.95,8.02\n");
}
