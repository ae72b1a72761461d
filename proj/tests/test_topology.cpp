#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "uavsim/topology.hpp"

using namespace uavsim;

namespace {

// Exhaustive reference for buildings_near_segment: scan every footprint
// against the 2D segment.
bool footprint_hits_segment(const BuildingGrid& grid, int idx, const Point3& p0,
                            const Point3& p1) {
    double half = 0.5 * grid.footprint_side_m;
    double cx = grid.center_x(idx), cy = grid.center_y(idx);
    double dx = p1.x - p0.x, dy = p1.y - p0.y;
    double t_in = 0.0, t_out = 1.0;
    auto clip = [&](double p, double d, double lo, double hi) {
        if (d == 0.0) return p >= lo && p <= hi;
        double t0 = (lo - p) / d, t1 = (hi - p) / d;
        if (t0 > t1) std::swap(t0, t1);
        t_in = std::max(t_in, t0);
        t_out = std::min(t_out, t1);
        return t_in <= t_out;
    };
    return clip(p0.x, dx, cx - half, cx + half) && clip(p0.y, dy, cy - half, cy + half);
}

std::set<int> brute_force_candidates(const BuildingGrid& grid, const Point3& p0,
                                     const Point3& p1) {
    std::set<int> hits;
    for (int i = 0; i < static_cast<int>(grid.count()); ++i)
        if (footprint_hits_segment(grid, i, p0, p1)) hits.insert(i);
    return hits;
}

}  // namespace

TEST_CASE("base station sampling") {
    AreaSpec area{5000.0};

    SUBCASE("all heights fixed at 30 m, positions inside the area") {
        Rng rng(1);
        auto bss = sample_base_stations(1.0, area, rng);
        for (const auto& bs : bss) {
            CHECK(bs.height_m == 30.0);
            CHECK(area.contains(bs.x_m, bs.y_m));
        }
    }

    SUBCASE("empirical Poisson mean within 1% of density * area") {
        Rng rng(2);
        double lambda = 5.0 * area.area_km2();  // 125
        double sum = 0;
        const int trials = 10000;
        for (int i = 0; i < trials; ++i)
            sum += static_cast<double>(sample_base_stations(5.0, area, rng).size());
        CHECK(sum / trials == doctest::Approx(lambda).epsilon(0.01));
    }

    SUBCASE("rejects bad inputs") {
        Rng rng(3);
        CHECK_THROWS(sample_base_stations(0.0, area, rng));
        CHECK_THROWS(sample_base_stations(-1.0, area, rng));
        CHECK_THROWS(sample_base_stations(1.0, AreaSpec{0.0}, rng));
    }
}

TEST_CASE("building grid") {
    AreaSpec area{5000.0};

    SUBCASE("pitch from density") {
        Rng rng(4);
        CHECK(sample_buildings(100, 40, 20, area, rng).pitch_m == doctest::Approx(100.0));
        auto g = sample_buildings(500, 40, 20, area, rng);
        CHECK(g.pitch_m == doctest::Approx(44.721).epsilon(1e-4));
        CHECK(g.footprint_side_m == doctest::Approx(6.3246).epsilon(1e-4));
    }

    SUBCASE("rejects overlapping footprints") {
        Rng rng(5);
        // pitch at 1e5/km2 is 3.16 m < sqrt(40)
        CHECK_THROWS(sample_buildings(1e5, 40.0, 20, area, rng));
    }

    SUBCASE("Rayleigh mean over 1e5 samples") {
        Rng rng(6);
        double sum = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) sum += rng.rayleigh(20.0);
        double expected = 20.0 * std::sqrt(3.14159265358979323846 / 2.0);  // 25.066
        CHECK(sum / n == doctest::Approx(expected).epsilon(0.01));
    }

    SUBCASE("lattice covers the area") {
        Rng rng(7);
        auto g = sample_buildings(500, 40, 20, area, rng);
        // furthest center plus one pitch reaches past the edge
        CHECK(g.half_cells * g.pitch_m <= area.half_side());
        CHECK((g.half_cells + 1) * g.pitch_m > area.half_side());
        CHECK(g.count() == static_cast<std::size_t>(g.cells_per_side()) * g.cells_per_side());
        for (double h : g.heights_m) CHECK(h >= 0.0);
    }
}

TEST_CASE("buildings_near_segment") {
    Rng rng(8);
    AreaSpec area{5000.0};
    auto grid = sample_buildings(500, 40, 20, area, rng);

    SUBCASE("zero-length segment stays local") {
        Point3 p{10.0, 10.0, 100.0};
        auto c = buildings_near_segment(grid, p, p);
        CHECK(c.size() <= 9);
        CHECK(!c.empty());
    }

    SUBCASE("segment along a lattice row crosses one cell per pitch") {
        Point3 p0{0.0, 0.0, 100.0};
        Point3 p1{10.0 * grid.pitch_m, 0.0, 100.0};
        auto c = buildings_near_segment(grid, p0, p1);
        CHECK(c.size() >= 10);
    }

    SUBCASE("superset of the exhaustive footprint scan on random segments") {
        Rng seg_rng(9);
        for (int i = 0; i < 1000; ++i) {
            Point3 p0{seg_rng.uniform(-2000, 2000), seg_rng.uniform(-2000, 2000), 100.0};
            Point3 p1{seg_rng.uniform(-2000, 2000), seg_rng.uniform(-2000, 2000), 30.0};
            auto c = buildings_near_segment(grid, p0, p1);
            std::set<int> cand(c.begin(), c.end());
            for (int idx : brute_force_candidates(grid, p0, p1)) CHECK(cand.count(idx) == 1);
        }
    }
}

TEST_CASE("topology determinism and JSON round-trip") {
    auto a = generate_topology(123, 5.0, 500.0);
    auto b = generate_topology(123, 5.0, 500.0);
    REQUIRE(a.bss.size() == b.bss.size());
    for (std::size_t i = 0; i < a.bss.size(); ++i) {
        CHECK(a.bss[i].x_m == b.bss[i].x_m);
        CHECK(a.bss[i].y_m == b.bss[i].y_m);
    }
    REQUIRE(a.buildings.heights_m.size() == b.buildings.heights_m.size());
    for (std::size_t i = 0; i < a.buildings.heights_m.size(); ++i)
        CHECK(a.buildings.heights_m[i] == b.buildings.heights_m[i]);

    auto rt = topology_from_json(topology_to_json(a));
    REQUIRE(rt.bss.size() == a.bss.size());
    for (std::size_t i = 0; i < a.bss.size(); ++i) {
        CHECK(rt.bss[i].x_m == a.bss[i].x_m);  // lossless at full precision
        CHECK(rt.bss[i].y_m == a.bss[i].y_m);
    }
    CHECK(rt.buildings.heights_m == a.buildings.heights_m);
    CHECK(rt.buildings.pitch_m == a.buildings.pitch_m);
    CHECK(rt.seed == a.seed);
}

TEST_CASE("independent seeds give independent worlds") {
    auto a = generate_topology(1, 5.0, 500.0);
    auto b = generate_topology(2, 5.0, 500.0);
    bool same = a.bss.size() == b.bss.size() && a.buildings.heights_m == b.buildings.heights_m;
    CHECK(!same);
}
