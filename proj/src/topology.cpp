#include "uavsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace uavsim {

std::vector<BaseStation> sample_base_stations(double density_km2, const AreaSpec& area, Rng& rng,
                                              double bs_height_m) {
    if (density_km2 <= 0.0) throw std::invalid_argument("BS density must be positive");
    if (area.side_m <= 0.0) throw std::invalid_argument("area side must be positive");

    long n = rng.poisson(density_km2 * area.area_km2());
    std::vector<BaseStation> bss;
    bss.reserve(n);
    double h = area.half_side();
    for (long i = 0; i < n; ++i) {
        BaseStation bs;
        bs.x_m = rng.uniform(-h, h);
        bs.y_m = rng.uniform(-h, h);
        bs.height_m = bs_height_m;
        bss.push_back(bs);
    }
    return bss;
}

BuildingGrid sample_buildings(double density_km2, double building_area_m2, double height_scale_m,
                              const AreaSpec& area, Rng& rng) {
    if (density_km2 <= 0.0) throw std::invalid_argument("building density must be positive");
    if (area.side_m <= 0.0) throw std::invalid_argument("area side must be positive");

    BuildingGrid grid;
    grid.pitch_m = 1000.0 / std::sqrt(density_km2);
    grid.footprint_side_m = std::sqrt(building_area_m2);
    if (grid.footprint_side_m > grid.pitch_m)
        throw std::invalid_argument("building footprints overlap at this density");

    grid.half_cells = static_cast<int>(std::floor(area.half_side() / grid.pitch_m));
    std::size_t n = static_cast<std::size_t>(grid.cells_per_side()) * grid.cells_per_side();
    grid.heights_m.resize(n);
    for (std::size_t i = 0; i < n; ++i) grid.heights_m[i] = rng.rayleigh(height_scale_m);
    return grid;
}

std::vector<int> buildings_near_segment(const BuildingGrid& grid, const Point3& p0,
                                        const Point3& p1) {
    std::vector<int> out;
    if (grid.pitch_m <= 0.0 || grid.heights_m.empty()) return out;

    auto cell_of = [&](double v) {
        return static_cast<int>(std::lround(v / grid.pitch_m));
    };
    auto push_ring = [&](int ix, int iy) {
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                int cx = ix + dx, cy = iy + dy;
                if (grid.cell_in_range(cx, cy))
                    out.push_back(static_cast<int>(grid.index_of(cx, cy)));
            }
    };

    double dx = p1.x - p0.x, dy = p1.y - p0.y;
    double len = std::hypot(dx, dy);
    int ix = cell_of(p0.x), iy = cell_of(p0.y);
    int ix_end = cell_of(p1.x), iy_end = cell_of(p1.y);
    push_ring(ix, iy);
    if (len > 0.0) {
        // DDA over cell boundaries at (i +- 0.5) * pitch
        double inv_dx = dx != 0.0 ? 1.0 / dx : 0.0;
        double inv_dy = dy != 0.0 ? 1.0 / dy : 0.0;
        int step_x = dx > 0.0 ? 1 : -1;
        int step_y = dy > 0.0 ? 1 : -1;
        auto boundary = [&](int i, int step) { return (i + 0.5 * step) * grid.pitch_m; };
        double t_x = dx != 0.0 ? (boundary(ix, step_x) - p0.x) * inv_dx : 2.0;
        double t_y = dy != 0.0 ? (boundary(iy, step_y) - p0.y) * inv_dy : 2.0;
        double dt_x = dx != 0.0 ? step_x * grid.pitch_m * inv_dx : 0.0;
        double dt_y = dy != 0.0 ? step_y * grid.pitch_m * inv_dy : 0.0;
        while ((ix != ix_end || iy != iy_end) && std::min(t_x, t_y) <= 1.0) {
            if (t_x <= t_y) {
                ix += step_x;
                t_x += dt_x;
            } else {
                iy += step_y;
                t_y += dt_y;
            }
            push_ring(ix, iy);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

CityTopology generate_topology(std::uint64_t seed, double bs_density_km2, double build_density_km2,
                               const AreaSpec& area, double building_area_m2,
                               double height_scale_m, double bs_height_m) {
    CityTopology topo;
    topo.area = area;
    topo.seed = seed;
    topo.bs_density_km2 = bs_density_km2;
    topo.build_density_km2 = build_density_km2;
    Rng bs_rng(derive_seed(seed, "topology/bs"));
    Rng build_rng(derive_seed(seed, "topology/buildings"));
    topo.bss = sample_base_stations(bs_density_km2, area, bs_rng, bs_height_m);
    topo.buildings = sample_buildings(build_density_km2, building_area_m2, height_scale_m, area,
                                      build_rng);
    return topo;
}

std::string topology_to_json(const CityTopology& topo) {
    nlohmann::json j;
    j["seed"] = topo.seed;
    j["bs_density_km2"] = topo.bs_density_km2;
    j["build_density_km2"] = topo.build_density_km2;
    j["area_side_m"] = topo.area.side_m;
    auto& bss = j["bss"] = nlohmann::json::array();
    for (const auto& bs : topo.bss) bss.push_back({{"x", bs.x_m}, {"y", bs.y_m}, {"h", bs.height_m}});
    j["buildings"] = {{"pitch", topo.buildings.pitch_m},
                      {"side", topo.buildings.footprint_side_m},
                      {"half_cells", topo.buildings.half_cells},
                      {"heights", topo.buildings.heights_m}};
    return j.dump();
}

CityTopology topology_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CityTopology topo;
    topo.seed = j.at("seed").get<std::uint64_t>();
    topo.bs_density_km2 = j.at("bs_density_km2").get<double>();
    topo.build_density_km2 = j.at("build_density_km2").get<double>();
    topo.area.side_m = j.at("area_side_m").get<double>();
    for (const auto& b : j.at("bss")) {
        topo.bss.push_back({b.at("x").get<double>(), b.at("y").get<double>(),
                            b.at("h").get<double>()});
    }
    const auto& bj = j.at("buildings");
    topo.buildings.pitch_m = bj.at("pitch").get<double>();
    topo.buildings.footprint_side_m = bj.at("side").get<double>();
    topo.buildings.half_cells = bj.at("half_cells").get<int>();
    topo.buildings.heights_m = bj.at("heights").get<std::vector<double>>();
    return topo;
}

}  // namespace uavsim
