#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/rng.hpp"

namespace uavsim {

struct Point3 {
    double x = 0, y = 0, z = 0;
};

// Square area of side side_m, centered on the origin.
struct AreaSpec {
    double side_m = 5000.0;

    double half_side() const { return 0.5 * side_m; }
    double area_km2() const { return side_m * side_m * 1e-6; }
    bool contains(double x, double y) const {
        double h = half_side();
        return x >= -h && x <= h && y >= -h && y <= h;
    }
};

struct BaseStation {
    double x_m = 0, y_m = 0;
    double height_m = 30.0;
};

// Square lattice of axis-aligned square buildings. Centers sit at
// (ix*pitch, iy*pitch) for ix, iy in [-half_cells, half_cells]; heights are
// stored row-major over (ix, iy).
struct BuildingGrid {
    double pitch_m = 0;
    double footprint_side_m = 0;
    int half_cells = 0;
    std::vector<double> heights_m;

    int cells_per_side() const { return 2 * half_cells + 1; }
    std::size_t count() const { return heights_m.size(); }
    bool cell_in_range(int ix, int iy) const {
        return ix >= -half_cells && ix <= half_cells && iy >= -half_cells && iy <= half_cells;
    }
    std::size_t index_of(int ix, int iy) const {
        return static_cast<std::size_t>(ix + half_cells) * cells_per_side() +
               static_cast<std::size_t>(iy + half_cells);
    }
    double center_x(std::size_t idx) const {
        return (static_cast<int>(idx / cells_per_side()) - half_cells) * pitch_m;
    }
    double center_y(std::size_t idx) const {
        return (static_cast<int>(idx % cells_per_side()) - half_cells) * pitch_m;
    }
};

struct CityTopology {
    AreaSpec area;
    std::vector<BaseStation> bss;
    BuildingGrid buildings;
    double bs_density_km2 = 0;
    double build_density_km2 = 0;
    std::uint64_t seed = 0;
};

std::vector<BaseStation> sample_base_stations(double density_km2, const AreaSpec& area, Rng& rng,
                                              double bs_height_m = 30.0);

BuildingGrid sample_buildings(double density_km2, double building_area_m2, double height_scale_m,
                              const AreaSpec& area, Rng& rng);

// Superset of all buildings whose footprint intersects the horizontal
// projection of the segment p0->p1, found by walking the lattice cells the
// projection crosses (plus a one-cell ring).
std::vector<int> buildings_near_segment(const BuildingGrid& grid, const Point3& p0,
                                        const Point3& p1);

CityTopology generate_topology(std::uint64_t seed, double bs_density_km2, double build_density_km2,
                               const AreaSpec& area = {}, double building_area_m2 = 40.0,
                               double height_scale_m = 20.0, double bs_height_m = 30.0);

std::string topology_to_json(const CityTopology& topo);
CityTopology topology_from_json(const std::string& text);

}  // namespace uavsim
