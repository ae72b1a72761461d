#include "uavsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

// Intersection of segment parameter range with one axis slab [lo, hi].
// Returns false when the segment misses the slab entirely.
bool slab_clip(double p, double d, double lo, double hi, double& t_in, double& t_out) {
    if (d == 0.0) return p >= lo && p <= hi;
    double t0 = (lo - p) / d;
    double t1 = (hi - p) / d;
    if (t0 > t1) std::swap(t0, t1);
    t_in = std::max(t_in, t0);
    t_out = std::min(t_out, t1);
    return t_in <= t_out;
}

}  // namespace

LinkGeometry link_geometry(const Point3& uav, const BaseStation& bs) {
    LinkGeometry g;
    double dx = bs.x_m - uav.x;
    double dy = bs.y_m - uav.y;
    g.r_horiz_m = std::hypot(dx, dy);
    g.dh_m = uav.z - bs.height_m;
    g.dist3d_m = std::hypot(g.r_horiz_m, g.dh_m);
    g.elev_angle_rad = std::atan2(g.dh_m, g.r_horiz_m);
    g.azimuth_rad = std::atan2(dy, dx);
    return g;
}

namespace {

// Slab test of one footprint against the 3D segment.
bool footprint_blocks(const BuildingGrid& grid, int ix, int iy, const Point3& p0, double dx,
                      double dy, double dz, double z_floor) {
    double h = grid.heights_m[grid.index_of(ix, iy)];
    if (h < z_floor) return false;  // below the segment's lowest point
    double half = 0.5 * grid.footprint_side_m;
    double cx = ix * grid.pitch_m, cy = iy * grid.pitch_m;
    double t_in = 0.0, t_out = 1.0;
    if (!slab_clip(p0.x, dx, cx - half, cx + half, t_in, t_out)) return false;
    if (!slab_clip(p0.y, dy, cy - half, cy + half, t_in, t_out)) return false;
    double z_in = p0.z + t_in * dz;
    double z_out = p0.z + t_out * dz;
    return h >= std::min(z_in, z_out);
}

}  // namespace

// Same lattice walk as buildings_near_segment, but allocation-free and with
// early exit on the first blocking footprint.
bool is_blocked(const CityTopology& topo, const Point3& uav, const BaseStation& bs) {
    const BuildingGrid& grid = topo.buildings;
    if (grid.pitch_m <= 0.0 || grid.heights_m.empty()) return false;
    Point3 p1{bs.x_m, bs.y_m, bs.height_m};
    double dx = p1.x - uav.x, dy = p1.y - uav.y, dz = p1.z - uav.z;
    double z_floor = std::min(uav.z, p1.z);

    auto cell_of = [&](double v) { return static_cast<int>(std::lround(v / grid.pitch_m)); };
    auto ring_blocks = [&](int ix, int iy) {
        for (int ox = -1; ox <= 1; ++ox)
            for (int oy = -1; oy <= 1; ++oy) {
                int cx = ix + ox, cy = iy + oy;
                if (grid.cell_in_range(cx, cy) &&
                    footprint_blocks(grid, cx, cy, uav, dx, dy, dz, z_floor))
                    return true;
            }
        return false;
    };

    int ix = cell_of(uav.x), iy = cell_of(uav.y);
    int ix_end = cell_of(p1.x), iy_end = cell_of(p1.y);
    if (ring_blocks(ix, iy)) return true;
    double len = std::hypot(dx, dy);
    if (len == 0.0) return false;

    double inv_dx = dx != 0.0 ? 1.0 / dx : 0.0;
    double inv_dy = dy != 0.0 ? 1.0 / dy : 0.0;
    int step_x = dx > 0.0 ? 1 : -1;
    int step_y = dy > 0.0 ? 1 : -1;
    auto boundary = [&](int i, int step) { return (i + 0.5 * step) * grid.pitch_m; };
    double t_x = dx != 0.0 ? (boundary(ix, step_x) - uav.x) * inv_dx : 2.0;
    double t_y = dy != 0.0 ? (boundary(iy, step_y) - uav.y) * inv_dy : 2.0;
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
        if (ring_blocks(ix, iy)) return true;
    }
    return false;
}

bool is_blocked_oracle(const CityTopology& topo, const Point3& uav, const BaseStation& bs,
                       double step_m) {
    if (step_m <= 0.0) throw std::invalid_argument("step_m must be positive");
    const BuildingGrid& grid = topo.buildings;
    if (grid.heights_m.empty()) return false;
    double half = 0.5 * grid.footprint_side_m;
    double dx = bs.x_m - uav.x, dy = bs.y_m - uav.y, dz = bs.height_m - uav.z;
    double len = std::sqrt(dx * dx + dy * dy + dz * dz);
    long n = std::max(1L, static_cast<long>(std::ceil(len / step_m)));
    for (long i = 0; i <= n; ++i) {
        double t = static_cast<double>(i) / n;
        double x = uav.x + t * dx;
        double y = uav.y + t * dy;
        double z = uav.z + t * dz;
        int ix = static_cast<int>(std::lround(x / grid.pitch_m));
        int iy = static_cast<int>(std::lround(y / grid.pitch_m));
        if (!grid.cell_in_range(ix, iy)) continue;
        if (std::abs(x - ix * grid.pitch_m) > half) continue;
        if (std::abs(y - iy * grid.pitch_m) > half) continue;
        if (grid.heights_m[grid.index_of(ix, iy)] >= z) return true;
    }
    return false;
}

double uav_antenna_gain(double beamwidth_rad) {
    if (beamwidth_rad <= 0.0 || beamwidth_rad >= kPi)
        throw std::invalid_argument("beamwidth must be in (0, pi)");
    return 16.0 * kPi / (beamwidth_rad * beamwidth_rad);
}

bool in_beam(const LinkGeometry& serving, const LinkGeometry& other, double beamwidth_rad) {
    double half = 0.5 * beamwidth_rad;
    if (std::abs(other.elev_angle_rad - serving.elev_angle_rad) > half) return false;
    return std::abs(wrap_angle(other.azimuth_rad - serving.azimuth_rad)) <= half;
}

double bs_vertical_gain(double elev_angle_rad, const RadioParams& params) {
    int n = params.n_elements;
    if (n <= 1) return 1.0;
    double u = kPi * params.element_spacing_wl *
               (std::sin(elev_angle_rad) - std::sin(params.bs_downtilt_rad));
    double s = std::sin(u);
    if (std::abs(s) < 1e-12) return static_cast<double>(n);
    double sn = std::sin(n * u);
    return (sn * sn) / (n * s * s);
}

double received_power(const LinkGeometry& geom, bool blocked, double gain_uav,
                      const RadioParams& params) {
    double d = std::max(geom.dist3d_m, 1.0);
    double alpha = blocked ? params.alpha_nlos : params.alpha_los;
    return params.tx_power_w * gain_uav * bs_vertical_gain(geom.elev_angle_rad, params) *
           params.near_field_c * std::pow(d, -alpha);
}

double sinr(const CityTopology& topo, const Point3& uav, int serving_idx,
            const RadioParams& params) {
    if (serving_idx < 0 || serving_idx >= static_cast<int>(topo.bss.size()))
        throw std::out_of_range("serving BS index out of range");

    double gain_uav = uav_antenna_gain(params.beamwidth_rad);
    const BaseStation& serving = topo.bss[serving_idx];
    LinkGeometry serving_geom = link_geometry(uav, serving);
    double signal = received_power(serving_geom, is_blocked(topo, uav, serving), gain_uav, params);

    double interference = 0.0;
    for (int i = 0; i < static_cast<int>(topo.bss.size()); ++i) {
        if (i == serving_idx) continue;
        LinkGeometry g = link_geometry(uav, topo.bss[i]);
        if (!in_beam(serving_geom, g, params.beamwidth_rad)) continue;
        interference += received_power(g, is_blocked(topo, uav, topo.bss[i]), gain_uav, params);
    }
    return signal / (interference + params.noise_w);
}

double spectral_efficiency(double sinr_linear) {
    return std::log2(1.0 + sinr_linear);
}

}  // namespace uavsim
