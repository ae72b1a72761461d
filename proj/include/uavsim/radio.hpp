#pragma once

#include "uavsim/topology.hpp"

namespace uavsim {

struct RadioParams {
    double tx_power_w = 40.0;
    double near_field_c = 1.42e-4;  // 1 m reference pathloss at 2 GHz
    double alpha_los = 2.1;
    double alpha_nlos = 4.0;
    double noise_w = 8e-13;
    double beamwidth_rad = 1.0471975511965976;   // pi/3
    double bs_downtilt_rad = 0.17453292519943295;  // 10 deg
    int n_elements = 8;
    double element_spacing_wl = 0.5;
};

struct LinkGeometry {
    double r_horiz_m = 0;
    double dh_m = 0;        // uav height - bs height
    double dist3d_m = 0;
    double elev_angle_rad = 0;  // atan2(dh, r_horiz)
    double azimuth_rad = 0;     // bearing from UAV to BS
};

LinkGeometry link_geometry(const Point3& uav, const BaseStation& bs);

// Exact slab test against every footprint the horizontal projection crosses:
// blocked iff the building top reaches the segment's lowest height over the
// crossed interval.
bool is_blocked(const CityTopology& topo, const Point3& uav, const BaseStation& bs);

// Sampling reference used by tests: walks the 3D segment every step_m meters.
bool is_blocked_oracle(const CityTopology& topo, const Point3& uav, const BaseStation& bs,
                       double step_m);

// Main-lobe gain of the UAV's directional antenna; zero off-lobe by
// definition, enforced through beam membership.
double uav_antenna_gain(double beamwidth_rad);

// Rectangular beam aimed at the serving BS: membership is an angular window
// of half-width beamwidth/2 in both elevation and (wrapped) azimuth,
// inclusive at the edge.
bool in_beam(const LinkGeometry& serving, const LinkGeometry& other, double beamwidth_rad);

// Uniform-linear-array factor, boresight at the downtilt angle. Equals
// n_elements at boresight and never exceeds it.
double bs_vertical_gain(double elev_angle_rad, const RadioParams& params);

double received_power(const LinkGeometry& geom, bool blocked, double gain_uav,
                      const RadioParams& params);

// Linear SINR of the serving link; interference only from in-beam BSs,
// each with its own LoS/NLoS blockage state.
double sinr(const CityTopology& topo, const Point3& uav, int serving_idx,
            const RadioParams& params);

double spectral_efficiency(double sinr_linear);

}  // namespace uavsim
