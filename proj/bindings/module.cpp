#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uavsim/harness.hpp"

namespace py = pybind11;
using namespace uavsim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cellular-connected UAV height adaptation simulator";

    py::class_<AreaSpec>(m, "AreaSpec")
        .def(py::init<>())
        .def_readwrite("side_m", &AreaSpec::side_m)
        .def("area_km2", &AreaSpec::area_km2);

    py::class_<BaseStation>(m, "BaseStation")
        .def_readonly("x_m", &BaseStation::x_m)
        .def_readonly("y_m", &BaseStation::y_m)
        .def_readonly("height_m", &BaseStation::height_m);

    py::class_<BuildingGrid>(m, "BuildingGrid")
        .def_readonly("pitch_m", &BuildingGrid::pitch_m)
        .def_readonly("footprint_side_m", &BuildingGrid::footprint_side_m)
        .def_readonly("heights_m", &BuildingGrid::heights_m)
        .def("count", &BuildingGrid::count);

    py::class_<CityTopology>(m, "CityTopology")
        .def_readonly("bss", &CityTopology::bss)
        .def_readonly("buildings", &CityTopology::buildings)
        .def_readonly("bs_density_km2", &CityTopology::bs_density_km2)
        .def_readonly("build_density_km2", &CityTopology::build_density_km2)
        .def_readonly("seed", &CityTopology::seed)
        .def("to_json", &topology_to_json);

    py::class_<RadioParams>(m, "RadioParams")
        .def(py::init<>())
        .def_readwrite("tx_power_w", &RadioParams::tx_power_w)
        .def_readwrite("near_field_c", &RadioParams::near_field_c)
        .def_readwrite("alpha_los", &RadioParams::alpha_los)
        .def_readwrite("alpha_nlos", &RadioParams::alpha_nlos)
        .def_readwrite("noise_w", &RadioParams::noise_w)
        .def_readwrite("beamwidth_rad", &RadioParams::beamwidth_rad)
        .def_readwrite("bs_downtilt_rad", &RadioParams::bs_downtilt_rad)
        .def_readwrite("n_elements", &RadioParams::n_elements)
        .def_readwrite("element_spacing_wl", &RadioParams::element_spacing_wl);

    py::class_<EpisodeConfig>(m, "EpisodeConfig")
        .def(py::init<>())
        .def_readwrite("steps_per_episode", &EpisodeConfig::steps_per_episode)
        .def_readwrite("h_init_m", &EpisodeConfig::h_init_m)
        .def_readwrite("h_min_m", &EpisodeConfig::h_min_m)
        .def_readwrite("h_max_m", &EpisodeConfig::h_max_m)
        .def_readwrite("dh_m", &EpisodeConfig::dh_m)
        .def_readwrite("k_nearest", &EpisodeConfig::k_nearest)
        .def_readwrite("x_start_m", &EpisodeConfig::x_start_m);

    m.def("generate_topology", &generate_topology, py::arg("seed"), py::arg("bs_density_km2"),
          py::arg("build_density_km2"), py::arg("area") = AreaSpec{},
          py::arg("building_area_m2") = 40.0, py::arg("height_scale_m") = 20.0,
          py::arg("bs_height_m") = 30.0);
    m.def("topology_from_json", &topology_from_json);

    m.def("sinr",
          [](const CityTopology& topo, double x, double y, double h, int serving,
             const RadioParams& params) { return sinr(topo, Point3{x, y, h}, serving, params); },
          py::arg("topology"), py::arg("x"), py::arg("y"), py::arg("h"), py::arg("serving_idx"),
          py::arg("params"));
    m.def("spectral_efficiency", &spectral_efficiency);
    m.def("uav_antenna_gain", &uav_antenna_gain);
    m.def("bs_vertical_gain", &bs_vertical_gain);
    m.def("is_blocked",
          [](const CityTopology& topo, double x, double y, double h, int bs_idx) {
              return is_blocked(topo, Point3{x, y, h}, topo.bss.at(bs_idx));
          });
    m.def("nearest_bs", &nearest_bs);

    m.def("run_cell",
          [](const std::string& policy, const std::string& variant, double bs_density,
             double build_density, std::uint64_t master_seed, int episodes, int replicate) {
              ExperimentConfig cfg;
              cfg.master_seed = master_seed;
              cfg.episodes = episodes;
              cfg.log_step_episodes = {1, episodes};
              CellSpec spec{bs_density, build_density, policy_from_string(policy),
                            variant_from_string(variant), replicate};
              CellResult result = run_cell(cfg, spec);
              py::dict out;
              out["cell_id"] = result.spec.id();
              out["topology_seed"] = result.topo_seed;
              out["throughput_bits_hz"] = result.throughput_bits_hz;
              out["mean_height_m"] = result.mean_height_m;
              return out;
          },
          py::arg("policy"), py::arg("variant") = "basic", py::arg("bs_density") = 5.0,
          py::arg("build_density") = 500.0, py::arg("master_seed") = 1,
          py::arg("episodes") = 300, py::arg("replicate") = 0,
          "Run one experiment cell and return its per-episode metrics");
}
