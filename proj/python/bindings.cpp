#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaussnet/dynamics.hpp"
#include "gaussnet/gaussian_state.hpp"
#include "gaussnet/graph.hpp"
#include "gaussnet/protocols.hpp"
#include "gaussnet/routing.hpp"
#include "gaussnet/scenario.hpp"
#include "gaussnet/serialize.hpp"
#include "gaussnet/version.hpp"

namespace py = pybind11;
using namespace gaussnet;

PYBIND11_MODULE(_gaussnet, m) {
    m.doc() = "Transfer and routing of Gaussian states over harmonic-oscillator networks";
    m.attr("__version__") = kVersion;

    py::register_exception<InvalidFrequency>(m, "InvalidFrequency", PyExc_ValueError);
    py::register_exception<IncompatibleStates>(m, "IncompatibleStates", PyExc_ValueError);
    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<InvalidGraph>(m, "InvalidGraph", PyExc_ValueError);
    py::register_exception<DegenerateGraph>(m, "DegenerateGraph", PyExc_ValueError);
    py::register_exception<InvalidPartition>(m, "InvalidPartition", PyExc_ValueError);
    py::register_exception<NonPhysicalCoupling>(m, "NonPhysicalCoupling", PyExc_ValueError);
    py::register_exception<NodeDecoupledFromMode>(m, "NodeDecoupledFromMode", PyExc_ValueError);
    py::register_exception<IncompleteTensor>(m, "IncompleteTensor", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    // ---- states ----
    py::class_<GaussianState>(m, "GaussianState")
        .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, Eigen::VectorXd>(), py::arg("cm"),
             py::arg("means"), py::arg("freqs"))
        .def_property_readonly("n_modes", &GaussianState::n_modes)
        .def_property_readonly("cm", &GaussianState::cm)
        .def_property_readonly("means", &GaussianState::means)
        .def_property_readonly("freqs", &GaussianState::freqs)
        .def("dimensionless_cm", &GaussianState::dimensionless_cm)
        .def("dimensionless_means", &GaussianState::dimensionless_means)
        .def("at_frequency", &GaussianState::at_frequency)
        .def("validate", &GaussianState::validate, py::arg("sym_tol") = 1e-10,
             py::arg("unc_tol") = 1e-9);

    m.def("squeezed_vacuum", &squeezed_vacuum, py::arg("r"), py::arg("phi"), py::arg("omega"),
          py::arg("n_th") = 0.0);
    m.def("coherent", &coherent, py::arg("alpha"), py::arg("omega"));
    m.def("two_mode_squeezed", &two_mode_squeezed, py::arg("s"), py::arg("phi"),
          py::arg("omega"));
    m.def("fidelity", &fidelity);
    m.def("fidelity_pure_target", &fidelity_pure_target);
    m.def("log_negativity", &log_negativity);
    m.def("squeezing_of", &squeezing_of);
    m.def("displacement_of", &displacement_of);
    m.def("marginal", &marginal);
    m.def("symplectic_eigenvalues", &symplectic_eigenvalues);
    m.def("tensor_product", &tensor_product);

    // ---- graphs ----
    py::class_<Graph>(m, "Graph")
        .def(py::init<int, std::vector<std::pair<int, int>>>(), py::arg("n"), py::arg("edges"))
        .def_readonly("n", &Graph::n)
        .def_readonly("edges", &Graph::edges)
        .def("degrees", &Graph::degrees)
        .def("edge_count", &Graph::edge_count)
        .def("is_connected", &Graph::is_connected)
        .def("component_count", &Graph::component_count)
        .def("hash", &Graph::hash);

    py::class_<Partition>(m, "Partition")
        .def(py::init<std::vector<int>>(), py::arg("labels"))
        .def_readonly("labels", &Partition::labels)
        .def("community_count", &Partition::community_count);

    m.def("laplacian", &laplacian);
    m.def("erdos_renyi", &erdos_renyi, py::arg("n"), py::arg("p"), py::arg("seed"));
    m.def("sbm", &sbm, py::arg("sizes"), py::arg("p_within"), py::arg("p_between"),
          py::arg("seed"));
    m.def("load_edge_list", &load_edge_list, py::arg("path"), py::arg("one_indexed") = false);
    m.def("save_edge_list", &save_edge_list);
    m.def("load_partition", &load_partition);
    m.def("modularity", &modularity);
    m.def("clustering_spectrum", &clustering_spectrum);
    m.def("joint_degree_census", [](const Graph& g) {
        std::map<std::pair<int, int>, int> census = joint_degree_census(g);
        py::dict out;
        for (auto& [k, v] : census) out[py::make_tuple(k.first, k.second)] = v;
        return out;
    });

    py::class_<RewireParams>(m, "RewireParams")
        .def(py::init<>())
        .def_readwrite("swap_factor", &RewireParams::swap_factor)
        .def_readwrite("anneal_factor", &RewireParams::anneal_factor)
        .def_readwrite("ck_tol", &RewireParams::ck_tol)
        .def_readwrite("t0", &RewireParams::t0)
        .def_readwrite("cooling", &RewireParams::cooling);
    py::class_<RewireResult>(m, "RewireResult")
        .def_readonly("graph", &RewireResult::graph)
        .def_readonly("ck_distance", &RewireResult::ck_distance)
        .def_readonly("converged", &RewireResult::converged);
    m.def(
        "rewire",
        [](const Graph& g, const std::string& mode, uint64_t seed, const RewireParams& params) {
            return rewire(g, rewire_mode_from_string(mode), seed, params);
        },
        py::arg("graph"), py::arg("mode"), py::arg("seed"),
        py::arg("params") = RewireParams{});

    // ---- dynamics ----
    py::class_<ExternalOscillator>(m, "ExternalOscillator")
        .def(py::init([](int attach_node, double k, double omega) {
                 return ExternalOscillator{attach_node, k, omega};
             }),
             py::arg("attach_node"), py::arg("k"), py::arg("omega"))
        .def_readwrite("attach_node", &ExternalOscillator::attach_node)
        .def_readwrite("k", &ExternalOscillator::k)
        .def_readwrite("omega", &ExternalOscillator::omega);

    py::class_<CompositeSystem>(m, "CompositeSystem")
        .def(py::init<Graph, double, double, std::vector<ExternalOscillator>>(),
             py::arg("graph"), py::arg("omega0"), py::arg("g"),
             py::arg("externals") = std::vector<ExternalOscillator>{})
        .def_readonly("graph", &CompositeSystem::graph)
        .def_readonly("omega0", &CompositeSystem::omega0)
        .def_readonly("g", &CompositeSystem::g)
        .def_readonly("externals", &CompositeSystem::externals)
        .def("total_modes", &CompositeSystem::total_modes)
        .def("bare_frequencies", &CompositeSystem::bare_frequencies);

    py::class_<NormalModeBasis>(m, "NormalModeBasis")
        .def_readonly("K", &NormalModeBasis::K)
        .def_readonly("Omega", &NormalModeBasis::Omega)
        .def_readonly("degenerate", &NormalModeBasis::degenerate)
        .def("size", &NormalModeBasis::size);

    m.def("potential_matrix", &potential_matrix);
    m.def("normal_modes", &normal_modes);
    m.def("propagator", &propagator);
    m.def("evolve", &evolve);
    m.def("ground_state", &ground_state);
    m.def("mode_overlap", &mode_overlap);
    m.def("mean_energy", &mean_energy);

    // ---- protocols ----
    py::enum_<ProtocolKind>(m, "ProtocolKind")
        .value("single_step", ProtocolKind::single_step)
        .value("two_step", ProtocolKind::two_step);

    py::class_<ProtocolParams>(m, "ProtocolParams")
        .def_readonly("kind", &ProtocolParams::kind)
        .def_readonly("c", &ProtocolParams::c)
        .def_readonly("mode_index", &ProtocolParams::mode_index)
        .def_readonly("g_eff", &ProtocolParams::g_eff)
        .def_readonly("t_stage", &ProtocolParams::t_stage)
        .def_readonly("omega_res", &ProtocolParams::omega_res);

    m.def("single_step_params", &single_step_params, py::arg("omega"), py::arg("c3"));
    m.def("two_step_params", &two_step_params, py::arg("omega"), py::arg("c2"));

    py::class_<AsymptoticRatios>(m, "AsymptoticRatios")
        .def_readonly("t2_over_t1", &AsymptoticRatios::t2_over_t1)
        .def_readonly("g2_over_sqrt2_g1", &AsymptoticRatios::g2_over_sqrt2_g1);
    m.def("asymptotic_ratios", &asymptotic_ratios);
    m.def("required_k", &required_k, py::arg("g_eff"), py::arg("overlap"));

    py::class_<WindowSpec>(m, "WindowSpec")
        .def(py::init([](double length, int samples) {
                 return WindowSpec{length, samples};
             }),
             py::arg("length") = 4.0, py::arg("samples") = 400)
        .def_readwrite("length", &WindowSpec::length)
        .def_readwrite("samples", &WindowSpec::samples)
        .def_static("standard", &WindowSpec::standard)
        .def_static("nominal_only", &WindowSpec::nominal_only);

    py::class_<TransferMetadata>(m, "TransferMetadata")
        .def_readonly("degenerate", &TransferMetadata::degenerate)
        .def_readonly("infeasible", &TransferMetadata::infeasible)
        .def_readonly("note", &TransferMetadata::note)
        .def_readonly("k_sender", &TransferMetadata::k_sender)
        .def_readonly("k_receiver", &TransferMetadata::k_receiver);

    py::class_<TransferResult>(m, "TransferResult")
        .def_readonly("fidelity_best", &TransferResult::fidelity_best)
        .def_readonly("t_best", &TransferResult::t_best)
        .def_readonly("fidelity_at_nominal", &TransferResult::fidelity_at_nominal)
        .def_readonly("efficiency", &TransferResult::efficiency)
        .def_readonly("efficiency_at_nominal", &TransferResult::efficiency_at_nominal)
        .def_readonly("mode_index", &TransferResult::mode_index)
        .def_readonly("sender_node", &TransferResult::sender_node)
        .def_readonly("receiver_node", &TransferResult::receiver_node)
        .def_readonly("params", &TransferResult::params)
        .def_readonly("metadata", &TransferResult::metadata);

    py::class_<NetworkContext>(m, "NetworkContext")
        .def(py::init<Graph, double, double>(), py::arg("graph"), py::arg("omega0"),
             py::arg("g"))
        .def_readonly("graph", &NetworkContext::graph)
        .def_readonly("basis", &NetworkContext::basis)
        .def_readonly("ground", &NetworkContext::ground);

    m.def("run_single_step",
          py::overload_cast<const NetworkContext&, int, int, int, int, const GaussianState&,
                            const WindowSpec&>(&run_single_step),
          py::arg("net"), py::arg("sender_node"), py::arg("receiver_node"),
          py::arg("mode_index"), py::arg("c3"), py::arg("payload"), py::arg("window"));
    m.def("run_two_step",
          py::overload_cast<const NetworkContext&, int, int, int, int, const GaussianState&,
                            const WindowSpec&>(&run_two_step),
          py::arg("net"), py::arg("sender_node"), py::arg("receiver_node"),
          py::arg("mode_index"), py::arg("c2"), py::arg("payload"), py::arg("window"));
    m.def("run_entanglement_transfer", &run_entanglement_transfer, py::arg("net"),
          py::arg("sender_node"), py::arg("receiver_node"), py::arg("mode_index"), py::arg("c3"),
          py::arg("s"), py::arg("phi"), py::arg("window"));

    py::enum_<IdealChainKind>(m, "IdealChainKind")
        .value("single_step", IdealChainKind::single_step)
        .value("two_step", IdealChainKind::two_step)
        .value("entanglement", IdealChainKind::entanglement);
    py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
        .def_readonly("t", &TrajectoryPoint::t)
        .def_readonly("fidelity", &TrajectoryPoint::fidelity)
        .def_readonly("efficiency", &TrajectoryPoint::efficiency);
    m.def("ideal_chain_run", &ideal_chain_run, py::arg("kind"), py::arg("c"),
          py::arg("payload"), py::arg("time_grid"));
    m.def("ideal_nominal_time", &ideal_nominal_time);

    // ---- routing metrics ----
    py::enum_<FidelityKind>(m, "FidelityKind")
        .value("window_max", FidelityKind::window_max)
        .value("nominal", FidelityKind::nominal);

    py::class_<TensorConfig>(m, "TensorConfig")
        .def(py::init<>())
        .def_readwrite("c3", &TensorConfig::c3)
        .def_readwrite("modes", &TensorConfig::modes)
        .def_readwrite("kind", &TensorConfig::kind)
        .def_readwrite("window", &TensorConfig::window)
        .def_readwrite("workers", &TensorConfig::workers)
        .def_property(
            "filter_top", [](const TensorConfig& c) { return c.filter.top_overlap; },
            [](TensorConfig& c, int v) { c.filter.top_overlap = v; });

    py::class_<FidelityTensor>(m, "FidelityTensor")
        .def_property_readonly("n_nodes", &FidelityTensor::n_nodes)
        .def_property_readonly("modes", &FidelityTensor::modes)
        .def_property_readonly("times", &FidelityTensor::times)
        .def("has", &FidelityTensor::has)
        .def("get", &FidelityTensor::get)
        .def("get_or_zero", &FidelityTensor::get_or_zero)
        .def("time_of", &FidelityTensor::time_of)
        .def("infeasible_count", &FidelityTensor::infeasible_count)
        .def("to_json", &FidelityTensor::to_json)
        .def_static("from_json", &FidelityTensor::from_json)
        .def("write_csv", &FidelityTensor::write_csv);

    m.def("pairwise_fidelity_tensor", &pairwise_fidelity_tensor, py::arg("net"),
          py::arg("payload"), py::arg("config"));
    m.def("node_capacity", &node_capacity);
    m.def("max_capacity", &max_capacity);
    m.def("good_transfer_fraction", &good_transfer_fraction);

    py::class_<CommunityReportRow>(m, "CommunityReportRow")
        .def_readonly("mode", &CommunityReportRow::mode)
        .def_readonly("community_mean", &CommunityReportRow::community_mean)
        .def_readonly("best", &CommunityReportRow::best)
        .def_readonly("top_two", &CommunityReportRow::top_two)
        .def_readonly("worst", &CommunityReportRow::worst)
        .def_readonly("rest", &CommunityReportRow::rest)
        .def_readonly("best_community", &CommunityReportRow::best_community)
        .def_readonly("second_community", &CommunityReportRow::second_community);
    m.def("community_fidelity_report", &community_fidelity_report);
    m.def("fidelity_based_partition", &fidelity_based_partition);

    // ---- serialization ----
    m.def("state_to_json", [](const GaussianState& s) { return to_json(s); });
    m.def("state_from_json", &state_from_json);
    m.def("transfer_result_csv_header", &transfer_result_csv_header);
    m.def("transfer_result_to_csv_row", [](const TransferResult& r) { return to_csv_row(r); });
    m.def("transfer_result_to_json", [](const TransferResult& r) { return to_json(r); });

    // ---- scenarios ----
    m.def("run_scenario_file",
          [](const std::string& path, const std::string& output_dir, int workers) {
              ScenarioResult res =
                  run_scenario(ScenarioConfig::from_file(path), output_dir, workers);
              return py::make_tuple(res.summary, res.metrics.dump(), res.output_files);
          },
          py::arg("path"), py::arg("output_dir") = "", py::arg("workers") = 0);
    m.def("validate_config_file", [](const std::string& path) {
        ValidationReport rep = validate_config(ScenarioConfig::from_file(path));
        return py::make_tuple(rep.ok(), rep.to_string());
    });
    m.def("scenario_catalog_json", &catalog_json);
}
