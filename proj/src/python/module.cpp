#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ehwsn/flow.hpp"
#include "ehwsn/queueing.hpp"
#include "ehwsn/simulator.hpp"

namespace py = pybind11;
using namespace ehwsn;

PYBIND11_MODULE(_ehwsn, m) {
    m.doc() = "analytic loss and harvesting resource allocation for "
              "energy-harvesting sensor networks";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<CyclicRoutingError>(m, "CyclicRoutingError", PyExc_ValueError);
    py::register_exception<DisconnectedNetworkError>(m, "DisconnectedNetworkError",
                                                     PyExc_RuntimeError);
    py::register_exception<BracketFailureError>(m, "BracketFailureError",
                                                PyExc_RuntimeError);
    py::register_exception<NoTrafficError>(m, "NoTrafficError", PyExc_ValueError);
    py::register_exception<InvalidCapacityError>(m, "InvalidCapacityError",
                                                 PyExc_ValueError);
    py::register_exception<ValidationError>(m, "TopologyValidationError",
                                            PyExc_ValueError);

    py::class_<NetworkTopology>(m, "NetworkTopology")
        .def(py::init<>())
        .def_readwrite("node_count", &NetworkTopology::node_count)
        .def_readwrite("positions", &NetworkTopology::positions)
        .def_readwrite("routing", &NetworkTopology::routing)
        .def_readwrite("generation_rates", &NetworkTopology::generation_rates)
        .def_readwrite("channel_loss", &NetworkTopology::channel_loss)
        .def("route_fraction", &NetworkTopology::route_fraction,
             py::arg("to"), py::arg("from_"))
        .def("set_route_fraction", &NetworkTopology::set_route_fraction,
             py::arg("to"), py::arg("from_"), py::arg("fraction"))
        .def_property_readonly("sink", &NetworkTopology::sink)
        .def_property_readonly("sensor_count", &NetworkTopology::sensor_count);

    py::class_<GenerationConfig>(m, "GenerationConfig")
        .def(py::init<>())
        .def_readwrite("node_count", &GenerationConfig::node_count)
        .def_readwrite("disk_radius", &GenerationConfig::disk_radius)
        .def_readwrite("connectivity_radius", &GenerationConfig::connectivity_radius)
        .def_readwrite("rng_seed", &GenerationConfig::rng_seed)
        .def_readwrite("max_retries", &GenerationConfig::max_retries);

    py::class_<Violation>(m, "Violation")
        .def_readonly("code", &Violation::code)
        .def_readonly("nodes", &Violation::nodes)
        .def_readonly("detail", &Violation::detail)
        .def("__repr__", &Violation::to_string);

    py::class_<ResourceBudget>(m, "ResourceBudget")
        .def(py::init<double, double>(), py::arg("mu_avg"), py::arg("cap_avg"))
        .def_readwrite("mu_avg", &ResourceBudget::mu_avg)
        .def_readwrite("cap_avg", &ResourceBudget::cap_avg);

    py::class_<HarvestingAllocation>(m, "HarvestingAllocation")
        .def(py::init<>())
        .def_readwrite("mu", &HarvestingAllocation::mu)
        .def_readwrite("cap", &HarvestingAllocation::cap);

    py::class_<OptimizerConfig>(m, "OptimizerConfig")
        .def(py::init<>())
        .def_readwrite("seed", &OptimizerConfig::seed)
        .def_readwrite("iterations", &OptimizerConfig::iterations)
        .def_readwrite("cooling", &OptimizerConfig::cooling)
        .def_readwrite("initial_temp_fraction", &OptimizerConfig::initial_temp_fraction)
        .def_readwrite("mu_log_step", &OptimizerConfig::mu_log_step)
        .def_readwrite("cap_step_fraction", &OptimizerConfig::cap_step_fraction)
        .def_readwrite("mu_min_fraction", &OptimizerConfig::mu_min_fraction)
        .def_readwrite("final_greedy_fraction", &OptimizerConfig::final_greedy_fraction);

    py::class_<FlowSolution>(m, "FlowSolution")
        .def_readonly("theta", &FlowSolution::theta)
        .def_readonly("node_loss", &FlowSolution::node_loss)
        .def_readonly("network_loss", &FlowSolution::network_loss);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("min_generated_events", &SimConfig::min_generated_events)
        .def_readwrite("warmup_events", &SimConfig::warmup_events)
        .def_readwrite("rng_seed", &SimConfig::rng_seed);

    py::class_<SimOutcome>(m, "SimOutcome")
        .def_readonly("generated", &SimOutcome::generated)
        .def_readonly("delivered", &SimOutcome::delivered)
        .def_readonly("lost_energy", &SimOutcome::lost_energy)
        .def_readonly("lost_channel", &SimOutcome::lost_channel)
        .def_readonly("empirical_loss", &SimOutcome::empirical_loss)
        .def_readonly("ci_halfwidth", &SimOutcome::ci_halfwidth)
        .def("total_lost", &SimOutcome::total_lost);

    m.def("generate_network", &generate_network, py::arg("config"), py::arg("rates"));
    m.def("validate_topology", &validate_topology, py::arg("topology"));
    m.def("save_topology", &save_topology, py::arg("topology"));
    m.def("load_topology", &load_topology, py::arg("json_text"));
    m.def("topological_order", &topological_order, py::arg("topology"));

    m.def("blocking_probability", &blocking_probability, py::arg("alpha"), py::arg("n"));
    m.def("effective_throughput_factor", &effective_throughput_factor,
          py::arg("alpha"), py::arg("n"));

    m.def("solve_flow", &solve_flow, py::arg("topology"), py::arg("allocation"));
    m.def("network_loss", &network_loss, py::arg("topology"), py::arg("flow"));
    m.def("theta_equal_loss", &theta_equal_loss, py::arg("topology"), py::arg("p"));

    m.def("uniform_allocation", &uniform_allocation, py::arg("node_count"),
          py::arg("budget"));
    m.def("f_alpha", &f_alpha, py::arg("alpha"), py::arg("topology"), py::arg("budget"));
    m.def("almost_fair_allocation", &almost_fair_allocation, py::arg("topology"),
          py::arg("budget"));
    m.def("optimal_allocation", &optimal_allocation, py::arg("topology"),
          py::arg("budget"), py::arg("config") = OptimizerConfig{},
          py::call_guard<py::gil_scoped_release>());

    m.def("simulate", &simulate, py::arg("topology"), py::arg("allocation"),
          py::arg("config"), py::call_guard<py::gil_scoped_release>());
}
