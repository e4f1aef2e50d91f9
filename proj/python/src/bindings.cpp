#include "cvrptw/bench.hpp"
#include "cvrptw/features.hpp"
#include "cvrptw/generator.hpp"
#include "cvrptw/solver.hpp"
#include "cvrptw/trainer.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>

namespace py = pybind11;
using namespace cvrptw;

namespace
{
    // pybind11 holders cannot be const; the data is never mutated through this handle
    using Problem = std::shared_ptr<ProblemData>;

    Problem hold(std::shared_ptr<const ProblemData> p) { return std::const_pointer_cast<ProblemData>(std::move(p)); }

    py::dict solution_dict(const Solution &sol)
    {
        py::list routes;
        for (const auto &r : sol.routes)
        {
            py::list stops;
            for (const auto &s : r.stops)
                stops.append(py::make_tuple(s.customer, s.service_start));
            routes.append(stops);
        }
        py::dict d;
        d["instance"] = sol.instance;
        d["distance"] = sol.total_distance;
        d["vehicles"] = sol.vehicle_count();
        d["routes"] = routes;
        d["json"] = solution_to_json(sol);
        return d;
    }

    InstanceClass parse_class(const std::string &name)
    {
        for (auto cls : {InstanceClass::C1, InstanceClass::R1, InstanceClass::RC1, InstanceClass::C2, InstanceClass::R2, InstanceClass::RC2})
            if (class_name(cls) == name)
                return cls;
        throw std::invalid_argument("unknown instance class " + name);
    }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Capacitated VRP with time windows, learned values plus exact sub-tour optimization";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

    py::class_<ProblemData, Problem>(m, "Problem")
        .def_property_readonly("name", [](const ProblemData &p) { return p.instance.name; })
        .def_property_readonly("size", [](const ProblemData &p) { return p.instance.size(); })
        .def_property_readonly("capacity", [](const ProblemData &p) { return p.instance.capacity; })
        .def_property_readonly("clusters", [](const ProblemData &p)
                               {
                                   std::vector<std::vector<int>> out;
                                   for (const auto &c : p.summary.clusters)
                                       out.push_back(c.members);
                                   return out;
                               })
        .def("__repr__", [](const ProblemData &p) { return "<Problem " + p.instance.name + " n=" + std::to_string(p.instance.size()) + ">"; });

    py::class_<NetworkParams>(m, "Network")
        .def_property_readonly("parameter_count", &NetworkParams::parameter_count)
        .def("value", [](const NetworkParams &p, const FeatureVector &x) { return forward(p, x); }, py::arg("features"))
        .def("save", [](const NetworkParams &p, const std::string &path) { save_network(p, path); }, py::arg("path"));

    m.def("load_instance", [](const std::string &path, int cluster_n) { return hold(ProblemData::make(load_solomon(path), cluster_n)); },
          py::arg("path"), py::arg("cluster_n") = kDefaultClusterN);
    m.def("parse_instance", [](const std::string &text, int cluster_n) { return hold(ProblemData::make(parse_solomon(std::string_view(text)), cluster_n)); },
          py::arg("text"), py::arg("cluster_n") = kDefaultClusterN);
    m.def("generate_instance", [](const std::string &cls, int index, int customers, std::uint64_t seed)
          { return hold(ProblemData::make(generate_instance(parse_class(cls), index, customers, seed))); },
          py::arg("cls"), py::arg("index"), py::arg("customers") = 25, py::arg("seed") = 0);
    m.def("c101_25", [] { return hold(ProblemData::make(parse_solomon(embedded_c101_25()))); });

    m.def("init_network", &init_network, py::arg("seed"));
    m.def("load_network", &load_network, py::arg("path"));

    m.attr("feature_names") = [] {
        std::vector<std::string> names;
        for (auto n : kFeatureNames)
            names.emplace_back(n);
        return names;
    }();
    m.def("initial_features", [](const Problem &p)
          {
              const EpisodeState state(p);
              py::list rows;
              for (const auto &d : state.feasible_pairs())
                  rows.append(py::make_tuple(d.vehicle, d.customer, extract(state, d.vehicle, d.customer)));
              return rows;
          },
          py::arg("problem"), "(vehicle, customer, features) for every feasible pair of the empty state");

    m.def("solve", [](const Problem &p, const NetworkParams &net, int kappa, int delta, int delta_tighten, int timeout_ms, double temperature,
                      int rollouts_per_branch, std::uint64_t seed, bool forward_opt, bool tighten)
          {
              SolveConfig cfg;
              cfg.rollout.kappa = kappa;
              cfg.rollout.temperature = temperature;
              cfg.rollout.rollouts_per_branch = rollouts_per_branch;
              cfg.rollout.seed = seed;
              cfg.delta = delta;
              cfg.delta_tighten = delta_tighten;
              cfg.timeout_ms = timeout_ms;
              cfg.forward_opt = forward_opt;
              cfg.tighten = tighten;
              std::optional<EpisodeResult> out;
              {
                  py::gil_scoped_release release;
                  out.emplace(solve(p, net, cfg));
              }
              const EpisodeResult &r = *out;
              py::dict d = solution_dict(r.solution);
              d["distance_before_tighten"] = r.stats.distance_before_tighten;
              d["nodes"] = r.stats.nodes;
              d["wall_ms"] = r.stats.wall_ms;
              return d;
          },
          py::arg("problem"), py::arg("network"), py::arg("kappa") = 5, py::arg("delta") = kDefaultForwardDelta,
          py::arg("delta_tighten") = kDefaultTightenDelta, py::arg("timeout_ms") = kDefaultTimeoutMs, py::arg("temperature") = 1.0,
          py::arg("rollouts_per_branch") = 1, py::arg("seed") = 0, py::arg("forward_opt") = true, py::arg("tighten") = true);

    m.def("train", [](const std::vector<Problem> &problems, std::size_t episodes, std::uint64_t seed, std::size_t sat_from_episode,
                      std::size_t batch_size, double gamma)
          {
              TrainOptions opt;
              opt.episodes = episodes;
              opt.seed = seed;
              opt.sat_from_episode = sat_from_episode;
              opt.config.batch_size = batch_size;
              opt.config.gamma = gamma;
              TrainResult r;
              {
                  py::gil_scoped_release release;
                  r = train({problems.begin(), problems.end()}, opt);
              }
              py::list log;
              for (const auto &row : r.log)
              {
                  py::dict d;
                  d["episode"] = row.episode;
                  d["instance"] = row.instance;
                  d["distance"] = row.distance;
                  d["raw_distance"] = row.raw_distance;
                  d["reward_mean"] = row.reward_mean;
                  d["epsilon"] = row.epsilon;
                  d["loss"] = row.loss ? py::cast(*row.loss) : py::none();
                  log.append(d);
              }
              return py::make_tuple(std::move(r.params), log);
          },
          py::arg("problems"), py::arg("episodes"), py::arg("seed") = 0, py::arg("sat_from_episode") = 4000, py::arg("batch_size") = 4096,
          py::arg("gamma") = 0.9);

    m.def("check_solution", [](const Problem &p, const std::string &json)
          {
              std::vector<std::string> out;
              for (const auto &v : check_feasible(p->instance, p->dist, solution_from_json(json)).violations)
                  out.emplace_back(to_string(v.kind));
              return out;
          },
          py::arg("problem"), py::arg("solution_json"), "violation kinds, empty when feasible");
}
