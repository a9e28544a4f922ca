// Copyright 2026 The sarkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the synergy pipeline: representation fitting and
// decoding, the toy muscle environments, the soft actor-critic agent, and
// the experiment commands. Configs cross the boundary as plain dicts,
// matrices as NumPy arrays (always copied); all heavy state stays in C++.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "sarkit/envs/env.hpp"
#include "sarkit/envs/factory.hpp"
#include "sarkit/error.hpp"
#include "sarkit/harness/commands.hpp"
#include "sarkit/harness/experiment.hpp"
#include "sarkit/harness/pipeline.hpp"
#include "sarkit/matrix.hpp"
#include "sarkit/rl/policy_head.hpp"
#include "sarkit/rl/replay.hpp"
#include "sarkit/rl/sac.hpp"
#include "sarkit/rl/train.hpp"
#include "sarkit/rng.hpp"
#include "sarkit/synergy.hpp"

namespace py = pybind11;

namespace {

using sarkit::ActivationLog;
using sarkit::Matrix;
using sarkit::Rng;
using sarkit::SynergyRepresentation;
namespace harness = sarkit::harness;
namespace rl = sarkit::rl;

// ------------------------------------------------------- dict <-> json bridge

nlohmann::json to_json(const py::handle& value) {
  if (value.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(value)) return value.cast<bool>();
  if (py::isinstance<py::int_>(value)) {
    // Signed first; values above int64 max (e.g. 64-bit seeds) go unsigned.
    try {
      return value.cast<std::int64_t>();
    } catch (const py::cast_error&) {
      return value.cast<std::uint64_t>();
    }
  }
  if (py::isinstance<py::float_>(value)) return value.cast<double>();
  if (py::isinstance<py::str>(value)) return value.cast<std::string>();
  if (py::isinstance<py::dict>(value)) {
    nlohmann::json object = nlohmann::json::object();
    for (const auto& item : value.cast<py::dict>()) {
      object[py::str(item.first).cast<std::string>()] = to_json(item.second);
    }
    return object;
  }
  if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
    nlohmann::json array = nlohmann::json::array();
    for (const auto& item : value.cast<py::sequence>()) {
      array.push_back(to_json(item));
    }
    return array;
  }
  throw py::type_error("config values must be None, bool, int, float, str, "
                       "list, or dict");
}

py::object to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list list;
      for (const auto& item : j) list.append(to_py(item));
      return list;
    }
    case nlohmann::json::value_t::object: {
      py::dict dict;
      for (const auto& [key, item] : j.items()) {
        dict[py::str(key)] = to_py(item);
      }
      return dict;
    }
    default:
      throw py::type_error("unsupported JSON value");
  }
}

// ----------------------------------------------------- array <-> matrix bridge

Matrix to_matrix(const py::array_t<double, py::array::c_style |
                                               py::array::forcecast>& array) {
  if (array.ndim() != 2) throw py::type_error("expected a 2-D float array");
  Matrix out(static_cast<std::size_t>(array.shape(0)),
             static_cast<std::size_t>(array.shape(1)));
  const auto view = array.unchecked<2>();
  for (py::ssize_t r = 0; r < array.shape(0); ++r) {
    for (py::ssize_t c = 0; c < array.shape(1); ++c) {
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = view(r, c);
    }
  }
  return out;
}

py::array_t<double> to_array(const Matrix& matrix) {
  py::array_t<double> out({matrix.rows(), matrix.cols()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      view(static_cast<py::ssize_t>(r), static_cast<py::ssize_t>(c)) =
          matrix(r, c);
    }
  }
  return out;
}

// ----------------------------------------------------------------- env wrapper

// Owns the environment; random resets draw from a caller-provided stream.
class PyEnv {
 public:
  explicit PyEnv(const py::dict& config)
      : env_(sarkit::envs::make_env(to_json(config))) {}

  std::string name() const { return env_->name(); }
  std::size_t observation_dim() const { return env_->observation_dim(); }
  std::size_t action_dim() const { return env_->action_dim(); }
  std::vector<double> reset(Rng& rng) { return env_->reset(rng); }
  sarkit::envs::StepResult step(const std::vector<double>& action) {
    return env_->step(action);
  }
  std::vector<double> last_excitation() const { return env_->last_excitation(); }
  sarkit::envs::Env& raw() { return *env_; }

 private:
  std::unique_ptr<sarkit::envs::Env> env_;
};

harness::ExperimentConfig config_from_dict(const py::dict& config) {
  return harness::experiment_from_json(to_json(config));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Synergistic action representations for overactuated control";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sarkit::Error& e) {
      const std::string message =
          std::string(sarkit::error_kind_name(e.kind())) + ": " + e.what();
      PyErr_SetString(PyExc_RuntimeError, message.c_str());
    }
  });

  // ------------------------------------------------------------------ numerics
  py::class_<Rng>(m, "Rng", "Deterministic random stream (xoshiro-style)")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", [](Rng& rng) { return rng.uniform(); })
      .def("normal", [](Rng& rng) { return rng.normal(); })
      .def("fork", &Rng::fork, py::arg("stream"),
           "Independent stream derived from this seed");

  m.def("muscle_squash", py::overload_cast<double>(&sarkit::muscle_squash),
        py::arg("a"), "Policy range to excitation: 1/(1+exp(-5(a-0.5)))");
  m.def("muscle_squash",
        py::overload_cast<const std::vector<double>&>(&sarkit::muscle_squash),
        py::arg("a"));

  // ------------------------------------------------------------ representation
  py::class_<SynergyRepresentation>(m, "SynergyRepresentation",
                                    "Linear map from a low-dimensional "
                                    "coordination space to actuator commands")
      .def_readonly("actuator_dim", &SynergyRepresentation::actuator_dim)
      .def_readonly("n_syn", &SynergyRepresentation::n_syn)
      .def_property_readonly(
          "decode_matrix",
          [](const SynergyRepresentation& sar) { return to_array(sar.decode_matrix); })
      .def_readonly("component_variance", &SynergyRepresentation::component_variance)
      .def_readonly("mean", &SynergyRepresentation::mean)
      .def_readonly("seed", &SynergyRepresentation::seed)
      .def("save", &sarkit::save_sar, py::arg("path"))
      .def_static("load", &sarkit::load_sar, py::arg("path"))
      .def("__repr__", [](const SynergyRepresentation& sar) {
        return "<SynergyRepresentation " + std::to_string(sar.n_syn) + " x " +
               std::to_string(sar.actuator_dim) + ">";
      });

  m.def(
      "fit_sar",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             samples,
         std::size_t n_syn, std::uint64_t seed) {
        ActivationLog log{to_matrix(samples)};
        const std::size_t n =
            n_syn > 0 ? n_syn : sarkit::default_n_syn(log.actuator_dim());
        return sarkit::fit_sar(log, n, seed);
      },
      py::arg("samples"), py::arg("n_syn") = 0, py::arg("seed") = 1,
      "Extract a representation from logged activity (rows = timesteps, "
      "columns = actuators, entries in [0, 1]); n_syn=0 picks half the "
      "actuator count");
  m.def("random_representation", &sarkit::random_representation,
        py::arg("actuator_dim"), py::arg("n_syn"), py::arg("seed"),
        "Shape-matched control representation with no structure from data");
  m.def(
      "select_synergies",
      [](const SynergyRepresentation& sar, std::size_t k, bool most) {
        return sarkit::select_synergies(
            sar, k,
            most ? sarkit::SynergySubset::kMostInformative
                 : sarkit::SynergySubset::kLeastInformative);
      },
      py::arg("sar"), py::arg("k"), py::arg("most") = true);
  m.def("decode", &sarkit::decode, py::arg("sar"), py::arg("syn_action"),
        "Coordination-space coordinates to a clamped actuator command");
  m.def("blend", &sarkit::blend, py::arg("primary"), py::arg("secondary"),
        py::arg("weight"), "Elementwise weight*primary + (1-weight)*secondary");
  m.def(
      "synergy_contributions",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             syn_actions) {
        return sarkit::synergy_contributions(to_matrix(syn_actions));
      },
      py::arg("syn_actions"),
      "Per-synergy share of mean absolute command; shares sum to 1");
  m.def(
      "load_activation_log",
      [](const std::string& path) {
        return to_array(sarkit::load_activation_log(path).samples);
      },
      py::arg("path"));
  m.def(
      "save_activation_log",
      [](const std::string& path,
         const py::array_t<double, py::array::c_style | py::array::forcecast>&
             samples) {
        sarkit::save_activation_log(path, ActivationLog{to_matrix(samples)});
      },
      py::arg("path"), py::arg("samples"));

  // -------------------------------------------------------------- environments
  py::class_<sarkit::envs::StepResult>(m, "StepResult")
      .def_readonly("observation", &sarkit::envs::StepResult::observation)
      .def_readonly("reward", &sarkit::envs::StepResult::reward)
      .def_readonly("done", &sarkit::envs::StepResult::done)
      .def_readonly("terminal", &sarkit::envs::StepResult::terminal)
      .def_readonly("success", &sarkit::envs::StepResult::success)
      .def_readonly("distance", &sarkit::envs::StepResult::distance);

  py::class_<PyEnv>(m, "Env", "Episodic muscle-driven environment")
      .def(py::init<const py::dict&>(), py::arg("config"))
      .def_property_readonly("name", &PyEnv::name)
      .def_property_readonly("observation_dim", &PyEnv::observation_dim)
      .def_property_readonly("action_dim", &PyEnv::action_dim)
      .def("reset", &PyEnv::reset, py::arg("rng"))
      .def("step", &PyEnv::step, py::arg("action"))
      .def("last_excitation", &PyEnv::last_excitation);
  m.def(
      "make_env", [](const py::dict& config) { return PyEnv(config); },
      py::arg("config"));

  // ------------------------------------------------------------------------ rl
  py::class_<rl::PolicyHead>(m, "PolicyHead",
                             "Translates raw policy actions into actuator "
                             "commands (plain, blended, or pure synergy)")
      .def_static("plain", &rl::PolicyHead::plain, py::arg("actuator_dim"))
      .def_static("blended", &rl::PolicyHead::blended, py::arg("sar"),
                  py::arg("weight"))
      .def_static("pure_sar", &rl::PolicyHead::pure_sar, py::arg("sar"))
      .def_property_readonly("raw_dim", &rl::PolicyHead::raw_dim)
      .def_property_readonly("env_dim", &rl::PolicyHead::env_dim)
      .def_property_readonly("blend_weight", &rl::PolicyHead::blend_weight)
      .def("to_env_action", &rl::PolicyHead::to_env_action, py::arg("raw"));

  py::class_<rl::EvalStats>(m, "EvalStats")
      .def_readonly("mean_return", &rl::EvalStats::mean_return)
      .def_readonly("return_stddev", &rl::EvalStats::return_stddev)
      .def_readonly("success_rate", &rl::EvalStats::success_rate)
      .def_readonly("mean_distance", &rl::EvalStats::mean_distance);

  py::class_<rl::SacAgent>(m, "SacAgent",
                           "Twin-critic soft actor-critic with automatic "
                           "entropy tuning")
      .def(py::init([](std::size_t obs_dim, std::size_t act_dim,
                       const py::dict& config, std::uint64_t seed) {
             // Partial configs overlay the defaults, matching the experiment
             // config's "sac" section.
             const harness::ExperimentConfig overlay =
                 harness::experiment_from_json({{"sac", to_json(config)}});
             return rl::SacAgent(obs_dim, act_dim, overlay.sac, seed);
           }),
           py::arg("obs_dim"), py::arg("act_dim"),
           py::arg("config") = py::dict(), py::arg("seed") = 1)
      .def_property_readonly("obs_dim", &rl::SacAgent::obs_dim)
      .def_property_readonly("act_dim", &rl::SacAgent::act_dim)
      .def_property_readonly("alpha", &rl::SacAgent::alpha)
      .def("act", &rl::SacAgent::act_deterministic, py::arg("obs"),
           "Deterministic evaluation action (tanh of the mean head)")
      .def("act_stochastic", &rl::SacAgent::act_stochastic, py::arg("obs"),
           py::arg("rng"))
      .def("to_dict",
           [](const rl::SacAgent& agent) { return to_py(agent.to_json()); })
      .def_static("from_dict", [](const py::dict& checkpoint) {
        return rl::SacAgent::from_json(to_json(checkpoint));
      });

  m.def(
      "train",
      [](PyEnv& env, const rl::PolicyHead& head, rl::SacAgent& agent,
         std::uint64_t steps, std::uint64_t seed) {
        rl::ReplayBuffer buffer(agent.config().replay_capacity,
                                agent.obs_dim(), agent.act_dim());
        rl::TrainOptions options;
        options.steps = steps;
        Rng rng(seed);
        const rl::TrainMetrics metrics =
            rl::train_sac(env.raw(), head, agent, buffer, options, rng);
        py::list episodes;
        for (const rl::EpisodeRecord& episode : metrics.episodes) {
          py::dict row;
          row["step"] = episode.end_step;
          row["episode_return"] = episode.episode_return;
          row["success"] = episode.success;
          row["distance"] = episode.distance;
          episodes.append(row);
        }
        return episodes;
      },
      py::arg("env"), py::arg("head"), py::arg("agent"), py::arg("steps"),
      py::arg("seed") = 1,
      "Off-policy training for `steps` env steps; returns per-episode records");
  m.def(
      "evaluate",
      [](PyEnv& env, const rl::PolicyHead& head, const rl::SacAgent& agent,
         std::size_t episodes, std::uint64_t seed) {
        Rng rng(seed);
        return rl::evaluate_policy(env.raw(), head, agent, episodes, rng);
      },
      py::arg("env"), py::arg("head"), py::arg("agent"), py::arg("episodes"),
      py::arg("seed") = 1, "Deterministic rollouts; no parameter changes");

  // ------------------------------------------------------------------ commands
  auto commands = m.def_submodule(
      "commands", "Experiment pipeline stages; mirrors the command-line tool");
  commands.def(
      "play",
      [](const py::dict& config, const std::string& out_dir) {
        harness::cmd_play(config_from_dict(config), harness::ArtifactPaths(out_dir));
      },
      py::arg("config"), py::arg("out_dir"));
  commands.def(
      "fit_sar",
      [](const py::dict& config, const std::string& out_dir) {
        harness::cmd_fit(config_from_dict(config), harness::ArtifactPaths(out_dir));
      },
      py::arg("config"), py::arg("out_dir"));
  commands.def(
      "train",
      [](const py::dict& config, const std::string& out_dir,
         const std::optional<std::vector<std::string>>& conditions) {
        std::vector<harness::Condition> parsed;
        if (conditions) {
          for (const std::string& name : *conditions) {
            parsed.push_back(harness::condition_from_string(name));
          }
        } else {
          parsed = harness::all_conditions();
        }
        harness::cmd_train(config_from_dict(config), parsed,
                           harness::ArtifactPaths(out_dir));
      },
      py::arg("config"), py::arg("out_dir"), py::arg("conditions") = py::none());
  commands.def(
      "evaluate",
      [](const py::dict& config, const std::string& out_dir,
         const std::optional<std::vector<std::string>>& conditions) {
        std::vector<harness::Condition> parsed;
        if (conditions) {
          for (const std::string& name : *conditions) {
            parsed.push_back(harness::condition_from_string(name));
          }
        } else {
          parsed = harness::all_conditions();
        }
        harness::cmd_eval(config_from_dict(config), parsed,
                          harness::ArtifactPaths(out_dir));
      },
      py::arg("config"), py::arg("out_dir"), py::arg("conditions") = py::none());
  commands.def(
      "transfer",
      [](const py::dict& config, const std::string& out_dir,
         const std::vector<std::string>& terrains) {
        harness::cmd_transfer(config_from_dict(config), terrains,
                              harness::ArtifactPaths(out_dir));
      },
      py::arg("config"), py::arg("out_dir"), py::arg("terrains"));
  commands.def(
      "ablate",
      [](const py::dict& config, const std::string& out_dir,
         const std::string& kind) {
        harness::cmd_ablate(config_from_dict(config),
                            harness::ablation_kind_from_string(kind),
                            harness::ArtifactPaths(out_dir));
      },
      py::arg("config"), py::arg("out_dir"), py::arg("kind"));
  commands.def(
      "export_metrics",
      [](const std::string& metrics_dir, const std::string& out_dir) {
        harness::cmd_export(metrics_dir, harness::ArtifactPaths(out_dir));
      },
      py::arg("metrics_dir"), py::arg("out_dir"));

  m.def(
      "config_hash",
      [](const py::dict& config) { return harness::config_hash(to_json(config)); },
      py::arg("config"), "Canonical 16-hex-digit hash of a config document");
  m.def(
      "default_config",
      []() { return to_py(harness::experiment_to_json(harness::ExperimentConfig{})); },
      "The built-in experiment defaults as a dict");
}
