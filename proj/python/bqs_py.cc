#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bqs/errors.h"
#include "bqs/harness.h"

namespace py = pybind11;
using namespace bqs;

namespace {

py::object to_py(const Json &j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::string bits(const BitString &b) { return b.to_string(); }

SecurityParams params_from(std::int64_t n, std::int64_t ell, std::int64_t m, std::int64_t beta, double eps) {
  SecurityParams p;
  p.n = n;
  p.ell = ell;
  p.m = m;
  p.beta = beta;
  p.eps = eps;
  p.validate();
  return p;
}

Json bqs_ot(std::int64_t n, std::int64_t ell, const std::string &receiver, const std::string &variant,
            std::int64_t m, std::int64_t beta, std::uint64_t seed, std::uint64_t trial) {
  auto p = params_from(n, ell, m, beta, 0.0625);
  ProtocolOptions opt;
  opt.variant = parse_model_variant(variant);
  Rng rng = Rng(seed, 0).fork(trial);
  auto r = run_bqs_ot(p, make_strategy(receiver, p, opt.variant), rng, opt, trial);
  Json j;
  j["s0"] = bits(r.sender_output.x0);
  j["s1"] = bits(r.sender_output.x1);
  if (r.receiver_output) {
    j["c"] = r.receiver_output->c;
    j["y"] = bits(r.receiver_output->y);
  }
  if (r.adversary.guess) {
    j["guess0"] = bits(r.adversary.guess->x0);
    j["guess1"] = bits(r.adversary.guess->x1);
  }
  j["qubits_at_bound"] = r.adversary.qubits_at_bound;
  j["within_proven_bounds"] = r.within_proven_bounds;
  Json rows = Json::array();
  for (const auto &e : r.transcript.events()) rows.push_back(Json::parse(to_json_line(e)));
  j["transcript"] = rows;
  return j;
}

// (values, probability) rows, one alphabet per variable; mass is renormalized.
JointDistribution table_from(const std::vector<std::string> &names, const std::vector<std::uint64_t> &alphabets,
                             const std::vector<std::pair<std::vector<std::uint64_t>, double>> &rows) {
  if (names.size() != alphabets.size()) throw std::invalid_argument("names and alphabets differ in length");
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < names.size(); ++i) vars.push_back({names[i], alphabets[i]});
  DistributionBuilder<double> b(vars);
  for (const auto &[values, prob] : rows) b.add(values, prob);
  return b.build(true);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bounded-quantum-storage oblivious transfer: protocols, bounds and checks";
  m.attr("__version__") = "0.1.0";

  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);
  py::register_exception<MemoryBoundViolation>(m, "MemoryBoundViolation", PyExc_RuntimeError);
  py::register_exception<StrategyRejected>(m, "StrategyRejected", PyExc_RuntimeError);
  py::register_exception<InfeasibleParameters>(m, "InfeasibleParameters", PyExc_RuntimeError);

  m.def("uncertainty_bound", &uncertainty_bound, py::arg("n"), py::arg("eps"));
  m.def("ell_budget", &ell_budget, py::arg("n"), py::arg("eps"));
  m.def(
      "max_ell",
      [](std::int64_t n, std::int64_t mem, std::int64_t beta, double eps, const std::string &variant) {
        return max_ell(n, mem, beta, eps, parse_variant(variant));
      },
      py::arg("n"), py::arg("m"), py::arg("beta"), py::arg("eps"), py::arg("variant") = "main");
  m.def(
      "min_n",
      [](std::int64_t ell, std::int64_t mem, std::int64_t beta, double eps, const std::string &variant) {
        return min_n(ell, mem, beta, eps, parse_variant(variant));
      },
      py::arg("ell"), py::arg("m"), py::arg("beta"), py::arg("eps"), py::arg("variant") = "main");
  m.def(
      "params_report",
      [](std::int64_t n, std::int64_t ell, std::int64_t mem, std::int64_t beta, double eps,
         const std::string &variant) {
        return to_py(params_report(params_from(n, ell, mem, beta, eps), parse_variant(variant)));
      },
      py::arg("n"), py::arg("ell") = 4, py::arg("m") = 0, py::arg("beta") = 0, py::arg("eps") = 0.0625,
      py::arg("variant") = "main");

  m.def(
      "hash",
      [](const std::string &matrix, std::size_t n, std::size_t ell, const std::string &x) {
        return bits(hash(HashSeed(n, ell, BitString::from_string(matrix)), BitString::from_string(x)));
      },
      py::arg("matrix"), py::arg("n"), py::arg("ell"), py::arg("x"),
      "M x over GF(2) for a row-major ell x n matrix given as a bit string.");
  m.def(
      "collision_probability",
      [](std::size_t n, std::size_t ell, const std::string &x0, const std::string &x1) {
        return collision_probability(n, ell, BitString::from_string(x0), BitString::from_string(x1));
      },
      py::arg("n"), py::arg("ell"), py::arg("x0"), py::arg("x1"));
  m.def("pa_extractable_length", &pa_extractable_length, py::arg("h_min"), py::arg("q"), py::arg("eps"));
  m.def("pa_distance", &pa_distance, py::arg("pxz"), py::arg("n"), py::arg("ell"),
        "Exact distance of (h(S,X), S, Z) from uniform; pxz[x][z] = P(X=x, Z=z).");

  m.def(
      "smooth_min_entropy",
      [](const std::vector<std::string> &names, const std::vector<std::uint64_t> &alphabets,
         const std::vector<std::pair<std::vector<std::uint64_t>, double>> &rows, const std::vector<std::string> &target,
         const std::vector<std::string> &given, double eps) {
        return smooth_min_entropy(table_from(names, alphabets, rows), target, given, eps);
      },
      py::arg("names"), py::arg("alphabets"), py::arg("rows"), py::arg("target"), py::arg("given"),
      py::arg("eps") = 0.0, "H^eps_min(target | given) of a table of (values, probability) rows.");

  m.def("run_bqs_ot",
        [](std::int64_t n, std::int64_t ell, const std::string &receiver, const std::string &variant,
           std::int64_t mem, std::int64_t beta, std::uint64_t seed, std::uint64_t trial) {
          return to_py(bqs_ot(n, ell, receiver, variant, mem, beta, seed, trial));
        },
        py::arg("n"), py::arg("ell"), py::arg("receiver") = "honest", py::arg("variant") = "refined",
        py::arg("m") = 0, py::arg("beta") = 0, py::arg("seed") = 0, py::arg("trial") = 0);

  m.def(
      "run_ot_from_rot",
      [](const std::string &x0, const std::string &x1, int c, std::uint64_t seed) {
        Rng rng(seed, 0);
        auto r = run_ot_from_rot({BitString::from_string(x0), BitString::from_string(x1)}, c, rng);
        return py::make_tuple(bits(r.y), r.d, bits(r.m.x0), bits(r.m.x1));
      },
      py::arg("x0"), py::arg("x1"), py::arg("c"), py::arg("seed") = 0, "Returns (y, d, m0, m1).");

  m.def(
      "run_bc",
      [](int b, int a, std::size_t ell, const std::string &committer, std::uint64_t seed) {
        Rng rng(seed, 0);
        auto who = committer == "binding" ? binding_attacker() : AdversaryStrategy{"honest", Role::Committer};
        auto r = run_bc(b, a, ell, rng, who);
        py::object out = r.verifier_output ? py::object(py::int_(*r.verifier_output)) : py::object(py::none());
        return py::make_tuple(out, r.m, r.cheat_success);
      },
      py::arg("b"), py::arg("a"), py::arg("ell"), py::arg("committer") = "honest", py::arg("seed") = 0,
      "Returns (verifier output or None, commit message, cheat success).");

  m.def(
      "compose_bc",
      [](std::int64_t n, std::int64_t ell, int b, int a, std::uint64_t seed) {
        SecurityParams p = params_from(n, ell, 0, 0, 0.0625);
        Rng rng(seed, 0);
        auto r = compose_bc(p, b, a, rng);
        Json j;
        j["output"] = r.verifier_output ? Json(*r.verifier_output) : Json(nullptr);
        j["eps"] = r.eps;
        j["error_budget"] = r.error_budget;
        j["within_proven_bounds"] = r.within_proven_bounds;
        return to_py(j);
      },
      py::arg("n"), py::arg("ell"), py::arg("b"), py::arg("a"), py::arg("seed") = 0);

  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string> &settings) {
        ExperimentConfig cfg;
        for (const auto &[k, v] : settings) cfg.set(k, v);
        DistinguishReport rep;
        {
          py::gil_scoped_release release;
          rep = run_experiment(cfg);
        }
        return to_py(to_json(rep));
      },
      py::arg("config"), "Real-versus-ideal experiment; config keys as in the key=value file format.");

  m.def(
      "uniformity_test",
      [](const std::vector<std::string> &samples, double delta) {
        std::vector<BitString> s;
        for (const auto &t : samples) s.push_back(BitString::from_string(t));
        auto r = uniformity_test(s, delta);
        return py::make_tuple(r.tv_from_uniform, r.radius);
      },
      py::arg("samples"), py::arg("delta") = 0.01, "Returns (tv_from_uniform, radius).");

  m.def(
      "verify_lemmas",
      [](const std::string &suite, std::uint64_t cases, std::uint64_t seed) {
        return to_py(to_json(verify_lemmas(suite, cases, seed)));
      },
      py::arg("suite"), py::arg("cases"), py::arg("seed") = 0);

  m.def("scenario_names", &scenario_names);
  m.def("suite_names", &suite_names);
}
