#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "llweave/composer.hpp"
#include "llweave/server.hpp"
#include "llweave/sim.hpp"

namespace py = pybind11;
using namespace llweave;

namespace {

std::vector<std::string> from_names(const pi::Names& v) {
  std::vector<std::string> out;
  for (const auto& n : v) out.push_back(n.str());
  return out;
}

std::set<std::string> from_set(const ChannelSet& s) {
  std::set<std::string> out;
  for (const auto& n : s) out.insert(n.str());
  return out;
}

std::map<std::string, int> counts_of(const kernel::Theorem& t) {
  std::map<std::string, int> out;
  for (auto [rule, n] : kernel::rule_counts(t.derivation())) out[std::string(kernel::to_string(rule))] = n;
  return out;
}

sim::Policy make_policy(const std::string& name, std::optional<std::uint64_t> seed,
                        std::optional<std::vector<std::size_t>> script) {
  if (name == "first") return sim::Policy::first();
  if (name == "random") {
    if (!seed) throw Error(ErrorCode::InvalidArgument, "the random policy needs a seed");
    return sim::Policy::random(*seed);
  }
  if (name == "script") return sim::Policy::script(script.value_or(std::vector<std::size_t>{}));
  throw Error(ErrorCode::InvalidArgument, "unknown policy '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Linear-logic service composition with pi-calculus extraction";

  static py::exception<Error> error(m, "LlweaveError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<cll::Formula>(m, "Formula")
      .def(py::init([](const std::string& text) { return cll::parse_formula(text); }))
      .def_property_readonly("is_atom", &cll::Formula::is_atom)
      .def_property_readonly("depth", &cll::Formula::depth)
      .def("negate", [](const cll::Formula& f) { return cll::negate(f); })
      .def("__str__", [](const cll::Formula& f) { return cll::print_formula(f); })
      .def("__repr__", [](const cll::Formula& f) { return "Formula('" + cll::print_formula(f) + "')"; })
      .def("__eq__", [](const cll::Formula& a, const cll::Formula& b) { return a == b; })
      .def("__hash__", [](const cll::Formula& f) { return std::hash<std::string>{}(cll::print_formula(f)); });

  py::class_<cll::AnnotatedSequent>(m, "Sequent")
      .def(py::init([](const std::string& text) { return cll::parse_sequent(text); }))
      .def_property_readonly("entries",
                             [](const cll::AnnotatedSequent& s) {
                               std::vector<std::pair<std::string, cll::Formula>> out;
                               for (const auto& e : s.entries()) out.emplace_back(e.channel.str(), e.formula);
                               return out;
                             })
      .def_property_readonly("channels", [](const cll::AnnotatedSequent& s) { return from_set(s.channels()); })
      .def("__len__", &cll::AnnotatedSequent::size)
      .def("__str__", [](const cll::AnnotatedSequent& s) { return cll::print_sequent(s); })
      .def("__repr__", [](const cll::AnnotatedSequent& s) { return "Sequent('" + cll::print_sequent(s) + "')"; })
      .def("__eq__", [](const cll::AnnotatedSequent& a, const cll::AnnotatedSequent& b) { return a == b; });

  py::class_<pi::Process>(m, "Process")
      .def(py::init([](const std::string& text) { return pi::parse_process(text); }))
      .def_property_readonly("free_names", [](const pi::Process& p) { return from_set(pi::free_names(p)); })
      .def("canonical_form", [](const pi::Process& p) { return pi::canonical_form(p); })
      .def("congruent", [](const pi::Process& p, const pi::Process& q) { return pi::struct_congruent(p, q); })
      .def("substitute",
           [](const pi::Process& p, const std::map<std::string, std::string>& map) {
             pi::Substitution s;
             for (const auto& [k, v] : map) s.emplace(ChannelName::parse(k), ChannelName::parse(v));
             return pi::substitute(p, s);
           })
      .def("redex_count", [](const pi::Process& p) { return pi::enabled_redexes(p).size(); })
      .def("__str__", [](const pi::Process& p) { return pi::print_process(p); })
      .def("__repr__", [](const pi::Process& p) { return "Process('" + pi::print_process(p) + "')"; })
      .def("__eq__", [](const pi::Process& a, const pi::Process& b) { return a == b; });

  py::class_<kernel::Theorem>(m, "Theorem")
      .def_property_readonly("sequent", &kernel::Theorem::sequent)
      .def_property_readonly("process", &kernel::Theorem::process)
      .def_property_readonly("rule_counts", &counts_of)
      .def_property_readonly("services_used",
                             [](const kernel::Theorem& t) { return kernel::axiom_leaves(t.derivation()); })
      .def("proof_json", [](const kernel::Theorem& t) { return kernel::proof_to_json(t.derivation()).dump(); })
      .def("__repr__", [](const kernel::Theorem& t) { return "Theorem('" + cll::print_sequent(t.sequent()) + "')"; });

  m.def("ax", [](const cll::Formula& f, const std::string& x, const std::string& y) {
    return kernel::ax(f, ChannelName::parse(x), ChannelName::parse(y));
  });
  m.def("tensor", [](const kernel::Theorem& l, const kernel::Theorem& r, const std::string& x, const std::string& y,
                     const std::string& z) {
    return kernel::tensor(l, r, ChannelName::parse(x), ChannelName::parse(y), ChannelName::parse(z));
  });
  m.def("par", [](const kernel::Theorem& t, const std::string& x, const std::string& y, const std::string& z) {
    return kernel::par(t, ChannelName::parse(x), ChannelName::parse(y), ChannelName::parse(z));
  });
  m.def("plus_l", [](const kernel::Theorem& t, const std::string& x, const cll::Formula& b, const std::string& z) {
    return kernel::plus_l(t, ChannelName::parse(x), b, ChannelName::parse(z));
  });
  m.def("plus_r", [](const kernel::Theorem& t, const std::string& y, const cll::Formula& a, const std::string& z) {
    return kernel::plus_r(t, ChannelName::parse(y), a, ChannelName::parse(z));
  });
  m.def("with_", [](const kernel::Theorem& l, const kernel::Theorem& r, const std::string& x, const std::string& y,
                    const std::string& z) {
    return kernel::with_(l, r, ChannelName::parse(x), ChannelName::parse(y), ChannelName::parse(z));
  });
  m.def("cut", [](const kernel::Theorem& l, const kernel::Theorem& r, const std::string& x, const std::string& y) {
    return kernel::cut(l, r, ChannelName::parse(x), ChannelName::parse(y));
  });
  m.def("assume", &kernel::assume, py::arg("name"), py::arg("sequent"));
  m.def("identity_expand", [](const cll::Formula& f, const std::string& x, const std::string& y) {
    return kernel::identity_expand(f, ChannelName::parse(x), ChannelName::parse(y));
  });

  py::class_<services::ServiceSpec>(m, "ServiceSpec")
      .def(py::init([](std::string name, std::vector<std::string> inputs, std::vector<std::string> outputs,
                       std::vector<std::string> preconditions, std::vector<std::string> effects,
                       std::optional<std::string> exception) {
             return services::ServiceSpec{std::move(name),          std::move(inputs),  std::move(outputs),
                                          std::move(preconditions), std::move(effects), std::move(exception)};
           }),
           py::arg("name"), py::arg("inputs") = std::vector<std::string>{},
           py::arg("outputs") = std::vector<std::string>{}, py::arg("preconditions") = std::vector<std::string>{},
           py::arg("effects") = std::vector<std::string>{}, py::arg("exception") = std::nullopt)
      .def_readwrite("name", &services::ServiceSpec::name)
      .def_readwrite("inputs", &services::ServiceSpec::inputs)
      .def_readwrite("outputs", &services::ServiceSpec::outputs)
      .def_readwrite("preconditions", &services::ServiceSpec::preconditions)
      .def_readwrite("effects", &services::ServiceSpec::effects)
      .def_readwrite("exception", &services::ServiceSpec::exception)
      .def("__repr__", [](const services::ServiceSpec& s) { return "ServiceSpec('" + s.name + "')"; });

  py::class_<services::ProcessDef>(m, "ProcessDef")
      .def_readonly("name", &services::ProcessDef::name)
      .def_property_readonly("params", [](const services::ProcessDef& d) { return from_names(d.params); })
      .def_property_readonly("constants", [](const services::ProcessDef& d) { return from_names(d.constants); })
      .def_readonly("body", &services::ProcessDef::body);

  m.def("load_registry", &services::load_registry, py::arg("text"));
  m.def("load_request", &services::load_request, py::arg("text"));
  m.def("encode", &services::encode, py::arg("spec"));
  m.def("stub", &services::stub, py::arg("spec"));
  m.def("client", &services::client, py::arg("spec"), py::arg("name") = "Request");

  py::class_<composer::CompositionResult>(m, "Composition")
      .def_readonly("theorem", &composer::CompositionResult::theorem)
      .def_readonly("services_used", &composer::CompositionResult::services_used)
      .def_property_readonly("nodes_expanded",
                             [](const composer::CompositionResult& r) { return r.stats.nodes_expanded; })
      .def_property_readonly("elapsed", [](const composer::CompositionResult& r) { return r.stats.elapsed.count(); });

  m.def(
      "compose",
      [](const std::vector<services::ServiceSpec>& registry, const services::ServiceSpec& request, int max_depth,
         int max_cuts, long timeout_ms) {
        composer::SearchLimits limits;
        limits.max_depth = max_depth;
        limits.max_cuts = max_cuts;
        limits.timeout = std::chrono::milliseconds(timeout_ms);
        py::gil_scoped_release release;
        return composer::compose(registry, request, limits);
      },
      py::arg("registry"), py::arg("request"), py::arg("max_depth") = 12, py::arg("max_cuts") = 6,
      py::arg("timeout_ms") = 30000);

  m.def("instantiate", &sim::instantiate, py::arg("composition"), py::arg("defs"));
  m.def("assemble", &sim::assemble, py::arg("composition"), py::arg("client"), py::arg("stubs"));
  m.def(
      "run_trace",
      [](const pi::Process& p, const std::string& policy, std::optional<std::uint64_t> seed,
         std::optional<std::vector<std::size_t>> script, std::size_t step_limit) {
        return sim::trace_to_json(sim::run(p, make_policy(policy, seed, std::move(script)), step_limit)).dump();
      },
      py::arg("process"), py::arg("policy") = "first", py::arg("seed") = std::nullopt,
      py::arg("script") = std::nullopt, py::arg("step_limit") = sim::kDefaultStepLimit);
  m.def(
      "edge_report_dot", [](const pi::Process& p) { return sim::edge_report_to_dot(sim::edge_report(p)); },
      py::arg("process"));

  py::class_<sim::StepSession>(m, "StepSession")
      .def(py::init<pi::Process>(), py::arg("initial"))
      .def("state_json", [](const sim::StepSession& s) { return s.state().dump(); })
      .def("step_json", [](sim::StepSession& s, long long id) { return s.step("{\"id\": " + std::to_string(id) + "}").dump(); })
      .def("reset_json", [](sim::StepSession& s) { return s.reset().dump(); });
}
