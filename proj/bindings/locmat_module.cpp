#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "locmat/cli.hpp"
#include "locmat/derivation.hpp"
#include "locmat/endo.hpp"
#include "locmat/minf.hpp"
#include "locmat/parser.hpp"

namespace py = pybind11;
using namespace locmat;

namespace {

FieldSpec field_from_string(const std::string& s) {
    if (s == "q") return FieldSpec::rationals();
    if (s.rfind("gf:", 0) == 0) return FieldSpec::gf(std::stol(s.substr(3)));
    throw py::value_error("field must be 'q' or 'gf:<p>'");
}

SessionConfig make_config(const std::string& field, int default_size, const std::map<int, int>& exceptions,
                          std::uint64_t seed) {
    return SessionConfig{field_from_string(field), SiteShape(default_size, exceptions), seed};
}

std::vector<Scalar> scalars_from_strings(FieldSpec field, const std::vector<std::string>& vals) {
    std::vector<Scalar> out;
    out.reserve(vals.size());
    for (const auto& v : vals) out.push_back(Scalar::from_string(field, v));
    return out;
}

std::vector<std::vector<std::string>> dense_to_strings(const DenseMatrix& m) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) {
        std::vector<std::string> row;
        row.reserve(static_cast<size_t>(m.cols()));
        for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).str());
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

PYBIND11_MODULE(_locmat, m) {
    m.doc() = "Exact kernel for derivations and endomorphisms of tensor products of matrix algebras.";

    py::register_exception<Error>(m, "KernelError");

    py::class_<SessionConfig>(m, "Session")
        .def(py::init(&make_config), py::arg("field") = "q", py::arg("default_size") = 2,
             py::arg("exceptions") = std::map<int, int>{}, py::arg("seed") = 0)
        .def_property_readonly("field", [](const SessionConfig& c) { return c.field.str(); })
        .def_property_readonly("shape", [](const SessionConfig& c) { return c.shape.str(); })
        .def_readonly("seed", &SessionConfig::seed)
        .def("__repr__",
             [](const SessionConfig& c) { return "Session(field=" + c.field.str() + ", shape=" + c.shape.str() + ")"; });

    py::class_<Element>(m, "Element")
        .def("__add__", &Element::add)
        .def("__sub__", &Element::sub)
        .def("__mul__", &Element::mul)
        .def("__eq__", [](const Element& a, const Element& b) { return a == b; })
        .def("__repr__", &Element::str)
        .def("__str__", &Element::str)
        .def("is_zero", &Element::is_zero)
        .def("support", &Element::support)
        .def("scale", [](const Element& e, const std::string& c) { return e.scale(Scalar::from_string(e.field(), c)); })
        .def("invert", &Element::invert)
        .def("shift", &Element::shift)
        .def("centralizer_check", &Element::centralizer_check)
        .def("factor_site", &Element::factor_site)
        .def("normalized_trace", [](const Element& e) { return e.normalized_trace().str(); })
        .def("dense", [](const Element& e, const std::vector<int>& sites) { return dense_to_strings(e.dense_expand(sites)); });

    m.def("parse", [](const std::string& text, const SessionConfig& cfg) { return parse_eval(text, cfg); },
          py::arg("text"), py::arg("session"), "Parse and evaluate an element expression.");
    m.def("unit", [](const SessionConfig& cfg) { return Element::one(cfg.field, cfg.shape); });
    m.def("matrix_unit", [](const SessionConfig& cfg, int site, int p, int q) {
        return Element::matrix_unit(cfg.field, cfg.shape, site, p, q);
    });
    m.def("commutator", [](const Element& x, const Element& y) { return commutator(x, y); });
    m.def("conjugate", [](const Element& a, const Element& x) { return conjugate(a, x); });
    m.def("peirce_project", [](const Element& u, const Element& e) { return peirce_project(u, e); });

    py::class_<Derivation>(m, "Derivation")
        .def("apply", &Derivation::apply)
        .def("is_inner_presented", [](const Derivation& d) { return d.kind() == Derivation::Kind::Inner; });

    m.def("inner_derivation", [](const Element& a) { return Derivation::inner(a); });
    m.def("sparse_derivation",
          [](const SessionConfig& cfg, const std::vector<std::pair<std::vector<int>, Element>>& members,
             const std::vector<std::pair<Element, int>>& families) {
              SparseSystem s(cfg.field, cfg.shape);
              for (const auto& [sites, e] : members) s.add_member(SiteSet(sites.begin(), sites.end()), e);
              for (const auto& [t, start] : families) s.add_family(t, start);
              return Derivation::sparse(std::move(s));
          },
          py::arg("session"), py::arg("members") = std::vector<std::pair<std::vector<int>, Element>>{},
          py::arg("families") = std::vector<std::pair<Element, int>>{});
    m.def("build_z", [](const SessionConfig& cfg) { return build_z(cfg.field, cfg.shape); });
    m.def("build_yk", [](const SessionConfig& cfg, int k) { return build_yk(cfg.field, cfg.shape, k); });
    m.def("leibniz_check", &leibniz_check);
    m.def("inner_solve_local", [](const Derivation& d, const std::vector<int>& sites) {
        return inner_solve_local(d, SiteSet(sites.begin(), sites.end()));
    });
    m.def("derivation_commutator", &derivation_commutator);
    m.def("equal_on_truncation", &equal_on_truncation);
    m.def("expand_basis", [](const Derivation& d, int truncate_at) {
        std::map<std::string, std::string> out;
        auto coeffs = expand_basis(d).truncate(truncate_at);
        for (const auto& [mono, c] : coeffs) {
            std::ostringstream key;
            bool first = true;
            for (const auto& e : mono.entries()) {
                if (!first) key << "*";
                first = false;
                key << "e[" << e.site << "](" << e.row << "," << e.col << ")";
            }
            out[key.str()] = c.str();
        }
        return out;
    }, py::arg("derivation"), py::arg("truncate_at"),
       "Basis coefficients of the members supported inside [1, truncate_at].");
    m.def("peel_derivation",
          [](const SessionConfig& cfg, const std::map<std::tuple<int, int, int>, Element>& images, int n) {
              std::map<GeneratorKey, Element> keyed;
              for (const auto& [k, v] : images)
                  keyed.emplace(GeneratorKey{std::get<0>(k), std::get<1>(k), std::get<2>(k)}, v);
              std::vector<std::pair<std::vector<int>, Element>> out;
              for (const auto& [sites, a] : peel_derivation(cfg.field, cfg.shape, keyed, n))
                  out.emplace_back(std::vector<int>(sites.begin(), sites.end()), a);
              return out;
          });

    py::class_<UnitalEndo>(m, "UnitalEndo")
        .def(py::init([](const SessionConfig& cfg, int source_level,
                         const std::map<std::tuple<int, int, int>, Element>& images) {
                 std::map<GeneratorKey, Element> keyed;
                 for (const auto& [k, v] : images)
                     keyed.emplace(GeneratorKey{std::get<0>(k), std::get<1>(k), std::get<2>(k)}, v);
                 return UnitalEndo(cfg.field, cfg.shape, source_level, std::move(keyed));
             }),
             py::arg("session"), py::arg("source_level"), py::arg("images"))
        .def_property_readonly("source_level", &UnitalEndo::source_level)
        .def_property_readonly("target_level", &UnitalEndo::target_level)
        .def("image", &UnitalEndo::image)
        .def("validate", [](const UnitalEndo& e) { return e.validate(); })
        .def("is_valid", &UnitalEndo::validate_endo)
        .def("apply", &UnitalEndo::apply);

    m.def("identity_endo", [](const SessionConfig& cfg, int level) {
        return UnitalEndo::identity(cfg.field, cfg.shape, level);
    });
    m.def("conjugation_endo", &UnitalEndo::from_conjugator, py::arg("u"), py::arg("source_level"));
    m.def("skolem_noether",
          [](const UnitalEndo& phi, const std::vector<int>& source_sites, const std::vector<int>& ambient_sites,
             std::uint64_t seed) { return skolem_noether(phi, source_sites, ambient_sites, seed); },
          py::arg("phi"), py::arg("source_sites"), py::arg("ambient_sites"), py::arg("seed") = 0);

    py::class_<ConjugatorSeq>(m, "ConjugatorSeq")
        .def(py::init([](const std::vector<Element>& elements) {
            return ConjugatorSeq(elements, ConjugatorSeq::Direction::Forward);
        }))
        .def("__len__", &ConjugatorSeq::size)
        .def("element", &ConjugatorSeq::element, py::arg("k"), "1-based access")
        .def("inverse", &ConjugatorSeq::inverse);

    m.def("factorize", &factorize, py::arg("phi"), py::arg("seed") = 0, py::arg("ambient_pad") = 0);
    m.def("recompose_apply", &recompose_apply);
    m.def("integrability_profile", &integrability_profile);
    m.def("example1_sequence", &example1_sequence);
    m.def("example2_sequence",
          [](const SessionConfig& cfg, int n_max) { return example2_sequence(cfg.field, cfg.shape, n_max); });
    m.def("example2_closed_form",
          [](const SessionConfig& cfg, int i) { return example2_closed_form(cfg.field, cfg.shape, i); });

    py::class_<FinitaryMatrix>(m, "FinitaryMatrix")
        .def(py::init([](const SessionConfig& cfg, const std::map<std::pair<long, long>, std::string>& entries) {
                 FinitaryMatrix f(cfg.field);
                 for (const auto& [k, v] : entries) f.add_entry(k.first, k.second, Scalar::from_string(cfg.field, v));
                 return f;
             }),
             py::arg("session"), py::arg("entries") = std::map<std::pair<long, long>, std::string>{})
        .def("__eq__", [](const FinitaryMatrix& a, const FinitaryMatrix& b) { return a == b; })
        .def("__repr__", &FinitaryMatrix::str)
        .def("is_zero", &FinitaryMatrix::is_zero)
        .def("entries", [](const FinitaryMatrix& f) {
            std::map<std::pair<long, long>, std::string> out;
            for (const auto& [k, v] : f.entries()) out[k] = v.str();
            return out;
        });

    py::class_<PatternMatrix>(m, "PatternMatrix")
        .def("__eq__", [](const PatternMatrix& a, const PatternMatrix& b) { return a == b; })
        .def("__repr__", &PatternMatrix::str)
        .def("is_zero", &PatternMatrix::is_zero)
        .def("window", [](const PatternMatrix& p, long n) { return dense_to_strings(p.window_eval(n)); });

    m.def("pattern_from_finitary", &PatternMatrix::from_finitary);
    m.def("pattern_identity", [](const SessionConfig& cfg) { return PatternMatrix::identity(cfg.field); });
    m.def("pattern_mul", &pattern_mul);
    m.def("pattern_commutator", &pattern_commutator);
    m.def("ad_apply", &ad_apply);
    m.def("build_z_minf", [](const SessionConfig& cfg) { return build_z_minf(cfg.field); });
    m.def("build_yk_minf", [](const SessionConfig& cfg, int k) { return build_yk_minf(cfg.field, k); });
    m.def("build_df", [](const SessionConfig& cfg, const std::vector<std::string>& f) {
        return build_df(cfg.field, scalars_from_strings(cfg.field, f));
    });
    m.def("build_af", [](const SessionConfig& cfg, const std::vector<std::string>& f) {
        return build_af(cfg.field, scalars_from_strings(cfg.field, f));
    });
    m.def("conjugate_by_af", [](const SessionConfig& cfg, const std::vector<std::string>& f, const FinitaryMatrix& x) {
        return conjugate_by_af(scalars_from_strings(cfg.field, f), x);
    });

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_command(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, "Run a CLI invocation in-process; returns (exit_code, stdout, stderr).");
}
