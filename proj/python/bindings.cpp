#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "boxlb/bounds.hpp"
#include "boxlb/cli.hpp"
#include "boxlb/construct.hpp"
#include "boxlb/gf.hpp"
#include "boxlb/tensor.hpp"
#include "boxlb/trials.hpp"

namespace py = pybind11;
using namespace boxlb;

namespace {

py::object to_int(const BigInt& x) { return py::module_::import("builtins").attr("int")(x.str()); }

py::object to_fraction(const Rational& x) {
  return py::module_::import("fractions")
      .attr("Fraction")(to_int(boost::multiprecision::numerator(x)),
                        to_int(boost::multiprecision::denominator(x)));
}

Vector to_vector(const Field& f, const std::vector<std::uint32_t>& xs) {
  Vector v;
  v.reserve(xs.size());
  for (auto x : xs) {
    if (x >= f.order()) throw FieldError("coordinate " + std::to_string(x) + " is not a field element");
    v.push_back(Scalar{x});
  }
  return v;
}

std::vector<std::uint32_t> from_vector(const Vector& v) {
  std::vector<std::uint32_t> out;
  out.reserve(v.size());
  for (auto c : v) out.push_back(c.value);
  return out;
}

Scalar checked(const Field& f, std::uint32_t x) {
  if (x >= f.order()) throw FieldError(std::to_string(x) + " is not an element of GF(" + std::to_string(f.order()) + ")");
  return Scalar{x};
}

std::vector<std::vector<Point>> tuples_of(const TupleSet& set) {
  std::vector<std::vector<Point>> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(set.tuple(i));
  return out;
}

TupleSet edge_set_from(const Params& pr, const std::vector<std::vector<Point>>& tuples) {
  TupleSet probe(pr.points(), pr.d(), {});
  std::vector<std::uint64_t> codes;
  for (const auto& t : tuples) {
    if (t.size() != static_cast<std::size_t>(pr.d())) throw std::invalid_argument("tuple arity differs from d");
    for (auto p : t) {
      if (p >= pr.points()) throw std::invalid_argument("point out of range");
    }
    codes.push_back(probe.encode(t));
  }
  return TupleSet(pr.points(), pr.d(), std::move(codes));
}

py::dict record_dict(const TrialRecord& r) {
  py::dict d;
  d["index"] = r.index;
  d["edges"] = r.edges;
  d["boxes"] = r.boxes;
  d["lines"] = r.lines;
  d["bad"] = r.bad;
  d["kept"] = r.kept;
  d["box_free"] = r.box_free;
  d["meets_target"] = r.meets_target;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random multilinear constructions of box-free hypergraphs";

  auto field_error = py::register_exception<FieldError>(m, "FieldError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<VerificationError>(m, "VerificationError", PyExc_RuntimeError);
  (void)field_error;

  py::class_<Field>(m, "Field")
      .def(py::init([](std::uint32_t p, std::uint32_t k) { return Field::make(p, k); }), py::arg("p"),
           py::arg("k") = 1)
      .def_property_readonly("p", &Field::characteristic)
      .def_property_readonly("k", &Field::degree)
      .def_property_readonly("q", &Field::order)
      .def_property_readonly("modulus", &Field::modulus)
      .def("add", [](const Field& f, std::uint32_t a, std::uint32_t b) { return f.add(checked(f, a), checked(f, b)).value; })
      .def("sub", [](const Field& f, std::uint32_t a, std::uint32_t b) { return f.sub(checked(f, a), checked(f, b)).value; })
      .def("mul", [](const Field& f, std::uint32_t a, std::uint32_t b) { return f.mul(checked(f, a), checked(f, b)).value; })
      .def("neg", [](const Field& f, std::uint32_t a) { return f.neg(checked(f, a)).value; })
      .def("inv", [](const Field& f, std::uint32_t a) { return f.inv(checked(f, a)).value; })
      .def("div", [](const Field& f, std::uint32_t a, std::uint32_t b) { return f.div(checked(f, a), checked(f, b)).value; })
      .def("coefficients", [](const Field& f, std::uint32_t a) { return f.coefficients(checked(f, a)); })
      .def("__eq__", &Field::operator==)
      .def("__repr__", &Field::describe);

  m.def("is_irreducible", &is_irreducible, py::arg("poly"), py::arg("p"));
  m.def("default_modulus", &default_modulus, py::arg("p"), py::arg("k"));
  m.def(
      "linearly_independent",
      [](const Field& f, const std::vector<std::uint32_t>& v, const std::vector<std::uint32_t>& w) {
        return linearly_independent(f, to_vector(f, v), to_vector(f, w));
      },
      py::arg("field"), py::arg("v"), py::arg("w"));
  m.def(
      "affine_line_through",
      [](const Field& f, const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        const auto l = affine_line_through(f, to_vector(f, a), to_vector(f, b));
        return py::make_tuple(from_vector(l.base), from_vector(l.direction));
      },
      py::arg("field"), py::arg("p0"), py::arg("p1"));

  py::class_<MultilinearForm>(m, "Form")
      .def(py::init([](const Field& f, std::vector<std::size_t> dims, const std::vector<std::uint32_t>& coeffs) {
             return MultilinearForm(f, std::move(dims), to_vector(f, coeffs));
           }),
           py::arg("field"), py::arg("dims"), py::arg("coeffs"))
      .def_static(
          "random",
          [](const Field& f, std::vector<std::size_t> dims, std::uint64_t seed) {
            Rng rng(seed);
            return sample_uniform(f, std::move(dims), rng);
          },
          py::arg("field"), py::arg("dims"), py::arg("seed"))
      .def_static(
          "parse",
          [](const std::string& text) {
            std::istringstream in(text);
            return read_form(in);
          },
          py::arg("text"))
      .def_property_readonly("field", &MultilinearForm::field)
      .def_property_readonly("dims", &MultilinearForm::dims)
      .def_property_readonly("coeffs", [](const MultilinearForm& f) { return from_vector(f.coeffs()); })
      .def(
          "__call__",
          [](const MultilinearForm& f, const std::vector<std::vector<std::uint32_t>>& args) {
            std::vector<Vector> vs;
            for (const auto& a : args) vs.push_back(to_vector(f.field(), a));
            return evaluate(f, vs).value;
          },
          py::arg("args"))
      .def(
          "restrict",
          [](const MultilinearForm& f, const std::vector<std::vector<std::vector<std::uint32_t>>>& bases) {
            std::vector<SubspaceBasis> bs;
            for (const auto& b : bases) {
              std::vector<Vector> vs;
              for (const auto& v : b) vs.push_back(to_vector(f.field(), v));
              bs.emplace_back(f.field(), std::move(vs));
            }
            return restrict(f, bs);
          },
          py::arg("bases"))
      .def("__eq__", &MultilinearForm::operator==)
      .def("__str__", &form_to_string);

  m.def(
      "corner_interpolant_value",
      [](const Field& f, const std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>>& pairs,
         const std::vector<std::vector<std::uint32_t>>& points) {
        std::vector<std::pair<Vector, Vector>> ps;
        for (const auto& [a, b] : pairs) ps.emplace_back(to_vector(f, a), to_vector(f, b));
        std::vector<Vector> xs;
        for (const auto& x : points) xs.push_back(to_vector(f, x));
        return corner_interpolant(f, std::move(ps)).evaluate_at(xs).value;
      },
      py::arg("field"), py::arg("pairs"), py::arg("points"),
      "Value at `points` of the form equal to 1 on every corner of `pairs`.");

  // Bounds.
  m.def("upper_alpha", [](int d) { return to_fraction(upper_alpha(d)); }, py::arg("d"));
  m.def("deletion_alpha", [](int d) { return to_fraction(deletion_alpha(d)); }, py::arg("d"));
  m.def(
      "grs_alpha",
      [](int d) -> py::object {
        const auto g = grs_alpha(d);
        if (!g) return py::none();
        return py::make_tuple(to_int(g->s), to_fraction(g->alpha));
      },
      py::arg("d"), "(s, alpha), or None when gcd(d, 2^d - 1) > 1.");
  m.def(
      "new_alpha",
      [](int d, std::uint64_t r_max) {
        const auto n = new_alpha(d, r_max);
        return py::make_tuple(to_int(n.r), to_int(n.s), to_fraction(n.alpha));
      },
      py::arg("d"), py::arg("r_max") = 1, "(r, s, alpha).");
  m.def(
      "check_params", [](int d, std::uint64_t r, std::uint64_t s) { return check_params(d, BigInt(r), BigInt(s)); },
      py::arg("d"), py::arg("r"), py::arg("s"));
  m.def(
      "comparison_table",
      [](int d_min, int d_max) {
        py::list rows;
        for (const auto& row : comparison_table(d_min, d_max)) {
          py::dict r;
          r["d"] = row.d;
          r["upper"] = to_fraction(row.alpha_upper);
          r["deletion"] = to_fraction(row.alpha_deletion);
          r["grs"] = row.grs ? to_fraction(row.grs->alpha) : py::object(py::none());
          r["new"] = to_fraction(row.best.alpha);
          r["s"] = to_int(row.best.s);
          rows.append(r);
        }
        return rows;
      },
      py::arg("d_min"), py::arg("d_max"));

  // Construction.
  py::class_<Params>(m, "Params")
      .def(py::init([](int d, int r, int s, std::uint32_t p, std::uint32_t k) {
             return Params::make(d, r, s, Field::make(p, k));
           }),
           py::arg("d"), py::arg("r"), py::arg("s"), py::arg("p"), py::arg("k") = 1)
      .def_property_readonly("d", &Params::d)
      .def_property_readonly("r", &Params::r)
      .def_property_readonly("s", &Params::s)
      .def_property_readonly("q", &Params::q)
      .def_property_readonly("n", &Params::n)
      .def_property_readonly("field", &Params::field)
      .def_property_readonly("points", &Params::points)
      .def_property_readonly("theorem_regime", &Params::theorem_regime)
      .def_property_readonly("expected_edges", [](const Params& p) { return to_fraction(p.expected_edges()); })
      .def_property_readonly("expected_boxes", [](const Params& p) { return to_fraction(p.expected_boxes()); })
      .def("unpack", [](const Params& p, Point x) {
        if (x >= p.points()) throw std::invalid_argument("point out of range");
        return from_vector(p.space().unpack(x));
      });

  m.def(
      "sample_forms",
      [](const Params& p, std::uint64_t seed) {
        Rng rng(seed);
        return sample_forms(p, rng);
      },
      py::arg("params"), py::arg("seed"));
  m.def(
      "edges",
      [](const Params& p, const std::vector<MultilinearForm>& forms) {
        return tuples_of(build_edge_set(p, forms));
      },
      py::arg("params"), py::arg("forms"), "Tuples of packed points where every form is 1.");
  m.def(
      "boxes", [](const Params& p, const std::vector<MultilinearForm>& forms) { return tuples_of(find_boxes(p, forms).tuples()); },
      py::arg("params"), py::arg("forms"), "Flattened box witnesses (v_1^0, v_1^1, ..., v_d^0, v_d^1).");
  m.def(
      "count_boxes", [](const Params& p, const std::vector<MultilinearForm>& forms) { return count_boxes(p, forms); },
      py::arg("params"), py::arg("forms"));
  m.def(
      "find_box",
      [](const Params& p, const std::vector<std::vector<Point>>& edges) -> py::object {
        const auto w = find_box_witness(edge_set_from(p, edges));
        if (!w) return py::none();
        return py::cast(w->pairs);
      },
      py::arg("params"), py::arg("edges"), "A box among the given edges as d point pairs, or None.");
  m.def(
      "construct",
      [](const Params& p, const std::vector<MultilinearForm>& forms) {
        const auto inst = run_instance(p, forms);
        py::dict d;
        d["edges"] = tuples_of(inst.edges);
        d["bad"] = tuples_of(inst.bad);
        d["kept"] = tuples_of(inst.kept);
        d["boxes"] = inst.boxes.size();
        d["lines"] = inst.lines.size();
        d["direct_checked"] = inst.direct_checked;
        return d;
      },
      py::arg("params"), py::arg("forms"),
      "Edges, bad set and the box-free remainder for one form tuple.");
  m.def(
      "run_trials",
      [](const Params& p, std::uint64_t trials, std::uint64_t seed, const std::string& mode, unsigned workers) {
        TrialOptions opt;
        opt.trials = trials;
        opt.seed = seed;
        opt.workers = workers;
        if (mode == "exact") {
          opt.mode = Mode::exact;
        } else if (mode != "sampled") {
          throw std::invalid_argument("mode must be 'sampled' or 'exact'");
        }
        if (opt.mode == Mode::sampled && trials == 0) throw std::invalid_argument("trials must be positive");
        const auto st = run_trials(p, opt);
        py::dict d;
        py::list recs;
        for (const auto& r : st.records) recs.append(record_dict(r));
        d["records"] = recs;
        d["mean_edges"] = to_fraction(st.edges.mean());
        d["mean_boxes"] = to_fraction(st.boxes.mean());
        d["mean_lines"] = to_fraction(st.lines.mean());
        d["mean_bad"] = to_fraction(st.bad.mean());
        d["mean_kept"] = to_fraction(st.kept.mean());
        d["expected_edges"] = to_fraction(st.expected_edges);
        d["expected_boxes"] = to_fraction(st.expected_boxes);
        d["bad_bound"] = to_fraction(st.bad_bound);
        d["box_free"] = st.box_free;
        return d;
      },
      py::arg("params"), py::arg("trials") = 1, py::arg("seed") = 0, py::arg("mode") = "sampled",
      py::arg("workers") = 1);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool; returns (exit code, stdout, stderr).");
}
