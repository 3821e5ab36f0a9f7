#include "boxlb/tensor.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace boxlb {

std::size_t coefficient_count(std::span<const std::size_t> dims) {
  std::size_t n = 1;
  for (auto m : dims) n *= m;
  return n;
}

MultilinearForm::MultilinearForm(Field field, std::vector<std::size_t> dims,
                                 std::vector<Scalar> coeffs)
    : field_(std::move(field)), dims_(std::move(dims)), coeffs_(std::move(coeffs)) {
  if (dims_.size() < 2) throw FieldError("a multilinear form needs arity at least 2");
  for (auto m : dims_) {
    if (m == 0) throw FieldError("slot dimensions must be positive");
  }
  if (coeffs_.size() != coefficient_count(dims_)) {
    throw FieldError("coefficient count does not match dimensions");
  }
  for (auto c : coeffs_) {
    if (!field_.contains(c)) throw FieldError("coefficient is not a field element");
  }
}

MultilinearForm MultilinearForm::zero(Field field, std::vector<std::size_t> dims) {
  const std::size_t n = coefficient_count(dims);
  return MultilinearForm(std::move(field), std::move(dims), std::vector<Scalar>(n));
}

std::size_t MultilinearForm::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw FieldError("multi-index arity mismatch");
  std::size_t flat = 0;
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    if (index[j] >= dims_[j]) throw FieldError("multi-index out of range");
    flat = flat * dims_[j] + index[j];
  }
  return flat;
}

MultilinearForm sample_uniform(const Field& field, std::vector<std::size_t> dims, Rng& rng) {
  const std::size_t n = coefficient_count(dims);
  std::vector<Scalar> coeffs(n);
  for (auto& c : coeffs) c = Scalar{static_cast<std::uint32_t>(rng.below(field.order()))};
  return MultilinearForm(field, std::move(dims), std::move(coeffs));
}

MultilinearForm form_from_index(const Field& field, std::vector<std::size_t> dims,
                                std::uint64_t index) {
  const std::size_t n = coefficient_count(dims);
  std::vector<Scalar> coeffs(n);
  for (std::size_t i = n; i-- > 0;) {
    coeffs[i] = Scalar{static_cast<std::uint32_t>(index % field.order())};
    index /= field.order();
  }
  return MultilinearForm(field, std::move(dims), std::move(coeffs));
}

Scalar evaluate(const MultilinearForm& form, std::span<const Vector> args) {
  const auto& dims = form.dims();
  if (args.size() != dims.size()) throw FieldError("wrong number of arguments");
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (args[j].size() != dims[j]) throw FieldError("argument dimension mismatch");
    for (auto s : args[j]) {
      if (!form.field().contains(s)) throw FieldError("argument is not over the form's field");
    }
  }
  const Field& f = form.field();
  // Contract the last slot first; `cur` shrinks by one slot per step.
  std::vector<Scalar> cur = form.coeffs();
  for (std::size_t j = dims.size(); j-- > 0;) {
    const std::size_t m = dims[j];
    std::vector<Scalar> next(cur.size() / m);
    for (std::size_t outer = 0; outer < next.size(); ++outer) {
      Scalar acc{0};
      for (std::size_t i = 0; i < m; ++i) {
        acc = f.add(acc, f.mul(cur[outer * m + i], args[j][i]));
      }
      next[outer] = acc;
    }
    cur = std::move(next);
  }
  return cur.front();
}

SubspaceBasis::SubspaceBasis(const Field& field, std::vector<Vector> vectors)
    : vectors_(std::move(vectors)) {
  if (vectors_.empty()) throw FieldError("a basis needs at least one vector");
  if (rank(field, vectors_) != vectors_.size()) {
    throw FieldError("basis vectors are linearly dependent");
  }
}

MultilinearForm restrict(const MultilinearForm& form, std::span<const SubspaceBasis> bases) {
  if (bases.size() != form.arity()) throw FieldError("one basis per slot required");
  std::vector<std::size_t> dims;
  for (std::size_t j = 0; j < bases.size(); ++j) {
    if (bases[j].ambient_dim() != form.dims()[j]) throw FieldError("basis lives in wrong space");
    dims.push_back(bases[j].dim());
  }
  const std::size_t n = coefficient_count(dims);
  std::vector<Scalar> coeffs(n);
  std::vector<std::size_t> index(dims.size(), 0);
  std::vector<Vector> args(dims.size());
  for (std::size_t flat = 0; flat < n; ++flat) {
    for (std::size_t j = 0; j < dims.size(); ++j) args[j] = bases[j].vectors()[index[j]];
    coeffs[flat] = evaluate(form, args);
    for (std::size_t j = dims.size(); j-- > 0;) {
      if (++index[j] < dims[j]) break;
      index[j] = 0;
    }
  }
  return MultilinearForm(form.field(), std::move(dims), std::move(coeffs));
}

namespace {
MultilinearForm all_ones_form(const Field& field, std::size_t arity) {
  std::vector<std::size_t> dims(arity, 2);
  const std::size_t n = coefficient_count(dims);
  return MultilinearForm(field, std::move(dims), std::vector<Scalar>(n, field.one()));
}
}  // namespace

CornerInterpolant::CornerInterpolant(const Field& field,
                                     std::vector<std::pair<Vector, Vector>> pairs)
    : pairs_(std::move(pairs)), form_(all_ones_form(field, pairs_.size())) {
  for (const auto& [v0, v1] : pairs_) {
    if (!linearly_independent(field, v0, v1)) {
      throw FieldError("corner pair is collinear");
    }
  }
}

Scalar CornerInterpolant::evaluate_at(std::span<const Vector> points) const {
  if (points.size() != pairs_.size()) throw FieldError("wrong number of arguments");
  const Field& f = form_.field();
  std::vector<Vector> coords;
  coords.reserve(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    auto ab = coordinates_in_pair(f, pairs_[j].first, pairs_[j].second, points[j]);
    if (!ab) throw FieldError("point lies outside the slot's span");
    coords.push_back(Vector{ab->first, ab->second});
  }
  return evaluate(form_, coords);
}

CornerInterpolant corner_interpolant(const Field& field,
                                     std::vector<std::pair<Vector, Vector>> pairs) {
  return CornerInterpolant(field, std::move(pairs));
}

namespace {
template <typename T>
void write_list(std::ostream& os, const std::vector<T>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << ',';
    os << items[i];
  }
}

std::vector<std::uint64_t> parse_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw FieldError("bad number: " + item);
    } catch (const std::logic_error&) {
      throw FieldError("bad number: " + item);
    }
  }
  return out;
}
}  // namespace

void write_form(std::ostream& os, const MultilinearForm& form) {
  const Field& f = form.field();
  os << "boxlb.form.v1 p=" << f.characteristic() << " k=" << f.degree() << " modulus=";
  write_list(os, f.modulus());
  os << " d=" << form.arity() << " dims=";
  write_list(os, form.dims());
  os << '\n';
  const auto& c = form.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) os << ' ';
    os << c[i].value;
  }
  os << '\n';
}

std::string form_to_string(const MultilinearForm& form) {
  std::ostringstream os;
  write_form(os, form);
  return os.str();
}

MultilinearForm read_form(std::istream& is) {
  std::string header, body;
  if (!std::getline(is, header) || !std::getline(is, body)) {
    throw FieldError("truncated form record");
  }
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "boxlb.form.v1") throw FieldError("unknown form record tag: " + tag);
  std::uint64_t p = 0, k = 0, d = 0;
  std::vector<std::uint64_t> modulus, dims;
  bool seen[5] = {};
  std::string kv;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw FieldError("bad header field: " + kv);
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (key == "p") {
      p = parse_list(value).at(0), seen[0] = true;
    } else if (key == "k") {
      k = parse_list(value).at(0), seen[1] = true;
    } else if (key == "modulus") {
      modulus = parse_list(value), seen[2] = true;
    } else if (key == "d") {
      d = parse_list(value).at(0), seen[3] = true;
    } else if (key == "dims") {
      dims = parse_list(value), seen[4] = true;
    } else {
      throw FieldError("unknown header field: " + key);
    }
  }
  for (bool s : seen) {
    if (!s) throw FieldError("form header is missing a field");
  }
  if (dims.size() != d) throw FieldError("arity does not match dims");
  if (p > UINT32_MAX || k > 64) throw FieldError("field parameters out of range");
  Polynomial mod(modulus.begin(), modulus.end());
  Field field = Field::make(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(k), mod);
  std::vector<std::size_t> sdims(dims.begin(), dims.end());
  std::vector<Scalar> coeffs;
  std::istringstream bs(body);
  std::uint64_t v;
  while (bs >> v) {
    if (v >= field.order()) throw FieldError("coefficient is not a field element");
    coeffs.push_back(Scalar{static_cast<std::uint32_t>(v)});
  }
  if (!bs.eof()) throw FieldError("malformed coefficient list");
  return MultilinearForm(field, std::move(sdims), std::move(coeffs));
}

}  // namespace boxlb
