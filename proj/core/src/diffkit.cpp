#include "extkit/diffkit.hpp"

#include <algorithm>

namespace extkit {

bool PhasePoint::all_finite() const noexcept {
  return std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); });
}

SingularSet operator|(const SingularSet& a, const SingularSet& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return SingularSet([a, b](std::span<const double> x, double margin) {
    return a.near(x, margin) || b.near(x, margin);
  });
}

std::string to_string(Codomain c) { return c == Codomain::real ? "real" : "complex"; }

std::vector<Jet2<double>> seed_jets(std::span<const double> x) {
  std::vector<Jet2<double>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.push_back(Jet2<double>::variable(x.size(), i, x[i]));
  return out;
}

ScalarField ScalarField::from_real(std::size_t dim, RealValueFn value, RealJetFn jet,
                                   SingularSet singular) {
  if (dim == 0 || dim > kMaxJetDim) throw DimensionError("field dimension out of range");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->codomain = Codomain::real;
  impl->singular = std::move(singular);
  impl->complex_value = [value](std::span<const double> x) { return cplx(value(x)); };
  impl->complex_jet = [jet](std::span<const Jet2<double>> x) { return to_complex(jet(x)); };
  impl->real_value = std::move(value);
  impl->real_jet = std::move(jet);
  return ScalarField(std::move(impl));
}

ScalarField ScalarField::from_complex(std::size_t dim, ComplexValueFn value, ComplexJetFn jet,
                                      SingularSet singular) {
  if (dim == 0 || dim > kMaxJetDim) throw DimensionError("field dimension out of range");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->codomain = Codomain::complex;
  impl->singular = std::move(singular);
  impl->complex_value = std::move(value);
  impl->complex_jet = std::move(jet);
  return ScalarField(std::move(impl));
}

ScalarField ScalarField::constant(std::size_t dim, double value) {
  return real(dim, [value](auto x) { return constant_like(x[0], value); });
}

ScalarField ScalarField::coordinate(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("coordinate index out of range");
  return real(dim, [index](auto x) { return x[index]; });
}

const ScalarField::Impl& ScalarField::impl() const {
  if (!impl_) throw Error("use of an empty ScalarField");
  return *impl_;
}

std::size_t ScalarField::dim() const { return impl().dim; }
Codomain ScalarField::codomain() const { return impl().codomain; }
const SingularSet& ScalarField::singular_set() const { return impl().singular; }

bool ScalarField::singular_at(std::span<const double> x, double margin) const {
  return impl().singular.near(x, margin);
}

double ScalarField::raw_value(std::span<const double> x) const {
  if (is_complex()) throw DomainError("real evaluation of a complex field");
  return impl().real_value(x);
}
cplx ScalarField::raw_value_complex(std::span<const double> x) const {
  return impl().complex_value(x);
}
Jet2<double> ScalarField::raw_jet(std::span<const Jet2<double>> x) const {
  if (is_complex()) throw DomainError("real evaluation of a complex field");
  return impl().real_jet(x);
}
Jet2<cplx> ScalarField::raw_jet_complex(std::span<const Jet2<double>> x) const {
  return impl().complex_jet(x);
}

namespace {

Jet2<double> imag_part_jet(const Jet2<cplx>& z) {
  Jet2<double> r(z.dim(), z.value().imag());
  for (std::size_t j = 0; j < z.dim(); ++j) {
    r.grad(j) = z.grad(j).imag();
    for (std::size_t i = 0; i <= j; ++i) r.hess(i, j) = z.hess(i, j).imag();
  }
  return r;
}

void require_same_dim(const ScalarField& a, const ScalarField& b) {
  if (a.dim() != b.dim()) throw DimensionError("field dimension mismatch");
}

template <class Op>
ScalarField combine(const ScalarField& a, const ScalarField& b, Op op) {
  require_same_dim(a, b);
  const SingularSet singular = a.singular_set() | b.singular_set();
  if (!a.is_complex() && !b.is_complex()) {
    return ScalarField::from_real(
        a.dim(),
        [a, b, op](std::span<const double> x) { return op(a.raw_value(x), b.raw_value(x)); },
        [a, b, op](std::span<const Jet2<double>> x) { return op(a.raw_jet(x), b.raw_jet(x)); },
        singular);
  }
  return ScalarField::from_complex(
      a.dim(),
      [a, b, op](std::span<const double> x) {
        return op(a.raw_value_complex(x), b.raw_value_complex(x));
      },
      [a, b, op](std::span<const Jet2<double>> x) {
        return op(a.raw_jet_complex(x), b.raw_jet_complex(x));
      },
      singular);
}

}  // namespace

ScalarField ScalarField::real_part() const {
  if (!is_complex()) return *this;
  const ScalarField self = *this;
  return from_real(
      dim(), [self](std::span<const double> x) { return self.raw_value_complex(x).real(); },
      [self](std::span<const Jet2<double>> x) { return extkit::real_part(self.raw_jet_complex(x)); },
      singular_set());
}

ScalarField ScalarField::imag_part() const {
  const ScalarField self = *this;
  if (!is_complex()) return constant(dim(), 0.0);
  return from_real(
      dim(), [self](std::span<const double> x) { return self.raw_value_complex(x).imag(); },
      [self](std::span<const Jet2<double>> x) { return imag_part_jet(self.raw_jet_complex(x)); },
      singular_set());
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const auto& u, const auto& v) { return u + v; });
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const auto& u, const auto& v) { return u - v; });
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const auto& u, const auto& v) { return u * v; });
}
ScalarField operator*(double s, const ScalarField& a) {
  return ScalarField::constant(a.dim(), s) * a;
}

namespace {

void check_point(const ScalarField& field, const PhasePoint& x) {
  if (x.size() != field.dim())
    throw DimensionError("point has " + std::to_string(x.size()) + " coordinates, field expects " +
                         std::to_string(field.dim()));
  if (!x.all_finite()) throw NonFiniteError("non-finite coordinate");
  if (field.singular_at(x.span())) throw SingularPointError("point lies in the field's singular set");
}

}  // namespace

template <class T>
Jet2<T> eval_jet2(const ScalarField& field, const PhasePoint& x) {
  check_point(field, x);
  const auto seeds = seed_jets(x.span());
  Jet2<T> out;
  if constexpr (std::is_same_v<T, double>) {
    if (field.is_complex()) throw DomainError("real jet requested from a complex field");
    out = field.raw_jet(seeds);
  } else {
    out = field.raw_jet_complex(seeds);
  }
  if (!out.is_finite()) throw NonFiniteError("field evaluation produced a non-finite jet");
  return out;
}

template <class T>
T eval_value(const ScalarField& field, const PhasePoint& x) {
  check_point(field, x);
  T out;
  if constexpr (std::is_same_v<T, double>) {
    out = field.raw_value(x.span());
  } else {
    out = field.raw_value_complex(x.span());
  }
  if (!detail::finite(out)) throw NonFiniteError("field evaluation produced a non-finite value");
  return out;
}

template Jet2<double> eval_jet2<double>(const ScalarField&, const PhasePoint&);
template Jet2<cplx> eval_jet2<cplx>(const ScalarField&, const PhasePoint&);
template double eval_value<double>(const ScalarField&, const PhasePoint&);
template cplx eval_value<cplx>(const ScalarField&, const PhasePoint&);

}  // namespace extkit
