#include "extkit/poisson.hpp"

#include <cmath>

namespace extkit {

std::string to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::canonical: return "canonical";
    case StructureKind::constant: return "constant";
    case StructureKind::custom: return "custom";
  }
  return "unknown";
}

namespace {

constexpr double kAntisymmetryTol = 1e-14;

Bivector<double> canonical_matrix(std::size_t dim) {
  Bivector<double> m(dim, 0.0);
  const std::size_t half = dim / 2;
  for (std::size_t i = 0; i < half; ++i) {
    m(i, half + i) = 1.0;
    m(half + i, i) = -1.0;
  }
  return m;
}

PoissonStructure constant_structure(std::size_t dim, StructureKind kind, Bivector<double> m) {
  auto value = [m](std::span<const double>) { return m; };
  auto jet = [m](std::span<const Jet2<double>> x) {
    const std::size_t n = x.empty() ? 0 : x[0].dim();
    Bivector<Jet2<double>> out(m.dim(), Jet2<double>(n, 0.0));
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = Jet2<double>(n, m(i, j));
    return out;
  };
  return PoissonStructure::from_rules(dim, kind, value, jet);
}

}  // namespace

PoissonStructure PoissonStructure::canonical(std::size_t dim) {
  if (dim == 0 || dim % 2 != 0) throw DimensionError("canonical structure needs an even dimension");
  return constant_structure(dim, StructureKind::canonical, canonical_matrix(dim));
}

PoissonStructure PoissonStructure::from_rules(std::size_t dim, StructureKind kind,
                                              ValueRule value, JetRule jet) {
  if (dim == 0) throw DimensionError("structure dimension must be positive");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->kind = kind;
  impl->value = std::move(value);
  impl->jet = std::move(jet);
  return PoissonStructure(std::move(impl));
}

const PoissonStructure::Impl& PoissonStructure::impl() const {
  if (!impl_) throw Error("use of an empty PoissonStructure");
  return *impl_;
}

std::size_t PoissonStructure::dim() const { return impl().dim; }
StructureKind PoissonStructure::kind() const { return impl().kind; }

Bivector<double> PoissonStructure::at(std::span<const double> x) const {
  if (x.size() != dim()) throw DimensionError("point dimension does not match structure");
  Bivector<double> m = impl().value(x);
  if (m.dim() != dim()) throw DimensionError("bivector rule returned a matrix of the wrong size");
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i; j < dim(); ++j)
      if (!(std::abs(m(i, j) + m(j, i)) <= kAntisymmetryTol))
        throw DomainError("bivector is not antisymmetric");
  return m;
}

Bivector<Jet2<double>> PoissonStructure::jet_at(std::span<const Jet2<double>> x) const {
  if (x.size() != dim()) throw DimensionError("point dimension does not match structure");
  return impl().jet(x);
}

std::vector<double> PoissonStructure::apply(std::span<const double> x,
                                            std::span<const double> w) const {
  if (w.size() != dim()) throw DimensionError("covector dimension does not match structure");
  const Bivector<double> m = at(x);
  std::vector<double> out(dim(), 0.0);
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) out[i] += m(i, j) * w[j];
  return out;
}

PoissonStructure extend_structure(const PoissonStructure& base) {
  const std::size_t n = base.dim() + 2;
  if (base.is_constant()) {
    const std::vector<double> zeros(base.dim(), 0.0);
    const Bivector<double> inner = base.at(zeros);
    Bivector<double> m(n, 0.0);
    m(0, 1) = 1.0;
    m(1, 0) = -1.0;
    for (std::size_t i = 0; i < base.dim(); ++i)
      for (std::size_t j = 0; j < base.dim(); ++j) m(i + 2, j + 2) = inner(i, j);
    return constant_structure(n, StructureKind::constant, std::move(m));
  }
  auto value = [base, n](std::span<const double> x) {
    const Bivector<double> inner = base.at(x.subspan(2));
    Bivector<double> m(n, 0.0);
    m(0, 1) = 1.0;
    m(1, 0) = -1.0;
    for (std::size_t i = 0; i < base.dim(); ++i)
      for (std::size_t j = 0; j < base.dim(); ++j) m(i + 2, j + 2) = inner(i, j);
    return m;
  };
  auto jet = [base, n](std::span<const Jet2<double>> x) {
    const std::size_t jd = x[0].dim();
    const Bivector<Jet2<double>> inner = base.jet_at(x.subspan(2));
    Bivector<Jet2<double>> m(n, Jet2<double>(jd, 0.0));
    m(0, 1) = Jet2<double>(jd, 1.0);
    m(1, 0) = Jet2<double>(jd, -1.0);
    for (std::size_t i = 0; i < base.dim(); ++i)
      for (std::size_t j = 0; j < base.dim(); ++j) m(i + 2, j + 2) = inner(i, j);
    return m;
  };
  return PoissonStructure::from_rules(n, StructureKind::custom, value, jet);
}

HamiltonianSystem::HamiltonianSystem(PoissonStructure structure_, ScalarField hamiltonian_,
                                     std::map<std::string, ScalarField> observables_)
    : structure(std::move(structure_)),
      hamiltonian(std::move(hamiltonian_)),
      observables(std::move(observables_)) {
  if (hamiltonian.dim() != structure.dim())
    throw DimensionError("Hamiltonian dimension does not match the Poisson structure");
  if (hamiltonian.is_complex()) throw DomainError("Hamiltonian must be real-valued");
  for (const auto& [name, field] : observables)
    if (field.dim() != structure.dim())
      throw DimensionError("observable '" + name + "' has the wrong dimension");
}

bool HamiltonianSystem::singular_at(std::span<const double> x, double margin) const {
  return hamiltonian.singular_at(x, margin);
}

namespace {

void check_system_point(const HamiltonianSystem& sys, const PhasePoint& x) {
  if (x.size() != sys.dim()) throw DimensionError("point dimension does not match system");
  if (sys.singular_at(x.span())) throw SingularPointError("point lies in the system's singular set");
}

template <class T>
struct BracketJet {
  T value{};
  std::vector<T> grad;
};

// {F, G} and its gradient, from second-order jets of F and G and first-order
// jets of the bivector entries.
template <class T>
BracketJet<T> bracket_with_gradient(const Jet2<T>& f, const Jet2<double>& g,
                                    const Bivector<Jet2<double>>& pi) {
  const std::size_t n = pi.dim();
  BracketJet<T> out;
  out.grad.assign(n, T{});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Jet2<double>& pij = pi(i, j);
      const double p = pij.value();
      out.value += f.grad(i) * p * g.grad(j);
      for (std::size_t k = 0; k < n; ++k) {
        out.grad[k] += f.hess(i, k) * p * g.grad(j) + f.grad(i) * pij.grad(k) * g.grad(j) +
                       f.grad(i) * p * g.hess(j, k);
      }
    }
  }
  return out;
}

template <class T>
Jet2<T> field_jet(const ScalarField& f, const PhasePoint& x) {
  return eval_jet2<T>(f, x);
}

}  // namespace

std::vector<double> ham_vector_field(const HamiltonianSystem& sys, const PhasePoint& x) {
  check_system_point(sys, x);
  const Jet2<double> l = eval_jet2<double>(sys.hamiltonian, x);
  return sys.structure.apply(x.span(), l.gradient());
}

template <class T>
T bracket(const PoissonStructure& structure, const ScalarField& f, const ScalarField& g,
          const PhasePoint& x) {
  if (f.dim() != structure.dim() || g.dim() != structure.dim())
    throw DimensionError("field dimension does not match structure");
  const Jet2<T> jf = field_jet<T>(f, x);
  const Jet2<T> jg = field_jet<T>(g, x);
  const Bivector<double> pi = structure.at(x.span());
  T out{};
  for (std::size_t i = 0; i < structure.dim(); ++i)
    for (std::size_t j = 0; j < structure.dim(); ++j) out += jf.grad(i) * pi(i, j) * jg.grad(j);
  return out;
}

template <class T>
T apply_XL(const HamiltonianSystem& sys, const ScalarField& f, const PhasePoint& x) {
  check_system_point(sys, x);
  if (f.dim() != sys.dim()) throw DimensionError("field dimension does not match system");
  const std::vector<double> v = ham_vector_field(sys, x);
  const Jet2<T> jf = field_jet<T>(f, x);
  T out{};
  for (std::size_t i = 0; i < sys.dim(); ++i) out += jf.grad(i) * v[i];
  return out;
}

template <class T>
T apply_XL2(const HamiltonianSystem& sys, const ScalarField& f, const PhasePoint& x) {
  check_system_point(sys, x);
  if (f.dim() != sys.dim()) throw DimensionError("field dimension does not match system");
  const Jet2<T> jf = field_jet<T>(f, x);
  const Jet2<double> jl = eval_jet2<double>(sys.hamiltonian, x);
  const auto seeds = seed_jets(x.span());
  const Bivector<Jet2<double>> pi = sys.structure.jet_at(seeds);
  const BracketJet<T> xf = bracket_with_gradient(jf, jl, pi);
  const std::vector<double> v = sys.structure.apply(x.span(), jl.gradient());
  T out{};
  for (std::size_t k = 0; k < sys.dim(); ++k) out += xf.grad[k] * v[k];
  return out;
}

double jacobi_residual(const PoissonStructure& structure, const ScalarField& f,
                       const ScalarField& g, const ScalarField& h, const PhasePoint& x) {
  const Jet2<double> jf = eval_jet2<double>(f, x);
  const Jet2<double> jg = eval_jet2<double>(g, x);
  const Jet2<double> jh = eval_jet2<double>(h, x);
  const auto seeds = seed_jets(x.span());
  const Bivector<Jet2<double>> pi = structure.jet_at(seeds);
  const std::size_t n = structure.dim();

  // {A, {B, C}} = dA . pi d{B, C}
  auto outer = [&](const Jet2<double>& a, const Jet2<double>& b, const Jet2<double>& c) {
    const BracketJet<double> bc = bracket_with_gradient(b, c, pi);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += a.grad(i) * pi(i, j).value() * bc.grad[j];
    return s;
  };
  return outer(jf, jg, jh) + outer(jg, jh, jf) + outer(jh, jf, jg);
}

template double bracket<double>(const PoissonStructure&, const ScalarField&, const ScalarField&,
                                const PhasePoint&);
template cplx bracket<cplx>(const PoissonStructure&, const ScalarField&, const ScalarField&,
                            const PhasePoint&);
template double apply_XL<double>(const HamiltonianSystem&, const ScalarField&, const PhasePoint&);
template cplx apply_XL<cplx>(const HamiltonianSystem&, const ScalarField&, const PhasePoint&);
template double apply_XL2<double>(const HamiltonianSystem&, const ScalarField&,
                                  const PhasePoint&);
template cplx apply_XL2<cplx>(const HamiltonianSystem&, const ScalarField&, const PhasePoint&);

}  // namespace extkit
