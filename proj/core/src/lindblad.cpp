#include "nessresp/lindblad.hpp"

#include <cmath>

#include "nessresp/error.hpp"

namespace nessresp {

LindbladModel::LindbladModel(Operator h0, std::vector<JumpOperator> jumps, double hbar)
    : h0_(std::move(h0)), jumps_(std::move(jumps)), hbar_(hbar) {
  if (!h0_.is_hermitian()) throw DomainError("model Hamiltonian is not Hermitian");
  if (!(hbar_ > 0.0)) throw DomainError("hbar must be positive");
  for (const auto& j : jumps_) {
    if (!(j.op.space() == h0_.space())) throw InvalidDimensionError("jump operator space mismatch");
    if (!(j.rate >= 0.0)) throw DomainError("jump rate must be nonnegative");
  }
}

LindbladModel LindbladModel::perturbed(const Operator& h_i, double eps) const {
  return LindbladModel(h0_ + cplx(eps) * h_i, jumps_, hbar_);
}

Superoperator build_commutator_generator(const Operator& h_i, double hbar) {
  if (!h_i.is_hermitian()) throw DomainError("perturbation Hamiltonian is not Hermitian");
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
  Superoperator comm = Superoperator::left(h_i);
  comm += cplx(-1.0) * Superoperator::right(h_i);
  comm *= cplx(0.0, -1.0 / hbar);
  return comm;
}

Superoperator build_lindblad_generator(const LindbladModel& model) {
  Superoperator gen = build_commutator_generator(model.hamiltonian(), model.hbar());
  for (const auto& jump : model.jumps()) {
    if (jump.rate == 0.0) continue;
    const Operator& l = jump.op;
    const Operator ldl = l.adjoint() * l;
    // vec(L ρ L†) = (conj(L) ⊗ L) vec(ρ)
    SparseMatrix sandwich =
        Superoperator::right(l.adjoint()).matrix() * Superoperator::left(l).matrix();
    Superoperator term(l.space(), std::move(sandwich));
    term += cplx(-0.5) * Superoperator::left(ldl);
    term += cplx(-0.5) * Superoperator::right(ldl);
    term *= cplx(jump.rate);
    gen += term;
  }
  return gen;
}

double bose_occupation(double x) {
  if (!(x > 0.0)) throw DomainError("Bose occupation requires beta*hbar*omega > 0");
  return 1.0 / std::expm1(x);
}

TwoOscillatorSystem build_two_oscillator_model(const TwoOscillatorParams& p, int n1_levels,
                                               int n2_levels) {
  if (!(p.beta1 > 0.0) || !(p.beta2 > 0.0)) {
    throw DomainError("inverse temperatures beta1, beta2 must be positive");
  }
  if (!(p.gamma >= 0.0)) throw DomainError("gamma must be nonnegative");
  const HilbertSpace space({n1_levels, n2_levels});
  const Ladder l1 = make_ladder(n1_levels);
  const Ladder l2 = make_ladder(n2_levels);
  Operator a1 = embed(l1.annihilation, 0, space);
  Operator a2 = embed(l2.annihilation, 1, space);
  const Operator a1d = a1.adjoint();
  const Operator a2d = a2.adjoint();

  const double hb = p.hbar;
  const double n1 = bose_occupation(p.beta1 * hb * p.omega1);
  const double n2 = bose_occupation(p.beta2 * hb * p.omega2());

  Operator coupling = cplx(hb) * (a1 * a2d + a1d * a2);
  Operator h0 = cplx(hb * p.omega1) * (a1d * a1) + cplx(hb * p.omega2()) * (a2d * a2) +
                cplx(p.lambda) * coupling;
  std::vector<JumpOperator> jumps{{a1, p.gamma * (n1 + 1.0)},
                                  {a1d, p.gamma * n1},
                                  {a2, p.gamma * (n2 + 1.0)},
                                  {a2d, p.gamma * n2}};
  Operator energy1 = cplx(p.beta1 * hb * p.omega1) * (a1d * a1);
  return TwoOscillatorSystem{LindbladModel(std::move(h0), std::move(jumps), hb),
                             std::move(a1),
                             std::move(a2),
                             std::move(coupling),
                             std::move(energy1),
                             n1,
                             n2};
}

}  // namespace nessresp
