#pragma once

#include <span>

#include "nessresp/operator.hpp"

namespace nessresp {

/// Eigenvalue pairs closer than this (relative to the largest) use the limit kernel.
inline constexpr double kDegenerateGap = 1e-12;

/// X̄ = ∫₀¹ π^λ X π^{−λ} dλ, evaluated in the eigenbasis of π.
Operator generalized_kubo(const Operator& x, const DensityOperator& pi0);

/// Y = ∂_ε ln π_ε|₀, the solution of ∫₀¹ π₀^λ Y π₀^{1−λ} dλ = π₁.
Operator log_derivative(const Operator& pi1, const DensityOperator& pi0);

/// S = −ln π. Throws DomainError for eigenvalues ≤ 0.
Operator entropy_operator(const DensityOperator& pi);

/// H̃_I with β·H̃_I = ∫₀^β e^{−λH₀} H_I e^{λH₀} dλ.
Operator kubo_transform_thermal(const Operator& h0, const Operator& h_i, double beta);

}  // namespace nessresp
