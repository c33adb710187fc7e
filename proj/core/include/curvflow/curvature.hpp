#pragma once

#include <utility>
#include <vector>

#include "curvflow/metric.hpp"
#include "curvflow/tensor_field.hpp"

namespace curvflow {

/// Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij), slots (k, i, j).
/// Exactly symmetric in the two lower indices.
TensorField christoffel(const MetricField& m, FdOrder p);

/// Leading covariant index i of nabla_i T. Each covariant slot contributes a
/// -Gamma term and each contravariant slot a +Gamma term; ambient components
/// are treated as scalars.
TensorField covariant_derivative(const TensorField& t, const TensorField& gamma, FdOrder p);

/// nabla_i nabla_j f = d_i d_j f - Gamma^k_ij d_k f for a rank-0 field with any
/// ambient multiplicity. Exactly symmetric in (i, j).
TensorField covariant_hessian(const TensorField& f, const TensorField& gamma, FdOrder p);

/// g^ij nabla_i nabla_j f for rank-0 fields (scalar or ambient-valued).
TensorField laplace_beltrami(const TensorField& f, const MetricField& m, FdOrder p);
TensorField laplace_beltrami(const TensorField& f, const MetricField& m,
                             const TensorField& gamma, FdOrder p);

/// g^ab nabla_a nabla_b T for tensors of any rank, computed without storing
/// the full second covariant derivative.
TensorField covariant_laplacian(const TensorField& t, const MetricField& m,
                                const TensorField& gamma, FdOrder p);

/// Fully covariant Riemann tensor from second metric derivatives and
/// Gamma-Gamma terms:
///   R_ijkl = 1/2 (d_i d_l g_jk + d_j d_k g_il - d_i d_k g_jl - d_j d_l g_ik)
///          + g_mn (Gamma^m_il Gamma^n_jk - Gamma^m_ik Gamma^n_jl)
TensorField riemann_covariant(const MetricField& m, FdOrder p);
TensorField riemann_covariant(const MetricField& m, const TensorField& gamma, FdOrder p);

/// R^k_lij = d_i Gamma^k_jl - d_j Gamma^k_il + Gamma^k_im Gamma^m_jl - Gamma^k_jm Gamma^m_il,
/// computed by differentiating the Christoffel field. Independent route to
/// the covariant form above (they agree after lowering the first index).
TensorField riemann_mixed(const MetricField& m, const TensorField& gamma, FdOrder p);

/// R_jl = g^ik R_ijkl and R = g^jl R_jl.
std::pair<TensorField, TensorField> ricci_and_scalar(const TensorField& riem,
                                                     const MetricField& m);

struct RiemannSymmetryDefects {
  Norms antisym_first;   // R_ijkl + R_jikl
  Norms antisym_second;  // R_ijkl + R_ijlk
  Norms pair_exchange;   // R_ijkl - R_klij
  Norms first_bianchi;   // R_ijkl + R_iklj + R_iljk
};

RiemannSymmetryDefects riemann_symmetry_defects(const TensorField& riem, FdOrder p);

/// || nabla_i nabla_j v_k - nabla_j nabla_i v_k + R^l_kij v_l ||
Norms ricci_identity_residual(const TensorField& v, const MetricField& m, FdOrder p);

/// || nabla_i R_jklm + nabla_j R_kilm + nabla_k R_ijlm ||
Norms bianchi_residual(const TensorField& riem, const MetricField& m, FdOrder p);

/// || nabla_i g_jk ||
Norms metric_compatibility_residual(const MetricField& m, FdOrder p);

/// Full contraction of two tensors of identical shape with all indices
/// raised by the metric: A_{i..} B^{i..}. Inputs must be fully covariant.
TensorField full_contraction(const TensorField& a, const TensorField& b, const MetricField& m);

}  // namespace curvflow
