#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/metric.hpp"
#include "curvflow/scenario.hpp"
#include "curvflow/tensor_field.hpp"

namespace curvflow {

/// Intrinsic curvature of one metric snapshot.
struct CurvaturePack {
  MetricField metric;
  TensorField christoffel;
  TensorField riemann;  // R_ijkl
  TensorField ricci;    // R_jl
  TensorField scalar;   // R
  FdOrder p = FdOrder::second;
};

/// Riemann from second metric derivatives, then its contractions.
CurvaturePack curvature_pack(const MetricField& m, FdOrder p);

/// Largest relative deviation of the stored ricci and scalar fields from a
/// fresh contraction of the stored riemann field.
double pack_contraction_defect(const CurvaturePack& cp);

/// Snapshot quantities that can be differentiated in time.
enum class Quantity {
  metric,             // g_ij (induced for embeddings)
  riemann_extrinsic,  // nabla_ik X . nabla_jl X - nabla_il X . nabla_jk X
  riemann,            // from metric derivatives
  ricci,
  scalar,
};

const char* quantity_name(Quantity q);

/// Quantity q evaluated on one stored snapshot.
TensorField snapshot_quantity(const FlowState& s, Quantity q, FdOrder p);

/// (Q_{k+1} - Q_{k-1}) / (2 * stride * dt). Requires 1 <= k <= len - 2.
TensorField fd_time_derivative(const FlowTrajectory& traj, Quantity q, std::size_t k, FdOrder p);

/// Eight-term second-derivative combination of the Ricci tensor:
///   B_ijkl = H_iklj - H_jkli - H_ilkj + H_jlki + H_kijl - H_lijk - H_kjil + H_ljik
/// with H_abcd = nabla_a nabla_b R_cd.
TensorField b_tensor(const CurvaturePack& cp);

/// nabla_ik L . nabla_jl X + nabla_ik X . nabla_jl L - nabla_il L . nabla_jk X
/// - nabla_il X . nabla_jk L, with L = g^ab nabla_ab X.
TensorField rhs_eq18(const EmbeddingField& e, FdOrder p);
TensorField rhs_eq18(const FlowTrajectory& traj, std::size_t k, FdOrder p);

/// Time derivative of R_ijkl predicted by the printed Riemann evolution (the
/// printed right-hand side divided by 2). dtg is the metric velocity.
TensorField rhs_eq20(const CurvaturePack& cp, const TensorField& dtg);
/// Same for R_jl.
TensorField rhs_eq21(const CurvaturePack& cp, const TensorField& dtg);
/// nabla^2 R - 4 R_ij R^ij - 2 R_ijkl R^ijkl.
TensorField rhs_eq22(const CurvaturePack& cp);
/// 2D form: nabla^2 R - 4 R^2.
TensorField rhs_eq23(const CurvaturePack& cp);
/// 3D form: nabla^2 R - 12 Ric^2 + 2 R^2.
TensorField rhs_eq24(const CurvaturePack& cp);
/// d >= 4 form: nabla^2 R - 4d/(d-2) Ric^2 + 4/((d-2)(d-1)) R^2 - 2 W^2.
TensorField rhs_eq25(const CurvaturePack& cp);
/// nabla^2 R + 2 R_ij R^ij (scalar curvature under Ricci flow).
TensorField rhs_eq10(const CurvaturePack& cp);

/// Riem^2 - 4/(d-2) Ric^2 + 2/((d-1)(d-2)) R^2.
TensorField weyl_square(const CurvaturePack& cp);

enum class Tier { exactness, algebraic, reported };
const char* tier_name(Tier t);

/// What a check needs from the run.
enum class CheckSource {
  snapshot,     // one embedding or metric snapshot
  mcf,          // centered time differences along a mean curvature flow
  ricci_flow,   // centered time differences along a Ricci flow
};

struct CheckInfo {
  std::string name;
  Tier tier;
  CheckSource source;
  bool needs_embedding;
  /// Residual order expected from a study at fd order p.
  double expected_order(FdOrder p) const;
  /// Minimum order for the identity classification.
  double identity_threshold(FdOrder p) const;
};

/// Registered checks in report order.
const std::vector<CheckInfo>& check_registry();
const CheckInfo& check_info(const std::string& name);

struct CheckEntry {
  std::string name;
  Tier tier = Tier::exactness;
  Norms residual;
  std::optional<Norms> lhs;
  std::optional<Norms> rhs;
  /// Algebraic tier: max over nodes of |a - b| / max(|b|, floor).
  std::optional<double> relative;
  /// Oracle comparison values, when a closed form is known.
  std::optional<double> lhs_oracle;
  std::optional<double> rhs_oracle;
  std::string note;
};

struct ResidualReport {
  std::string scenario;
  std::vector<int> counts;
  double dt = 0.0;
  FdOrder p = FdOrder::second;
  std::size_t snapshot = 0;
  double t = 0.0;
  std::vector<CheckEntry> entries;

  const CheckEntry* find(const std::string& name) const;
};

/// Pointwise relative tolerance of the algebraic tier.
inline constexpr double kAlgebraicTolerance = 1e-10;
/// Relative floor for the algebraic comparison, as a fraction of max |b|.
inline constexpr double kAlgebraicFloor = 1e-3;

/// Runs the requested checks. `mcf` and `ricci` trajectories are consulted by
/// checks of the matching source; snapshot checks use the mean curvature flow
/// snapshot when present, else the scenario's initial state. An empty k
/// selects the middle snapshot of each trajectory.
ResidualReport run_checks(const Scenario& s, const std::vector<std::string>& which,
                          const FlowTrajectory* mcf, const FlowTrajectory* ricci,
                          std::optional<std::size_t> k, FdOrder p);

/// Evolution checks along one trajectory at snapshot k.
ResidualReport run_evolution_checks(const Scenario& s, const FlowTrajectory& traj,
                                    std::optional<std::size_t> k,
                                    const std::vector<std::string>& which, FdOrder p);

struct RefinementLevel {
  std::vector<int> counts;
  /// Empty selects the auto timestep of the level.
  std::optional<double> dt;
};

struct LevelResult {
  std::vector<int> counts;
  double h = 0.0;
  double dt = 0.0;
  double t = 0.0;
  ResidualReport report;
};

struct CheckConvergence {
  std::string name;
  Tier tier = Tier::exactness;
  std::vector<double> residuals;  // L-infinity per level
  std::vector<double> lhs;        // L-infinity of each side per level (0 when absent)
  std::vector<double> rhs;
  std::vector<double> pairwise_orders;
  double fitted_order = 0.0;
  /// identity | exact | plateau | nonconvergent | algebraic_pass | algebraic_fail
  std::string classification;
  bool passed = true;
};

struct ConvergenceStudy {
  std::vector<LevelResult> levels;
  std::vector<CheckConvergence> checks;
  bool all_required_passed() const;
};

struct StudyConfig {
  ScenarioSpec scenario;
  std::vector<RefinementLevel> levels;
  std::vector<std::string> which;
  IntegratorConfig integrator;
  FdOrder p = FdOrder::second;
  /// Snapshot index per level; empty selects the middle snapshot.
  std::optional<std::size_t> snapshot;
};

/// Runs every level and classifies each check. Requires >= 3 levels unless
/// every check is algebraic.
ConvergenceStudy convergence_study(const StudyConfig& c);

/// Classification from per-level data (exposed for testing).
CheckConvergence classify(const std::string& name, Tier tier, const std::vector<double>& h,
                          const std::vector<double>& residuals, const std::vector<double>& lhs,
                          const std::vector<double>& rhs, double threshold,
                          const std::vector<std::optional<double>>& relative);

/// Least-squares slope of log(residual) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& residuals);

/// Integrator config adjusted so the number of stored intervals is even and
/// the middle snapshot sits at t_end / 2.
IntegratorConfig verification_schedule(const Scenario& s, const IntegratorConfig& c, FdOrder p,
                                       CheckSource source);

}  // namespace curvflow
