#include "survmap/fsmc.hpp"

#include <Eigen/SparseLU>
#include <ostream>

#include "survmap/errors.hpp"

namespace survmap {
namespace {

// Chains up to this size are factored densely.
constexpr Eigen::Index kDenseSolveLimit = 256;
constexpr double kResidualTolerance = 1e-12;

Eigen::VectorXd solve_dense(const FsmcModel& model, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = model.dimension();
  Eigen::MatrixXd system = model.dense().transpose() - Eigen::MatrixXd::Identity(n, n);
  system.row(n - 1).setOnes();
  return system.partialPivLu().solve(rhs);
}

Eigen::VectorXd solve_sparse(const FsmcModel& model, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = model.dimension();
  const auto& m = model.transitions();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(m.nonZeros() + 2 * n));
  // Balance equation for state j: sum_i pi_i M(i, j) - pi_j = 0. The last
  // equation is replaced by sum_i pi_i = 1.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (FsmcModel::Matrix::InnerIterator it(m, i); it; ++it) {
      if (it.col() != n - 1) entries.emplace_back(it.col(), i, it.value());
    }
  }
  for (Eigen::Index j = 0; j + 1 < n; ++j) entries.emplace_back(j, j, -1.0);
  for (Eigen::Index i = 0; i < n; ++i) entries.emplace_back(n - 1, i, 1.0);

  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(entries.begin(), entries.end());
  system.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) {
    throw NumericalFailure("sparse LU factorization of the balance equations failed: " + lu.lastErrorMessage());
  }
  Eigen::VectorXd pi = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw NumericalFailure("sparse LU solve failed");
  return pi;
}

}  // namespace

FsmcModel::FsmcModel(const NetworkParams& params, int survival_cycles)
    : survival_cycles_(survival_cycles), params_(params) {
  if (survival_cycles < 0) throw InvalidInput("survival cycles must be non-negative");
  const Eigen::Index n = static_cast<Eigen::Index>(survival_cycles) + 2;
  const Eigen::Index down = n - 1;
  const double ru = params.up_exit();
  const double rd = params.down_exit();

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(2 * n));
  auto add = [&entries](Eigen::Index i, Eigen::Index j, double v) {
    if (v != 0.0) entries.emplace_back(i, j, v);
  };
  add(0, 0, 1.0 - ru);
  add(0, 1, ru);
  // Failure-depth states and D all recover to U_N with r_d; otherwise the
  // burst deepens by one, saturating at D.
  for (Eigen::Index i = 1; i < n; ++i) {
    add(i, 0, rd);
    add(i, std::min(i + 1, down), 1.0 - rd);
  }
  transitions_.resize(n, n);
  transitions_.setFromTriplets(entries.begin(), entries.end());
  transitions_.makeCompressed();
}

std::vector<std::string> FsmcModel::state_labels() const {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(dimension()));
  labels.emplace_back("U_N");
  for (int k = 1; k <= survival_cycles_; ++k) labels.push_back(std::to_string(k));
  labels.emplace_back("D");
  return labels;
}

Eigen::VectorXd FsmcModel::step(const Eigen::VectorXd& distribution) const {
  return (distribution.transpose() * transitions_).transpose();
}

FsmcModel build_chain(const NetworkParams& params, int survival_cycles) {
  return FsmcModel(params, survival_cycles);
}

SteadyState steady_state(const FsmcModel& model) {
  const Eigen::Index n = model.dimension();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;

  SteadyState result;
  result.pi = n <= kDenseSolveLimit ? solve_dense(model, rhs) : solve_sparse(model, rhs);

  if (!result.pi.allFinite()) throw NumericalFailure("steady-state solve produced non-finite values");
  const double balance = (model.step(result.pi) - result.pi).lpNorm<Eigen::Infinity>();
  const double mass = std::abs(result.pi.sum() - 1.0);
  if (balance > kResidualTolerance || mass > kResidualTolerance) {
    throw NumericalFailure("steady-state residual too large (balance " + std::to_string(balance) + ", mass " +
                           std::to_string(mass) + ")");
  }
  // Round-off can leave states that are never visited at -1e-17 or so.
  result.pi = result.pi.cwiseMax(0.0);
  return result;
}

void write_chain_csv(std::ostream& out, const FsmcModel& model, const SteadyState& steady) {
  const auto labels = model.state_labels();
  const auto old_precision = out.precision(17);
  out << "state";
  for (const auto& label : labels) out << ',' << label;
  out << '\n';
  for (Eigen::Index i = 0; i < model.dimension(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < model.dimension(); ++j) out << ',' << model.transition(i, j);
    out << '\n';
  }
  out << "pi";
  for (Eigen::Index i = 0; i < steady.pi.size(); ++i) out << ',' << steady.pi(i);
  out << '\n';
  out.precision(old_precision);
}

}  // namespace survmap
