#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <string>
#include <vector>

#include "survmap/reliability.hpp"

namespace survmap {

// Burst-tracking Markov chain over the states
//
//   U_N (index 0), 1, 2, ..., N_sv (indices 1..N_sv), D (index N_sv + 1)
//
// U_N is the network up state, state k counts k consecutive failures that
// the application still survives, and D is application down. The network is
// down in {1..N_sv, D}; the application is up in {U_N, 1..N_sv}. Each row has
// at most two non-zero entries, so the matrix is held sparse; dense() is
// available for small chains and dumps.
class FsmcModel {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  FsmcModel(const NetworkParams& params, int survival_cycles);

  int survival_cycles() const { return survival_cycles_; }
  const NetworkParams& params() const { return params_; }
  Eigen::Index dimension() const { return transitions_.rows(); }
  Eigen::Index up_index() const { return 0; }
  Eigen::Index down_index() const { return dimension() - 1; }

  const Matrix& transitions() const { return transitions_; }
  double transition(Eigen::Index from, Eigen::Index to) const { return transitions_.coeff(from, to); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(transitions_); }

  /// "U_N", "1", ..., "N_sv", "D".
  std::vector<std::string> state_labels() const;

  /// Row vector times M.
  Eigen::VectorXd step(const Eigen::VectorXd& distribution) const;

 private:
  int survival_cycles_;
  NetworkParams params_;
  Matrix transitions_;
};

FsmcModel build_chain(const NetworkParams& params, int survival_cycles);

struct SteadyState {
  Eigen::VectorXd pi;

  double up() const { return pi(0); }
  double down() const { return pi(pi.size() - 1); }
  /// Total mass in application-up states.
  double app_up() const { return 1.0 - down(); }
};

/// Solves pi M = pi, sum(pi) = 1 by a direct LU factorization of the
/// balance equations with one equation replaced by the normalization.
/// Throws NumericalFailure when the residual exceeds 1e-12.
SteadyState steady_state(const FsmcModel& model);

/// Writes M and pi as CSV: a header `state,<labels...>`, one row per state,
/// then a final `pi` row.
void write_chain_csv(std::ostream& out, const FsmcModel& model, const SteadyState& steady);

}  // namespace survmap
