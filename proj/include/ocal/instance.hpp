#pragma once

#include "ocal/core.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ocal {

enum class ProblemKind { Generic, NetworkAllocation, LogisticRegression, Qcqp };

/// A feasible set, the full stream of round oracles, and the regularity constants.
struct ProblemInstance {
  std::string name;
  ProblemKind kind = ProblemKind::Generic;
  FeasibleSet set;
  std::vector<std::shared_ptr<const RoundOracle>> rounds;
  ProblemConstants constants;
  std::uint64_t seed = 0;

  std::size_t horizon() const { return rounds.size(); }
  std::size_t dim() const { return set.dim(); }
  std::size_t num_constraints() const {
    return rounds.empty() ? 0 : rounds.front()->num_constraints();
  }
  const RoundOracle& round(std::size_t t) const { return *rounds.at(t); }
};

/// Decisions x_0..x_{T-1} and the multipliers lambda_0..lambda_{T-1} held alongside.
struct Trajectory {
  std::vector<Vector> decisions;
  std::vector<Vector> multipliers;  // empty when the algorithm has none
};

}  // namespace ocal
