#pragma once

#include "cmnet/classical.hpp"
#include "cmnet/network.hpp"
#include "cmnet/quantum.hpp"
#include "cmnet/rigidity_lp.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <span>
#include <vector>

namespace cmnet {

/// Thrown by parametrize_unitary when Gram-Schmidt meets a (nearly)
/// dependent column; callers re-sample.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interprets 2 d^2 reals as a column-major complex matrix (re, im pairs) and
/// orthonormalizes its columns by modified Gram-Schmidt, left to right.
/// A column whose residual norm falls below 1e-8 of its original norm is
/// rank deficient.
ComplexMatrix parametrize_unitary(std::span<const double> params);

/// Inverse of the parametrization on unitaries: the column-major (re, im)
/// encoding of `u`.
std::vector<double> encode_matrix(const ComplexMatrix& u);

/// Deterministic, platform-independent random source: std::mt19937_64 bits,
/// 53-bit uniforms and Box-Muller normals.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed);
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Phase-1 margin of the full pipeline (Born rule, r-values, LP) for CM
/// sources with the given refinements; 0 up to tolerance means feasible.
double infeasibility_margin(const Network& net, const TupleSet& tuples,
                            const std::vector<RefinementUnitary>& refinements);

struct SearchConfig {
  std::uint64_t seed = 1;
  /// Iterations per restart.
  std::size_t iterations = 2000;
  std::size_t restarts = 4;
  /// Perturbation scales, used in equal consecutive shares of the iterations.
  std::vector<double> scales = {0.5, 0.2, 0.05, 0.01};
  /// One unitary shared by every party (all ambiguous dimensions must agree).
  bool shared_unitary = true;
  /// Start every restart from the identity instead of a random matrix.
  bool start_identity = false;
  bool stop_on_first_certificate = true;
  /// Smallest margin accepted as a certificate-bearing result.
  double certify_margin = 1e-6;
  /// Annealing temperature at the first iteration, decreasing linearly to 0.
  double temperature = 2e-7;
  double time_budget_seconds = 600.0;
  double lp_tolerance = kDefaultLpTolerance;
  /// Worker threads for restarts; 0 reads CM_NETCERT_THREADS (default 1).
  std::size_t threads = 0;
};

/// Throws PreconditionError describing the first invalid field.
void check_search_config(const SearchConfig& config);

struct TrajectoryEntry {
  std::size_t restart = 0;
  std::size_t iteration = 0;
  double margin = 0.0;
  /// Best margin of this restart so far.
  double best = 0.0;
};

struct SearchResult {
  std::vector<RefinementUnitary> refinements;
  std::vector<double> params;
  double margin = 0.0;
  std::size_t best_restart = 0;
  /// Present when the best candidate's LP is certified infeasible.
  std::optional<Certification> certification;
  /// Accepted moves that changed the margin, ordered by (restart, iteration).
  std::vector<TrajectoryEntry> trajectory;
  std::size_t evaluations = 0;
  bool budget_exhausted = false;

  std::string verdict() const;
};

/// Seeded random restarts with annealed local perturbations maximizing the
/// LP margin. Requires an ECS network admitting a PFIS. The result does not
/// depend on the thread count; it depends on wall-clock time only when the
/// time budget is hit.
SearchResult search_nonlocal(const Network& net, const TupleSet& tuples, const SearchConfig& config,
                             const std::function<void(const TrajectoryEntry&)>& on_accept = {});

}  // namespace cmnet
