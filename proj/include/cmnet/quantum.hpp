#pragma once

#include "cmnet/classical.hpp"
#include "cmnet/distribution.hpp"
#include "cmnet/interval.hpp"
#include "cmnet/network.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cmnet {

using Complex = std::complex<double>;
using ComplexMatrix = std::vector<std::vector<Complex>>;

inline constexpr std::uint64_t kDefaultStateCap = 10'000'000;
inline constexpr double kProbabilityFloor = 1e-14;

/// Pure state of one source; amplitudes indexed in mixed radix over its legs
/// (first leg most significant).
struct SourceState {
  std::vector<Complex> amplitudes;
  std::size_t legs = 0;
  int colors = 0;
  /// Set by cm_source_state: amplitudes are exactly 1/sqrt(C) on |c...c>.
  bool uniform_superposition = false;
};

/// (1/sqrt(C)) sum_c |c...c>.
SourceState cm_source_state(std::size_t legs, int colors);

/// Throws PreconditionError unless the state has the right size and unit norm
/// within 1e-12.
void check_source_state(const SourceState& s);

/// Orthonormal basis of a party's ambiguous subspace. Row r holds the
/// coefficients of |chi_{r+1}> over the ambiguous views in lexicographic order.
struct RefinementUnitary {
  std::string party;
  ComplexMatrix matrix;
};

ComplexMatrix identity_matrix(std::size_t d);
/// max |(U U^dagger - I)_ij|; +inf for non-square input.
double unitarity_defect(const ComplexMatrix& u);
/// Upper bound on the spectral distance from `u` to the nearest unitary.
double unitarity_radius(const ComplexMatrix& u);

struct MeasurementElement {
  Outcome label;
  /// Orthonormal vectors spanning the projector's range.
  std::vector<std::vector<Complex>> basis;
};

struct Measurement {
  std::string party;
  std::size_t dimension = 0;
  std::vector<MeasurementElement> elements;
};

/// Throws PreconditionError unless the projectors sum to the identity within
/// `tol`.
void check_measurement(const Measurement& m, double tol = 1e-10);

/// Diagonal rank-1 projectors on compatible views plus either the coarse
/// ambiguous projector (refinement == nullopt) or the refined basis.
Measurement build_cm_measurement(const CmStrategy& strategy, std::size_t party,
                                 const std::optional<RefinementUnitary>& refinement);
Measurement build_cm_measurement(const Network& net, const std::string& party, const TupleSet& tuples,
                                 const std::optional<RefinementUnitary>& refinement);

/// Maps each party's view positions to global leg indices.
struct Wiring {
  std::vector<std::string> parties;
  std::vector<std::vector<std::size_t>> view_legs;
  std::size_t legs = 0;
  int colors = 0;
};

Wiring make_wiring(const Network& net);

struct GlobalState {
  /// Dense amplitudes over C^legs, first global leg most significant.
  std::vector<Complex> amplitudes;
  Wiring wiring;
};

GlobalState build_global_state(const Network& net, const std::vector<SourceState>& sources,
                               std::uint64_t cap = kDefaultStateCap);

/// Born-rule distribution of the product measurement (one per party, in the
/// wiring's party order). Entries below kProbabilityFloor are dropped.
Distribution born_distribution(const GlobalState& state, const std::vector<Measurement>& measurements);

/// A complete quantum CM setup: network, tuple set, source states and an
/// optional refinement for each party (nullopt = coarse ambiguous projector).
struct QuantumModel {
  Network network;
  TupleSet tuples;
  std::vector<SourceState> sources;
  std::vector<std::optional<RefinementUnitary>> refinements;

  /// CM source states on every source, no refinements.
  static QuantumModel cm(const Network& net, const TupleSet& tuples);
  /// Sets the refinement of the party named in `u`.
  void set_refinement(RefinementUnitary u);
  void set_all_refinements(const ComplexMatrix& u);
};

/// Born-rule distribution of the model, computed from the sparse support of
/// the source states.
Distribution simulate(const QuantumModel& model);

/// Rigorous enclosures of the probabilities of the requested outcome tuples.
///
/// Uniform source states are taken as exact; refinement matrices are
/// enlarged by their unitarity radius so that the enclosure covers the
/// exactly unitary measurement nearest to the stored one.
std::map<OutcomeTuple, Interval> enclose_probabilities(const QuantumModel& model,
                                                       const std::vector<OutcomeTuple>& wanted);

}  // namespace cmnet
