#pragma once

#include "cmnet/classical.hpp"
#include "cmnet/distribution.hpp"
#include "cmnet/network.hpp"
#include "cmnet/quantum.hpp"
#include "cmnet/rational.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cmnet {

inline constexpr double kDefaultLpTolerance = 1e-9;
inline constexpr double kRValueAgreement = 1e-9;

/// An outcome where `party` sees the ambiguous view `view` and the outputs of
/// the other parties pin down every source color. Other parties may be
/// ambiguous themselves (parties reading the same sources as `party` always
/// are); their refined outputs are then summed over.
struct RevealingEvent {
  std::string party;
  std::size_t party_index = 0;
  std::vector<int> view;
  ColorAssignment completion;
  /// Classical outcome of every party under `completion`; the slot of
  /// `party` holds the coarse "chi".
  OutcomeTuple outcomes;

  /// `outcomes` with the slot of `party` replaced by Refined(r).
  OutcomeTuple with_refined(int r) const;
  /// with_refined(r) with every other "chi" slot p expanded over
  /// Refined(1..dims[p]).
  std::vector<OutcomeTuple> fine_outcomes(int r, const std::vector<int>& dims) const;
};

/// Assignments extending `view` at `party` whose coarse other-party outcomes
/// occur for no other assignment.
/// An empty result is valid. Throws PreconditionError if `view` is not
/// ambiguous for `party`.
std::vector<RevealingEvent> find_revealing_completions(const Network& net, const TupleSet& tuples,
                                                       const std::string& party, const std::vector<int>& view,
                                                       std::uint64_t cap = kDefaultEnumerationCap);

/// Revealing events for every (party, view) induced by some hidden pattern,
/// keyed by (party index, view index).
using RevealingIndex = std::map<std::pair<std::size_t, std::size_t>, std::vector<RevealingEvent>>;

RevealingIndex collect_revealing_events(const Network& net, const TupleSet& tuples,
                                        const std::vector<ColorAssignment>& patterns,
                                        std::uint64_t cap = kDefaultEnumerationCap);

struct RKey {
  std::size_t party = 0;
  int refined = 1;         // 1-based
  std::size_t pattern = 0;  // 0-based

  friend auto operator<=>(const RKey&, const RKey&) = default;
};

struct RValue {
  double value = 0.0;
  /// Fine outcome tuples of all revealing events; their total probability
  /// divided by event_count is C^{-m} * value.
  std::vector<OutcomeTuple> events;
  std::size_t event_count = 0;
};

using RValues = std::map<RKey, RValue>;

/// r_X(i|t) = P(X = chi_i, others revealing) / C^{-m}, averaged over the
/// revealing events of the view that pattern t induces at X. Throws
/// PreconditionError if some (party, pattern) has no revealing event and
/// ConsistencyError if distinct events disagree by more than 1e-9.
RValues compute_r_values(const Network& net, const TupleSet& tuples, const Distribution& quantum_p,
                         const std::vector<ColorAssignment>& patterns, const RevealingIndex& events);

enum class RowTag { kBlockMarginal, kPartyPattern, kNormalization, kGeneric };

std::string to_string(RowTag tag);

struct LpRow {
  std::vector<std::pair<std::size_t, double>> terms;
  double rhs = 0.0;
  RowTag tag = RowTag::kGeneric;
  /// Exact right-hand side when it is a known rational.
  std::optional<Rational> exact_rhs;
  /// Otherwise rhs is the total model probability of these tuples divided
  /// by rhs_divisor.
  std::vector<OutcomeTuple> rhs_outcomes;
  std::size_t rhs_divisor = 1;
};

struct LpVariable {
  OutcomeTuple outcome;
  std::size_t pattern = 0;
};

/// Feasibility of { q >= 0 : A q = b }.
struct LPInstance {
  std::size_t num_vars = 0;
  std::vector<LpRow> rows;
  /// Labels; empty for hand-built instances.
  std::vector<LpVariable> variables;
  /// Quantum model the right-hand sides were computed from, used to
  /// re-derive them rigorously during certificate verification.
  std::optional<QuantumModel> model;

  std::size_t count(RowTag tag) const;
};

/// Variables q(o, t) over all-ambiguous refined outcome tuples o and hidden
/// patterns t, with block-marginal, party-pattern and normalization rows.
LPInstance build_lp(const Network& net, const TupleSet& tuples, const Distribution& quantum_p,
                    const std::vector<ColorAssignment>& patterns, const RValues& r_values);

struct FarkasCertificate {
  /// One multiplier per row: y.A <= 0 componentwise and y.b > 0.
  std::vector<double> y;
};

enum class VerifyMode { kExact, kInterval };

std::string to_string(VerifyMode mode);

/// Exact mode requires every row to carry an exact right-hand side; y is
/// converted to rationals exactly. Interval mode re-derives model-backed
/// right-hand sides with outward-rounded arithmetic and accepts only if
/// max (y.A)_v <= 0 and min y.b > 0 over the enclosures.
bool verify_certificate(const LPInstance& lp, const FarkasCertificate& cert, VerifyMode mode);

struct FeasibilityResult {
  enum class Status { kFeasible, kInfeasible, kBorderline };
  Status status = Status::kBorderline;
  /// min over q >= 0 of max_row |A q - b|.
  double margin = 0.0;
  std::vector<double> witness;
  double residual = 0.0;
  std::optional<FarkasCertificate> certificate;
  /// Mode the certificate passed, when Infeasible.
  std::optional<VerifyMode> verified_by;
};

std::string to_string(FeasibilityResult::Status s);

/// Phase-1 margin solve. Feasible when margin <= tol (witness with
/// q >= -1e-12 and residual <= tol); Infeasible when a certificate is
/// extracted and verified (exact when possible, interval otherwise);
/// Borderline otherwise.
FeasibilityResult solve_feasibility(const LPInstance& lp, double tol = kDefaultLpTolerance);

/// Full pipeline on a quantum CM model.
struct Certification {
  std::vector<ColorAssignment> patterns;
  RValues r_values;
  LPInstance lp;
  FeasibilityResult feasibility;

  /// "nonlocal-certified", "inconclusive" or "borderline".
  std::string verdict() const;
};

/// Runs Born rule, revealing events, r-values, LP and solve. Requires every
/// party to have a refinement wherever its ambiguous subspace is nonempty.
Certification certify(const QuantumModel& model, double tol = kDefaultLpTolerance);

}  // namespace cmnet
