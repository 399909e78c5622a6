#pragma once

#include "cmnet/rational.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace cmnet {

/// One party's output symbol.
///
/// Serialized as a digit string for views ("02"), "chi:r" for refined
/// ambiguous outputs, "chi" for the coarse ambiguous output and "lbl:name"
/// for custom labels introduced by coarse-graining.
struct Outcome {
  enum class Kind { kView, kRefined, kAmbiguous, kLabel };

  Kind kind = Kind::kAmbiguous;
  std::vector<int> colors;  // kView
  int index = 0;            // kRefined, 1-based
  std::string label;        // kLabel

  static Outcome view(std::vector<int> colors);
  static Outcome refined(int r);
  static Outcome ambiguous();
  static Outcome custom(std::string label);

  bool is_view() const { return kind == Kind::kView; }
  bool is_refined() const { return kind == Kind::kRefined; }
  bool is_ambiguous() const { return kind == Kind::kAmbiguous; }

  std::string str() const;
  static Outcome parse(const std::string& text);

  friend auto operator<=>(const Outcome&, const Outcome&) = default;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

using OutcomeTuple = std::vector<Outcome>;

std::string to_string(const OutcomeTuple& t);

/// Probability table over per-party outcome tuples.
///
/// Exact tables hold rationals; float tables hold doubles. Keys are ordered
/// lexicographically, so iteration and serialization order is canonical.
class Distribution {
 public:
  enum class Mode { kExact, kFloat };

  Distribution() = default;
  Distribution(std::vector<std::string> parties, std::map<OutcomeTuple, Rational> table);
  Distribution(std::vector<std::string> parties, std::map<OutcomeTuple, double> table);

  Mode mode() const { return mode_; }
  bool exact() const { return mode_ == Mode::kExact; }
  const std::vector<std::string>& parties() const { return parties_; }

  std::size_t support_size() const;
  std::vector<OutcomeTuple> support() const;

  /// Zero for tuples outside the support.
  double probability(const OutcomeTuple& t) const;
  /// Exact tables only.
  Rational exact_probability(const OutcomeTuple& t) const;

  const std::map<OutcomeTuple, Rational>& exact_table() const { return exact_; }
  const std::map<OutcomeTuple, double>& float_table() const { return real_; }

  /// Sum of all entries (as double).
  double total() const;
  Rational exact_total() const;

  /// Checks nonnegativity, tuple arity and normalization; throws
  /// PreconditionError on failure.
  void check() const;

 private:
  Mode mode_ = Mode::kFloat;
  std::vector<std::string> parties_;
  std::map<OutcomeTuple, Rational> exact_;
  std::map<OutcomeTuple, double> real_;
};

/// Marginal on the named parties (kept in the distribution's party order).
Distribution marginal(const Distribution& d, const std::vector<std::string>& keep);

/// Per-party relabeling; parties missing from the map keep their outcomes.
using OutcomeMapping = std::map<std::string, std::map<Outcome, Outcome>>;

/// Merges outcomes according to `mapping`. Every outcome that occurs for a
/// mapped party must have an image.
Distribution coarse_grain(const Distribution& d, const OutcomeMapping& mapping);

/// Maps every refined ambiguous output of every party to the coarse "chi".
Distribution merge_refinements(const Distribution& d);

/// Float copy of an exact table (float tables are returned unchanged).
Distribution to_float(const Distribution& d);

/// Half the L1 distance. Both tables must be over the same parties.
double tv_distance(const Distribution& a, const Distribution& b);

}  // namespace cmnet
