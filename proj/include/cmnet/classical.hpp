#pragma once

#include "cmnet/distribution.hpp"
#include "cmnet/network.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cmnet {

/// One color per source, in source declaration order. Colors are 0-based.
using ColorAssignment = std::vector<int>;

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// The global set of compatible color tuples of a CM strategy.
///
/// Always contains every constant tuple (c, ..., c); construction throws
/// PreconditionError otherwise. Tuples are kept sorted and unique.
class TupleSet {
 public:
  TupleSet(std::size_t num_sources, int colors, std::vector<ColorAssignment> tuples);

  /// Only the constant tuples (pure color matching).
  static TupleSet constants(std::size_t num_sources, int colors);
  /// {000, 111, 222, 021, 210, 102} over (lambda, mu, nu) with three colors.
  static TupleSet fig1();

  std::size_t num_sources() const { return num_sources_; }
  int colors() const { return colors_; }
  const std::vector<ColorAssignment>& tuples() const { return tuples_; }

 private:
  std::size_t num_sources_;
  int colors_;
  std::vector<ColorAssignment> tuples_;
};

/// Per-party compatibility of every possible view.
///
/// A view is indexed in mixed radix with the first view position most
/// significant, so lexicographic view order equals index order.
class CmStrategy {
 public:
  CmStrategy(const Network& net, const TupleSet& tuples);

  const Network& network() const { return net_; }
  const Topology& topology() const { return topo_; }
  const TupleSet& tuples() const { return tuples_; }

  std::size_t view_count(std::size_t party) const { return compatible_[party].size(); }
  bool compatible(std::size_t party, std::size_t view_index) const {
    return compatible_[party][view_index];
  }

  std::size_t view_index(std::size_t party, const std::vector<int>& view) const;
  std::vector<int> view_colors(std::size_t party, std::size_t view_index) const;

  /// Ambiguous view indices of a party in lexicographic order; refined
  /// outcome r corresponds to position r-1 of this list.
  const std::vector<std::size_t>& ambiguous_views(std::size_t party) const {
    return ambiguous_[party];
  }
  const std::vector<std::size_t>& compatible_views(std::size_t party) const {
    return compatible_list_[party];
  }

  std::size_t view_index_of(std::size_t party, const ColorAssignment& a) const;

  /// C^m, or throws CapExceededError when larger than `cap`.
  std::uint64_t assignment_count(std::uint64_t cap) const;
  ColorAssignment assignment(std::uint64_t index) const;

 private:
  Network net_;
  Topology topo_;
  TupleSet tuples_;
  std::vector<std::vector<bool>> compatible_;
  std::vector<std::vector<std::size_t>> ambiguous_;
  std::vector<std::vector<std::size_t>> compatible_list_;
};

/// The ordered colors of the party's adjacent sources.
std::vector<int> view_of(const Network& net, const std::string& party, const ColorAssignment& a);

/// True iff some tuple restricts to `view` on the party's sources.
bool is_compatible(const Network& net, const std::string& party, const std::vector<int>& view,
                   const TupleSet& tuples);

/// View outcome for compatible parties, coarse "chi" otherwise.
OutcomeTuple classical_outcome(const Network& net, const TupleSet& tuples, const ColorAssignment& a);
OutcomeTuple classical_outcome(const CmStrategy& strategy, const ColorAssignment& a);

/// Exact CM classical distribution with uniform independent source colors.
Distribution compute_pcolor(const Network& net, const TupleSet& tuples,
                            std::uint64_t cap = kDefaultEnumerationCap);

/// Assignments that leave every party ambiguous, in lexicographic order.
/// Pattern t (1-based) is element t-1.
std::vector<ColorAssignment> enumerate_hidden_patterns(const Network& net, const TupleSet& tuples,
                                                       std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace cmnet
