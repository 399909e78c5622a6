#pragma once

#include "cmnet/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cmnet {

struct Source {
  std::string name;
  /// Parties receiving a leg of this source, in leg order.
  std::vector<std::string> legs;
};

struct Party {
  std::string name;
  /// Adjacent sources in the order the party reads their colors.
  std::vector<std::string> view;
};

/// Party/source incidence hypergraph with ordered legs.
///
/// Legs carry a global index: sources in declaration order, legs in the
/// order listed by each source. Everything downstream (tensor wiring,
/// outcome strings, hidden patterns) relies on this convention.
struct Network {
  std::vector<Source> sources;
  std::vector<Party> parties;
  int colors = 0;

  std::size_t num_sources() const { return sources.size(); }
  std::size_t num_parties() const { return parties.size(); }

  std::optional<std::size_t> find_source(const std::string& name) const;
  std::optional<std::size_t> find_party(const std::string& name) const;

  /// Throws PreconditionError for unknown names.
  std::size_t source_index(const std::string& name) const;
  std::size_t party_index(const std::string& name) const;

  std::vector<std::string> party_names() const;
};

/// Derived index tables of a valid network.
struct Topology {
  /// view_sources[p][k] = index of the k-th source in party p's view.
  std::vector<std::vector<std::size_t>> view_sources;
  /// view_legs[p][k] = global leg index that feeds position k of p's view.
  std::vector<std::vector<std::size_t>> view_legs;
  /// source_parties[s] = party indices on the legs of s, in leg order.
  std::vector<std::vector<std::size_t>> source_parties;
  std::size_t total_legs = 0;
};

/// Human-readable list of violated invariants; empty iff the network is valid.
std::vector<std::string> validate_network(const Network& net);

/// Throws PreconditionError carrying the first violation if `net` is invalid.
void require_valid(const Network& net);

/// Requires a valid network.
Topology make_topology(const Network& net);

struct EcsResult {
  bool holds = false;
  /// One entry per source (declaration order); the first qualifying party
  /// pair in party declaration order, or nullopt when none exists.
  std::vector<std::optional<std::pair<std::string, std::string>>> witnesses;
};

/// Exclusive-common-source test: every source must be the only source shared
/// by some pair of distinct parties.
EcsResult check_ecs(const Network& net);

using FinnerWeights = std::map<std::string, Rational>;

/// Nonnegative party weights with every source's adjacent weights summing to
/// exactly one, or nullopt when no such weights exist.
///
/// Among all solutions the one maximizing the smallest weight is returned
/// (any optimal vertex when that is not unique), which yields the uniform
/// weights on regular networks.
std::optional<FinnerWeights> solve_pfis(const Network& net);

/// Violations of the perfect fractional independent set conditions.
std::vector<std::string> validate_weights(const Network& net, const FinnerWeights& w);

/// Bipartite source-complete network: n parties "A01".., one two-leg source
/// per party pair. Requires n >= 3.
Network make_kn(int n, int colors = 2);

/// Bipartite party-complete network: m sources "S01".., one two-view party per
/// source pair. Requires m >= 3.
Network make_gm(int m, int colors = -1);

/// The four-party network with sources lambda:[A,D], mu:[A,B,C], nu:[B,C,D]
/// and views A:(lambda,mu), B:(mu,nu), C:(mu,nu), D:(nu,lambda).
Network make_fig1_network();

}  // namespace cmnet
