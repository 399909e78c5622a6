#include "cmnet/network.hpp"

#include "cmnet/errors.hpp"
#include "cmnet/exact_simplex.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace cmnet {

std::optional<std::size_t> Network::find_source(const std::string& name) const {
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Network::find_party(const std::string& name) const {
  for (std::size_t i = 0; i < parties.size(); ++i) {
    if (parties[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Network::source_index(const std::string& name) const {
  if (auto i = find_source(name)) return *i;
  throw PreconditionError("unknown source '" + name + "'");
}

std::size_t Network::party_index(const std::string& name) const {
  if (auto i = find_party(name)) return *i;
  throw PreconditionError("unknown party '" + name + "'");
}

std::vector<std::string> Network::party_names() const {
  std::vector<std::string> names;
  names.reserve(parties.size());
  for (const auto& p : parties) names.push_back(p.name);
  return names;
}

std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> issues;
  if (net.colors < 2) issues.push_back("colors must be at least 2");
  if (net.sources.empty()) issues.push_back("network has no sources");
  if (net.parties.empty()) issues.push_back("network has no parties");

  std::set<std::string> names;
  for (const auto& s : net.sources) {
    if (s.name.empty()) issues.push_back("source with empty name");
    if (!names.insert(s.name).second) issues.push_back("duplicate name '" + s.name + "'");
  }
  for (const auto& p : net.parties) {
    if (p.name.empty()) issues.push_back("party with empty name");
    if (!names.insert(p.name).second) issues.push_back("duplicate name '" + p.name + "'");
  }

  for (const auto& s : net.sources) {
    if (s.legs.size() < 2) {
      issues.push_back("source '" + s.name + "' has fewer than 2 legs");
    }
    std::set<std::string> seen;
    for (const auto& leg : s.legs) {
      if (!seen.insert(leg).second) {
        issues.push_back("source '" + s.name + "' lists party '" + leg + "' twice");
      }
      auto p = net.find_party(leg);
      if (!p) {
        issues.push_back("source '" + s.name + "' has a leg to unknown party '" + leg + "'");
        continue;
      }
      const auto& view = net.parties[*p].view;
      if (std::find(view.begin(), view.end(), s.name) == view.end()) {
        issues.push_back("source '" + s.name + "' has a leg to '" + leg + "' but '" + leg +
                         "' does not list it in its view");
      }
    }
  }

  for (const auto& p : net.parties) {
    if (p.view.empty()) issues.push_back("party '" + p.name + "' has an empty view");
    std::set<std::string> seen;
    for (const auto& src : p.view) {
      if (!seen.insert(src).second) {
        issues.push_back("party '" + p.name + "' lists source '" + src + "' twice");
      }
      auto s = net.find_source(src);
      if (!s) {
        issues.push_back("party '" + p.name + "' views unknown source '" + src + "'");
        continue;
      }
      const auto& legs = net.sources[*s].legs;
      if (std::find(legs.begin(), legs.end(), p.name) == legs.end()) {
        issues.push_back("party '" + p.name + "' views source '" + src + "' but '" + src +
                         "' has no leg to it");
      }
    }
  }
  return issues;
}

void require_valid(const Network& net) {
  const auto issues = validate_network(net);
  if (!issues.empty()) throw PreconditionError("invalid network: " + issues.front());
}

Topology make_topology(const Network& net) {
  require_valid(net);
  Topology topo;
  std::vector<std::size_t> first_leg(net.sources.size());
  for (std::size_t s = 0; s < net.sources.size(); ++s) {
    first_leg[s] = topo.total_legs;
    topo.total_legs += net.sources[s].legs.size();
    std::vector<std::size_t> parties;
    for (const auto& leg : net.sources[s].legs) parties.push_back(net.party_index(leg));
    topo.source_parties.push_back(std::move(parties));
  }
  for (const auto& p : net.parties) {
    std::vector<std::size_t> srcs;
    std::vector<std::size_t> legs;
    for (const auto& name : p.view) {
      const std::size_t s = net.source_index(name);
      const auto& leg_names = net.sources[s].legs;
      const auto pos = std::find(leg_names.begin(), leg_names.end(), p.name) - leg_names.begin();
      srcs.push_back(s);
      legs.push_back(first_leg[s] + static_cast<std::size_t>(pos));
    }
    topo.view_sources.push_back(std::move(srcs));
    topo.view_legs.push_back(std::move(legs));
  }
  return topo;
}

EcsResult check_ecs(const Network& net) {
  const Topology topo = make_topology(net);
  std::vector<std::set<std::size_t>> adjacent;
  for (const auto& srcs : topo.view_sources) adjacent.emplace_back(srcs.begin(), srcs.end());

  EcsResult result;
  result.holds = true;
  for (std::size_t s = 0; s < net.sources.size(); ++s) {
    std::vector<std::size_t> members = topo.source_parties[s];
    std::sort(members.begin(), members.end());
    std::optional<std::pair<std::string, std::string>> witness;
    for (std::size_t i = 0; i < members.size() && !witness; ++i) {
      for (std::size_t j = i + 1; j < members.size() && !witness; ++j) {
        const auto& a = adjacent[members[i]];
        const auto& b = adjacent[members[j]];
        std::size_t common = 0;
        for (std::size_t x : a) common += b.count(x);
        if (common == 1) {
          witness = std::make_pair(net.parties[members[i]].name, net.parties[members[j]].name);
        }
      }
    }
    if (!witness) result.holds = false;
    result.witnesses.push_back(std::move(witness));
  }
  return result;
}

std::optional<FinnerWeights> solve_pfis(const Network& net) {
  const Topology topo = make_topology(net);
  const std::size_t n = net.num_parties();
  const std::size_t m = net.num_sources();

  // Variables: weights (n), floor s, slacks u_j with w_j - s - u_j = 0.
  const std::size_t cols = 2 * n + 1;
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (std::size_t s = 0; s < m; ++s) {
    std::vector<Rational> row(cols);
    for (std::size_t p : topo.source_parties[s]) row[p] = 1;
    a.push_back(std::move(row));
    b.emplace_back(1);
  }
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<Rational> row(cols);
    row[p] = 1;
    row[n] = -1;
    row[n + 1 + p] = -1;
    a.push_back(std::move(row));
    b.emplace_back(0);
  }
  std::vector<Rational> objective(cols);
  objective[n] = 1;

  const ExactLpResult lp = maximize_exact(a, b, objective);
  if (lp.status != ExactLpResult::Status::kOptimal) return std::nullopt;

  FinnerWeights weights;
  for (std::size_t p = 0; p < n; ++p) weights[net.parties[p].name] = lp.x[p];
  if (!validate_weights(net, weights).empty()) {
    throw ConsistencyError("solve_pfis produced weights that fail validation");
  }
  return weights;
}

std::vector<std::string> validate_weights(const Network& net, const FinnerWeights& w) {
  std::vector<std::string> issues;
  for (const auto& p : net.parties) {
    auto it = w.find(p.name);
    if (it == w.end()) {
      issues.push_back("missing weight for party '" + p.name + "'");
    } else if (it->second < 0) {
      issues.push_back("negative weight for party '" + p.name + "'");
    }
  }
  for (const auto& [name, value] : w) {
    if (!net.find_party(name)) issues.push_back("weight for unknown party '" + name + "'");
  }
  if (!issues.empty()) return issues;
  for (const auto& s : net.sources) {
    Rational sum = 0;
    for (const auto& leg : s.legs) sum += w.at(leg);
    if (sum != 1) {
      issues.push_back("weights around source '" + s.name + "' sum to " + to_string(sum));
    }
  }
  return issues;
}

namespace {

std::string numbered(char prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d", prefix, i);
  return buf;
}

}  // namespace

Network make_kn(int n, int colors) {
  if (n < 3) throw PreconditionError("make_kn requires n >= 3");
  if (colors < 2) throw PreconditionError("make_kn requires at least 2 colors");
  Network net;
  net.colors = colors;
  for (int j = 1; j <= n; ++j) net.parties.push_back({numbered('A', j), {}});
  int index = 0;
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      Source s{numbered('S', ++index), {numbered('A', j), numbered('A', k)}};
      net.parties[j - 1].view.push_back(s.name);
      net.parties[k - 1].view.push_back(s.name);
      net.sources.push_back(std::move(s));
    }
  }
  return net;
}

Network make_gm(int m, int colors) {
  if (m < 3) throw PreconditionError("make_gm requires m >= 3");
  if (colors < 0) colors = m;
  if (colors < 2) throw PreconditionError("make_gm requires at least 2 colors");
  Network net;
  net.colors = colors;
  for (int i = 1; i <= m; ++i) net.sources.push_back({numbered('S', i), {}});
  int index = 0;
  for (int i = 1; i <= m; ++i) {
    for (int k = i + 1; k <= m; ++k) {
      Party p{numbered('A', ++index), {numbered('S', i), numbered('S', k)}};
      net.sources[i - 1].legs.push_back(p.name);
      net.sources[k - 1].legs.push_back(p.name);
      net.parties.push_back(std::move(p));
    }
  }
  return net;
}

Network make_fig1_network() {
  Network net;
  net.colors = 3;
  net.sources = {{"lambda", {"A", "D"}}, {"mu", {"A", "B", "C"}}, {"nu", {"B", "C", "D"}}};
  net.parties = {{"A", {"lambda", "mu"}},
                 {"B", {"mu", "nu"}},
                 {"C", {"mu", "nu"}},
                 {"D", {"nu", "lambda"}}};
  return net;
}

}  // namespace cmnet
