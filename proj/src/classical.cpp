#include "cmnet/classical.hpp"

#include "cmnet/errors.hpp"

#include <algorithm>
#include <map>

namespace cmnet {

TupleSet::TupleSet(std::size_t num_sources, int colors, std::vector<ColorAssignment> tuples)
    : num_sources_(num_sources), colors_(colors), tuples_(std::move(tuples)) {
  if (colors_ < 2) throw PreconditionError("tuple set needs at least 2 colors");
  for (const auto& t : tuples_) {
    if (t.size() != num_sources_) throw PreconditionError("tuple length differs from source count");
    for (int c : t) {
      if (c < 0 || c >= colors_) throw PreconditionError("tuple color out of range");
    }
  }
  std::sort(tuples_.begin(), tuples_.end());
  tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
  for (int c = 0; c < colors_; ++c) {
    if (!std::binary_search(tuples_.begin(), tuples_.end(), ColorAssignment(num_sources_, c))) {
      throw PreconditionError("tuple set lacks the constant tuple of color " + std::to_string(c));
    }
  }
}

TupleSet TupleSet::constants(std::size_t num_sources, int colors) {
  std::vector<ColorAssignment> tuples;
  for (int c = 0; c < colors; ++c) tuples.emplace_back(num_sources, c);
  return TupleSet(num_sources, colors, std::move(tuples));
}

TupleSet TupleSet::fig1() {
  return TupleSet(3, 3, {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}});
}

CmStrategy::CmStrategy(const Network& net, const TupleSet& tuples)
    : net_(net), topo_(make_topology(net)), tuples_(tuples) {
  if (tuples.num_sources() != net.num_sources() || tuples.colors() != net.colors) {
    throw PreconditionError("tuple set shape does not match the network");
  }
  for (std::size_t p = 0; p < net.num_parties(); ++p) {
    std::size_t count = 1;
    for (std::size_t k = 0; k < topo_.view_sources[p].size(); ++k) {
      count *= static_cast<std::size_t>(net.colors);
    }
    std::vector<bool> ok(count, false);
    for (const auto& t : tuples_.tuples()) ok[view_index_of(p, t)] = true;
    std::vector<std::size_t> amb;
    std::vector<std::size_t> comp;
    for (std::size_t v = 0; v < count; ++v) (ok[v] ? comp : amb).push_back(v);
    compatible_.push_back(std::move(ok));
    ambiguous_.push_back(std::move(amb));
    compatible_list_.push_back(std::move(comp));
  }
}

std::size_t CmStrategy::view_index(std::size_t party, const std::vector<int>& view) const {
  if (view.size() != topo_.view_sources[party].size()) {
    throw PreconditionError("view length does not match the party's view size");
  }
  std::size_t idx = 0;
  for (int c : view) {
    if (c < 0 || c >= net_.colors) throw PreconditionError("view color out of range");
    idx = idx * static_cast<std::size_t>(net_.colors) + static_cast<std::size_t>(c);
  }
  return idx;
}

std::vector<int> CmStrategy::view_colors(std::size_t party, std::size_t view_index) const {
  std::vector<int> colors(topo_.view_sources[party].size());
  for (std::size_t k = colors.size(); k-- > 0;) {
    colors[k] = static_cast<int>(view_index % static_cast<std::size_t>(net_.colors));
    view_index /= static_cast<std::size_t>(net_.colors);
  }
  return colors;
}

std::size_t CmStrategy::view_index_of(std::size_t party, const ColorAssignment& a) const {
  std::size_t idx = 0;
  for (std::size_t s : topo_.view_sources[party]) {
    idx = idx * static_cast<std::size_t>(net_.colors) + static_cast<std::size_t>(a[s]);
  }
  return idx;
}

std::uint64_t CmStrategy::assignment_count(std::uint64_t cap) const {
  std::uint64_t count = 1;
  for (std::size_t s = 0; s < net_.num_sources(); ++s) {
    if (count > cap / static_cast<std::uint64_t>(net_.colors)) {
      throw CapExceededError("color enumeration exceeds the cap of " + std::to_string(cap));
    }
    count *= static_cast<std::uint64_t>(net_.colors);
  }
  if (count > cap) throw CapExceededError("color enumeration exceeds the cap of " + std::to_string(cap));
  return count;
}

ColorAssignment CmStrategy::assignment(std::uint64_t index) const {
  ColorAssignment a(net_.num_sources());
  for (std::size_t s = a.size(); s-- > 0;) {
    a[s] = static_cast<int>(index % static_cast<std::uint64_t>(net_.colors));
    index /= static_cast<std::uint64_t>(net_.colors);
  }
  return a;
}

std::vector<int> view_of(const Network& net, const std::string& party, const ColorAssignment& a) {
  const std::size_t p = net.party_index(party);
  if (a.size() != net.num_sources()) throw PreconditionError("assignment length differs from source count");
  std::vector<int> view;
  for (const auto& src : net.parties[p].view) {
    const int c = a[net.source_index(src)];
    if (c < 0 || c >= net.colors) throw PreconditionError("assignment color out of range");
    view.push_back(c);
  }
  return view;
}

bool is_compatible(const Network& net, const std::string& party, const std::vector<int>& view,
                   const TupleSet& tuples) {
  const std::size_t p = net.party_index(party);
  const auto& srcs = net.parties[p].view;
  if (view.size() != srcs.size()) throw PreconditionError("view length does not match the party's view size");
  std::vector<std::size_t> idx;
  for (const auto& s : srcs) idx.push_back(net.source_index(s));
  return std::any_of(tuples.tuples().begin(), tuples.tuples().end(), [&](const ColorAssignment& t) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (t[idx[k]] != view[k]) return false;
    }
    return true;
  });
}

OutcomeTuple classical_outcome(const CmStrategy& strategy, const ColorAssignment& a) {
  const Network& net = strategy.network();
  if (a.size() != net.num_sources()) throw PreconditionError("assignment length differs from source count");
  OutcomeTuple out;
  out.reserve(net.num_parties());
  for (std::size_t p = 0; p < net.num_parties(); ++p) {
    const std::size_t v = strategy.view_index_of(p, a);
    out.push_back(strategy.compatible(p, v) ? Outcome::view(strategy.view_colors(p, v))
                                            : Outcome::ambiguous());
  }
  return out;
}

OutcomeTuple classical_outcome(const Network& net, const TupleSet& tuples, const ColorAssignment& a) {
  return classical_outcome(CmStrategy(net, tuples), a);
}

Distribution compute_pcolor(const Network& net, const TupleSet& tuples, std::uint64_t cap) {
  const CmStrategy strategy(net, tuples);
  const std::uint64_t total = strategy.assignment_count(cap);
  const std::size_t n = net.num_parties();

  // Aggregate by compact codes (view index, or -1 for chi) before building
  // outcome objects.
  std::map<std::vector<long long>, std::uint64_t> counts;
  std::vector<long long> code(n);
  for (std::uint64_t i = 0; i < total; ++i) {
    const ColorAssignment a = strategy.assignment(i);
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t v = strategy.view_index_of(p, a);
      code[p] = strategy.compatible(p, v) ? static_cast<long long>(v) : -1;
    }
    ++counts[code];
  }

  std::map<OutcomeTuple, Rational> table;
  for (const auto& [c, count] : counts) {
    OutcomeTuple t;
    for (std::size_t p = 0; p < n; ++p) {
      t.push_back(c[p] < 0 ? Outcome::ambiguous()
                           : Outcome::view(strategy.view_colors(p, static_cast<std::size_t>(c[p]))));
    }
    table[t] += Rational(BigInt(count), BigInt(total));
  }
  return Distribution(net.party_names(), std::move(table));
}

std::vector<ColorAssignment> enumerate_hidden_patterns(const Network& net, const TupleSet& tuples,
                                                       std::uint64_t cap) {
  const CmStrategy strategy(net, tuples);
  const std::uint64_t total = strategy.assignment_count(cap);
  std::vector<ColorAssignment> patterns;
  for (std::uint64_t i = 0; i < total; ++i) {
    ColorAssignment a = strategy.assignment(i);
    bool all_ambiguous = true;
    for (std::size_t p = 0; p < net.num_parties() && all_ambiguous; ++p) {
      all_ambiguous = !strategy.compatible(p, strategy.view_index_of(p, a));
    }
    if (all_ambiguous) patterns.push_back(std::move(a));
  }
  return patterns;
}

}  // namespace cmnet
