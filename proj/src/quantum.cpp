#include "cmnet/quantum.hpp"

#include "cmnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace cmnet {

SourceState cm_source_state(std::size_t legs, int colors) {
  if (legs < 2) throw PreconditionError("a source needs at least 2 legs");
  if (colors < 2) throw PreconditionError("a source needs at least 2 colors");
  SourceState s;
  s.legs = legs;
  s.colors = colors;
  s.uniform_superposition = true;
  std::size_t dim = 1;
  for (std::size_t k = 0; k < legs; ++k) dim *= static_cast<std::size_t>(colors);
  s.amplitudes.assign(dim, Complex(0.0, 0.0));
  // |c...c> has index c * (1 + C + C^2 + ...).
  std::size_t stride = 0;
  for (std::size_t k = 0, p = 1; k < legs; ++k, p *= static_cast<std::size_t>(colors)) stride += p;
  const double amp = 1.0 / std::sqrt(static_cast<double>(colors));
  for (int c = 0; c < colors; ++c) s.amplitudes[static_cast<std::size_t>(c) * stride] = amp;
  return s;
}

void check_source_state(const SourceState& s) {
  std::size_t dim = 1;
  for (std::size_t k = 0; k < s.legs; ++k) dim *= static_cast<std::size_t>(s.colors);
  if (s.amplitudes.size() != dim) throw PreconditionError("source state has the wrong dimension");
  double n2 = 0.0;
  for (const auto& a : s.amplitudes) n2 += std::norm(a);
  if (std::abs(n2 - 1.0) > 1e-12) throw PreconditionError("source state is not normalized");
}

ComplexMatrix identity_matrix(std::size_t d) {
  ComplexMatrix m(d, std::vector<Complex>(d));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

double unitarity_defect(const ComplexMatrix& u) {
  const std::size_t d = u.size();
  for (const auto& row : u) {
    if (row.size() != d) return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += u[i][k] * std::conj(u[j][k]);
      if (i == j) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

double unitarity_radius(const ComplexMatrix& u) {
  // ||U - W|| <= ||U U^dagger - I||_2 <= ||U U^dagger - I||_F for the polar
  // factor W; the Frobenius norm is enclosed in interval arithmetic.
  const std::size_t d = u.size();
  for (const auto& row : u) {
    if (row.size() != d) return std::numeric_limits<double>::infinity();
  }
  Interval fro2(0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ComplexInterval acc{Interval(0.0), Interval(0.0)};
      for (std::size_t k = 0; k < d; ++k) {
        ComplexInterval a{Interval(u[i][k].real()), Interval(u[i][k].imag())};
        ComplexInterval b{Interval(u[j][k].real()), Interval(u[j][k].imag())};
        acc += a * conj(b);
      }
      if (i == j) acc.re = acc.re - Interval(1.0);
      fro2 += norm(acc);
    }
  }
  return sqrt(fro2).hi();
}

void check_measurement(const Measurement& m, double tol) {
  const std::size_t d = m.dimension;
  ComplexMatrix sum(d, std::vector<Complex>(d));
  for (const auto& e : m.elements) {
    for (const auto& v : e.basis) {
      if (v.size() != d) throw PreconditionError("measurement vector has the wrong dimension");
      for (std::size_t i = 0; i < d; ++i) {
        if (v[i] == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) sum[i][j] += v[i] * std::conj(v[j]);
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const Complex expected = i == j ? 1.0 : 0.0;
      if (std::abs(sum[i][j] - expected) > tol) {
        throw PreconditionError("measurement of party '" + m.party + "' is not complete and orthogonal");
      }
    }
  }
}

Measurement build_cm_measurement(const CmStrategy& strategy, std::size_t party,
                                 const std::optional<RefinementUnitary>& refinement) {
  const std::size_t dim = strategy.view_count(party);
  const auto& amb = strategy.ambiguous_views(party);
  Measurement m;
  m.party = strategy.network().parties[party].name;
  m.dimension = dim;
  auto unit = [dim](std::size_t v) {
    std::vector<Complex> e(dim);
    e[v] = 1.0;
    return e;
  };
  for (std::size_t v : strategy.compatible_views(party)) {
    m.elements.push_back({Outcome::view(strategy.view_colors(party, v)), {unit(v)}});
  }
  if (amb.empty()) return m;

  if (!refinement) {
    MeasurementElement chi{Outcome::ambiguous(), {}};
    for (std::size_t v : amb) chi.basis.push_back(unit(v));
    m.elements.push_back(std::move(chi));
    return m;
  }
  const auto& u = refinement->matrix;
  if (u.size() != amb.size()) {
    throw PreconditionError("refinement for party '" + m.party + "' has dimension " +
                            std::to_string(u.size()) + ", expected " + std::to_string(amb.size()));
  }
  for (const auto& row : u) {
    if (row.size() != amb.size()) throw PreconditionError("refinement matrix is not square");
  }
  if (unitarity_defect(u) > 1e-10) {
    throw PreconditionError("refinement for party '" + m.party + "' is not unitary");
  }
  for (std::size_t r = 0; r < u.size(); ++r) {
    std::vector<Complex> vec(dim);
    for (std::size_t k = 0; k < amb.size(); ++k) vec[amb[k]] = u[r][k];
    m.elements.push_back({Outcome::refined(static_cast<int>(r + 1)), {std::move(vec)}});
  }
  return m;
}

Measurement build_cm_measurement(const Network& net, const std::string& party, const TupleSet& tuples,
                                 const std::optional<RefinementUnitary>& refinement) {
  const CmStrategy strategy(net, tuples);
  return build_cm_measurement(strategy, net.party_index(party), refinement);
}

Wiring make_wiring(const Network& net) {
  const Topology topo = make_topology(net);
  Wiring w;
  w.parties = net.party_names();
  w.view_legs = topo.view_legs;
  w.legs = topo.total_legs;
  w.colors = net.colors;
  return w;
}

namespace {

using std::norm;

// Nonzero entries of a product state: per-leg colors and the amplitude.
template <class Cx>
struct SparseEntry {
  std::vector<int> digits;
  Cx amp;
};

template <class Cx>
struct KernelParty {
  std::vector<std::size_t> view_legs;
  /// entries[view] = (fine index, <fine vector|view>) with nonzero coefficient.
  std::vector<std::vector<std::pair<int, Cx>>> entries;
  /// Measurement element that each fine index belongs to.
  std::vector<std::size_t> fine_element;
  std::vector<Outcome> labels;
};

template <class Cx>
KernelParty<Cx> kernel_from_measurement(const Measurement& m, const std::vector<std::size_t>& view_legs) {
  KernelParty<Cx> k;
  k.view_legs = view_legs;
  k.entries.resize(m.dimension);
  int fine = 0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    k.labels.push_back(m.elements[e].label);
    for (const auto& vec : m.elements[e].basis) {
      for (std::size_t v = 0; v < vec.size(); ++v) {
        if (vec[v] != 0.0) k.entries[v].emplace_back(fine, std::conj(vec[v]));
      }
      k.fine_element.push_back(e);
      ++fine;
    }
  }
  return k;
}

// Amplitudes <fine tuple|psi> over all fine tuples reachable from the
// support of psi.
template <class Cx>
std::map<std::vector<int>, Cx> contract(const std::vector<SparseEntry<Cx>>& state, int colors,
                                        const std::vector<KernelParty<Cx>>& parties) {
  std::map<std::vector<int>, Cx> amps;
  const std::size_t n = parties.size();
  std::vector<const std::vector<std::pair<int, Cx>>*> lists(n);
  std::vector<std::size_t> pos(n);
  std::vector<int> key(n);
  for (const auto& entry : state) {
    bool reachable = true;
    for (std::size_t p = 0; p < n && reachable; ++p) {
      std::size_t v = 0;
      for (std::size_t leg : parties[p].view_legs) {
        v = v * static_cast<std::size_t>(colors) + static_cast<std::size_t>(entry.digits[leg]);
      }
      lists[p] = &parties[p].entries[v];
      reachable = !lists[p]->empty();
    }
    if (!reachable) continue;
    std::fill(pos.begin(), pos.end(), 0);
    for (;;) {
      Cx amp = entry.amp;
      for (std::size_t p = 0; p < n; ++p) {
        const auto& [fine, coef] = (*lists[p])[pos[p]];
        key[p] = fine;
        amp = amp * coef;
      }
      auto [it, inserted] = amps.try_emplace(key, amp);
      if (!inserted) it->second += amp;
      std::size_t p = n;
      while (p-- > 0) {
        if (++pos[p] < lists[p]->size()) break;
        pos[p] = 0;
      }
      if (p == static_cast<std::size_t>(-1)) break;
    }
  }
  return amps;
}

template <class Cx, class Prob>
std::map<OutcomeTuple, Prob> fold_probabilities(const std::map<std::vector<int>, Cx>& amps,
                                                const std::vector<KernelParty<Cx>>& parties) {
  std::map<OutcomeTuple, Prob> probs;
  OutcomeTuple t(parties.size());
  for (const auto& [key, amp] : amps) {
    for (std::size_t p = 0; p < parties.size(); ++p) {
      t[p] = parties[p].labels[parties[p].fine_element[static_cast<std::size_t>(key[p])]];
    }
    auto [it, inserted] = probs.try_emplace(t, norm(amp));
    if (!inserted) it->second += norm(amp);
  }
  return probs;
}

std::uint64_t checked_power(int base, std::size_t exp, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (v > cap / static_cast<std::uint64_t>(base)) {
      throw CapExceededError("state dimension exceeds the cap of " + std::to_string(cap));
    }
    v *= static_cast<std::uint64_t>(base);
  }
  if (v > cap) throw CapExceededError("state dimension exceeds the cap of " + std::to_string(cap));
  return v;
}

void check_sources_for(const Network& net, const std::vector<SourceState>& sources) {
  if (sources.size() != net.num_sources()) {
    throw PreconditionError("need exactly one source state per source");
  }
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].legs != net.sources[s].legs.size() || sources[s].colors != net.colors) {
      throw PreconditionError("source state for '" + net.sources[s].name + "' has the wrong shape");
    }
    check_source_state(sources[s]);
  }
}

// Tensor product of the nonzero entries of each source, sources in
// declaration order.
template <class Cx, class AmpFn>
std::vector<SparseEntry<Cx>> product_support(const Network& net, const std::vector<SourceState>& sources,
                                             std::size_t total_legs, AmpFn&& amp_of, std::uint64_t cap) {
  Cx one{};
  if constexpr (std::is_same_v<Cx, Complex>) {
    one = Complex(1.0, 0.0);
  } else {
    one = ComplexInterval{Interval(1.0), Interval(0.0)};
  }
  std::vector<SparseEntry<Cx>> acc{{std::vector<int>(), one}};
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& src = sources[s];
    std::vector<std::pair<std::size_t, Cx>> nz;
    for (std::size_t i = 0; i < src.amplitudes.size(); ++i) {
      if (src.amplitudes[i] != 0.0) nz.emplace_back(i, amp_of(s, i));
    }
    std::vector<SparseEntry<Cx>> next;
    if (acc.size() * nz.size() > cap) throw CapExceededError("state support exceeds the cap");
    next.reserve(acc.size() * nz.size());
    for (const auto& e : acc) {
      for (const auto& [local, amp] : nz) {
        SparseEntry<Cx> x{e.digits, e.amp * amp};
        std::vector<int> legs(src.legs);
        std::size_t rem = local;
        for (std::size_t k = src.legs; k-- > 0;) {
          legs[k] = static_cast<int>(rem % static_cast<std::size_t>(net.colors));
          rem /= static_cast<std::size_t>(net.colors);
        }
        x.digits.insert(x.digits.end(), legs.begin(), legs.end());
        next.push_back(std::move(x));
      }
    }
    acc = std::move(next);
  }
  for (const auto& e : acc) {
    if (e.digits.size() != total_legs) throw ConsistencyError("leg count mismatch in product state");
  }
  return acc;
}

}  // namespace

GlobalState build_global_state(const Network& net, const std::vector<SourceState>& sources, std::uint64_t cap) {
  GlobalState g;
  g.wiring = make_wiring(net);
  check_sources_for(net, sources);
  const std::uint64_t dim = checked_power(net.colors, g.wiring.legs, cap);
  g.amplitudes.assign(dim, Complex(0.0, 0.0));
  auto support = product_support<Complex>(net, sources, g.wiring.legs,
                                          [&](std::size_t s, std::size_t i) { return sources[s].amplitudes[i]; },
                                          cap);
  for (const auto& e : support) {
    std::uint64_t idx = 0;
    for (int d : e.digits) idx = idx * static_cast<std::uint64_t>(net.colors) + static_cast<std::uint64_t>(d);
    g.amplitudes[idx] = e.amp;
  }
  return g;
}

Distribution born_distribution(const GlobalState& state, const std::vector<Measurement>& measurements) {
  const Wiring& w = state.wiring;
  if (measurements.size() != w.parties.size()) {
    throw PreconditionError("need exactly one measurement per party");
  }
  std::vector<KernelParty<Complex>> kparties;
  for (std::size_t p = 0; p < measurements.size(); ++p) {
    const auto& m = measurements[p];
    std::size_t dim = 1;
    for (std::size_t k = 0; k < w.view_legs[p].size(); ++k) dim *= static_cast<std::size_t>(w.colors);
    if (m.dimension != dim) throw PreconditionError("measurement of party '" + m.party + "' has the wrong dimension");
    check_measurement(m);
    kparties.push_back(kernel_from_measurement<Complex>(m, w.view_legs[p]));
  }

  std::vector<SparseEntry<Complex>> support;
  for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx) {
    if (state.amplitudes[idx] == 0.0) continue;
    std::vector<int> digits(w.legs);
    std::size_t rem = idx;
    for (std::size_t k = w.legs; k-- > 0;) {
      digits[k] = static_cast<int>(rem % static_cast<std::size_t>(w.colors));
      rem /= static_cast<std::size_t>(w.colors);
    }
    support.push_back({std::move(digits), state.amplitudes[idx]});
  }

  auto probs = fold_probabilities<Complex, double>(contract(support, w.colors, kparties), kparties);
  std::erase_if(probs, [](const auto& kv) { return kv.second < kProbabilityFloor; });
  return Distribution(w.parties, std::move(probs));
}

QuantumModel QuantumModel::cm(const Network& net, const TupleSet& tuples) {
  require_valid(net);
  QuantumModel model{net, tuples, {}, std::vector<std::optional<RefinementUnitary>>(net.num_parties())};
  for (const auto& s : net.sources) model.sources.push_back(cm_source_state(s.legs.size(), net.colors));
  return model;
}

void QuantumModel::set_refinement(RefinementUnitary u) {
  const std::size_t p = network.party_index(u.party);
  refinements[p] = std::move(u);
}

void QuantumModel::set_all_refinements(const ComplexMatrix& u) {
  for (const auto& p : network.parties) set_refinement({p.name, u});
}

namespace {

void check_model(const QuantumModel& model) {
  if (model.refinements.size() != model.network.num_parties()) {
    throw PreconditionError("need one refinement slot per party");
  }
  check_sources_for(model.network, model.sources);
}

}  // namespace

Distribution simulate(const QuantumModel& model) {
  check_model(model);
  const CmStrategy strategy(model.network, model.tuples);
  const Topology& topo = strategy.topology();
  std::vector<KernelParty<Complex>> kparties;
  for (std::size_t p = 0; p < model.network.num_parties(); ++p) {
    const Measurement m = build_cm_measurement(strategy, p, model.refinements[p]);
    kparties.push_back(kernel_from_measurement<Complex>(m, topo.view_legs[p]));
  }
  auto support = product_support<Complex>(
      model.network, model.sources, topo.total_legs,
      [&](std::size_t s, std::size_t i) { return model.sources[s].amplitudes[i]; }, kDefaultStateCap);
  auto probs = fold_probabilities<Complex, double>(contract(support, model.network.colors, kparties), kparties);
  std::erase_if(probs, [](const auto& kv) { return kv.second < kProbabilityFloor; });
  return Distribution(model.network.party_names(), std::move(probs));
}

std::map<OutcomeTuple, Interval> enclose_probabilities(const QuantumModel& model,
                                                       const std::vector<OutcomeTuple>& wanted) {
  check_model(model);
  const CmStrategy strategy(model.network, model.tuples);
  const Topology& topo = strategy.topology();
  const Interval zero(0.0);

  std::vector<KernelParty<ComplexInterval>> kparties;
  for (std::size_t p = 0; p < model.network.num_parties(); ++p) {
    // Validates dimensions and unitarity.
    const Measurement m = build_cm_measurement(strategy, p, model.refinements[p]);
    KernelParty<ComplexInterval> k;
    k.view_legs = topo.view_legs[p];
    k.entries.resize(m.dimension);
    int fine = 0;
    for (std::size_t v : strategy.compatible_views(p)) {
      k.entries[v].emplace_back(fine, ComplexInterval{Interval(1.0), zero});
      k.fine_element.push_back(k.labels.size());
      k.labels.push_back(Outcome::view(strategy.view_colors(p, v)));
      ++fine;
    }
    const auto& amb = strategy.ambiguous_views(p);
    if (!amb.empty() && !model.refinements[p]) {
      const std::size_t element = k.labels.size();
      k.labels.push_back(Outcome::ambiguous());
      for (std::size_t v : amb) {
        k.entries[v].emplace_back(fine++, ComplexInterval{Interval(1.0), zero});
        k.fine_element.push_back(element);
      }
    } else if (!amb.empty()) {
      const auto& u = model.refinements[p]->matrix;
      const double radius = unitarity_radius(u);
      for (std::size_t r = 0; r < u.size(); ++r) {
        k.labels.push_back(Outcome::refined(static_cast<int>(r + 1)));
        k.fine_element.push_back(k.labels.size() - 1);
        for (std::size_t j = 0; j < amb.size(); ++j) {
          ComplexInterval c{Interval(u[r][j].real()), -Interval(u[r][j].imag())};
          if (radius > 0.0) c = {c.re.widened(radius), c.im.widened(radius)};
          if (!c.is_exact_zero()) k.entries[amb[j]].emplace_back(fine, c);
        }
        ++fine;
      }
    }
    kparties.push_back(std::move(k));
  }

  // Source amplitudes: exact 1/sqrt(C) for uniform superpositions, otherwise
  // the stored values renormalized in interval arithmetic.
  std::vector<Interval> inv_norm;
  for (const auto& src : model.sources) {
    if (src.uniform_superposition) {
      inv_norm.push_back(Interval(1.0) / sqrt(Interval(static_cast<double>(src.colors))));
    } else {
      Interval n2(0.0);
      for (const auto& a : src.amplitudes) n2 += square(Interval(a.real())) + square(Interval(a.imag()));
      inv_norm.push_back(Interval(1.0) / sqrt(n2));
    }
  }
  auto amp_of = [&](std::size_t s, std::size_t i) {
    const auto& src = model.sources[s];
    if (src.uniform_superposition) return ComplexInterval{inv_norm[s], zero};
    return ComplexInterval{Interval(src.amplitudes[i].real()) * inv_norm[s],
                           Interval(src.amplitudes[i].imag()) * inv_norm[s]};
  };
  auto support = product_support<ComplexInterval>(model.network, model.sources, topo.total_legs, amp_of,
                                                  kDefaultStateCap);
  auto probs = fold_probabilities<ComplexInterval, Interval>(
      contract(support, model.network.colors, kparties), kparties);

  std::map<OutcomeTuple, Interval> out;
  for (const auto& t : wanted) {
    auto it = probs.find(t);
    out[t] = it == probs.end() ? Interval(0.0) : it->second;
  }
  return out;
}

}  // namespace cmnet
