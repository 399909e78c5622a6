#include "cmnet/rigidity_lp.hpp"

#include "cmnet/errors.hpp"
#include "cmnet/interval.hpp"
#include "cmnet/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace cmnet {

OutcomeTuple RevealingEvent::with_refined(int r) const {
  OutcomeTuple t = outcomes;
  t[party_index] = Outcome::refined(r);
  return t;
}

std::vector<OutcomeTuple> RevealingEvent::fine_outcomes(int r, const std::vector<int>& dims) const {
  std::vector<OutcomeTuple> out{with_refined(r)};
  for (std::size_t p = 0; p < outcomes.size(); ++p) {
    if (p == party_index || !outcomes[p].is_ambiguous()) continue;
    std::vector<OutcomeTuple> next;
    for (const auto& t : out) {
      for (int k = 1; k <= dims[p]; ++k) {
        next.push_back(t);
        next.back()[p] = Outcome::refined(k);
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace {

std::vector<RevealingEvent> find_events(const CmStrategy& strategy, std::size_t party, std::size_t view_index,
                                        std::uint64_t cap) {
  const Network& net = strategy.network();
  if (strategy.compatible(party, view_index)) {
    throw PreconditionError("view is compatible for party '" + net.parties[party].name + "'");
  }
  const std::uint64_t total = strategy.assignment_count(cap);

  // How often each outcome tuple of the other parties occurs.
  std::map<OutcomeTuple, std::uint64_t> seen;
  for (std::uint64_t i = 0; i < total; ++i) {
    OutcomeTuple t = classical_outcome(strategy, strategy.assignment(i));
    t[party] = Outcome::ambiguous();
    ++seen[t];
  }

  std::vector<RevealingEvent> events;
  for (std::uint64_t i = 0; i < total; ++i) {
    ColorAssignment a = strategy.assignment(i);
    if (strategy.view_index_of(party, a) != view_index) continue;
    OutcomeTuple t = classical_outcome(strategy, a);
    t[party] = Outcome::ambiguous();
    if (seen.at(t) != 1) continue;
    events.push_back({net.parties[party].name, party, strategy.view_colors(party, view_index), std::move(a),
                      std::move(t)});
  }
  return events;
}

}  // namespace

std::vector<RevealingEvent> find_revealing_completions(const Network& net, const TupleSet& tuples,
                                                       const std::string& party, const std::vector<int>& view,
                                                       std::uint64_t cap) {
  const CmStrategy strategy(net, tuples);
  const std::size_t p = net.party_index(party);
  return find_events(strategy, p, strategy.view_index(p, view), cap);
}

RevealingIndex collect_revealing_events(const Network& net, const TupleSet& tuples,
                                        const std::vector<ColorAssignment>& patterns, std::uint64_t cap) {
  const CmStrategy strategy(net, tuples);
  RevealingIndex index;
  for (std::size_t p = 0; p < net.num_parties(); ++p) {
    for (const auto& pattern : patterns) {
      const std::size_t v = strategy.view_index_of(p, pattern);
      if (index.count({p, v})) continue;
      index[{p, v}] = find_events(strategy, p, v, cap);
    }
  }
  return index;
}

RValues compute_r_values(const Network& net, const TupleSet& tuples, const Distribution& quantum_p,
                         const std::vector<ColorAssignment>& patterns, const RevealingIndex& events) {
  const CmStrategy strategy(net, tuples);
  if (quantum_p.parties() != net.party_names()) {
    throw PreconditionError("distribution parties do not match the network");
  }
  const double scale = static_cast<double>(strategy.assignment_count(std::numeric_limits<std::uint64_t>::max()));
  std::vector<int> dims;
  for (std::size_t p = 0; p < net.num_parties(); ++p) {
    dims.push_back(static_cast<int>(strategy.ambiguous_views(p).size()));
  }
  RValues out;
  for (std::size_t p = 0; p < net.num_parties(); ++p) {
    const int d = static_cast<int>(strategy.ambiguous_views(p).size());
    for (std::size_t t = 0; t < patterns.size(); ++t) {
      const std::size_t v = strategy.view_index_of(p, patterns[t]);
      auto it = events.find({p, v});
      if (it == events.end() || it->second.empty()) {
        throw PreconditionError("no revealing event for party '" + net.parties[p].name + "' under pattern " +
                                std::to_string(t + 1));
      }
      for (int i = 1; i <= d; ++i) {
        RValue rv;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0.0;
        for (const auto& e : it->second) {
          double mass = 0.0;
          for (auto& o : e.fine_outcomes(i, dims)) {
            mass += quantum_p.probability(o);
            rv.events.push_back(std::move(o));
          }
          const double r = mass * scale;
          lo = std::min(lo, r);
          hi = std::max(hi, r);
          sum += r;
        }
        rv.event_count = it->second.size();
        if (hi - lo > kRValueAgreement) {
          throw ConsistencyError("revealing events disagree for party '" + net.parties[p].name + "'");
        }
        rv.value = sum / static_cast<double>(it->second.size());
        out[{p, i, t}] = std::move(rv);
      }
    }
  }
  return out;
}

std::string to_string(RowTag tag) {
  switch (tag) {
    case RowTag::kBlockMarginal:
      return "block-marginal";
    case RowTag::kPartyPattern:
      return "party-pattern";
    case RowTag::kNormalization:
      return "normalization";
    case RowTag::kGeneric:
      return "generic";
  }
  return "generic";
}

std::size_t LPInstance::count(RowTag tag) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [tag](const LpRow& r) { return r.tag == tag; }));
}

LPInstance build_lp(const Network& net, const TupleSet& tuples, const Distribution& quantum_p,
                    const std::vector<ColorAssignment>& patterns, const RValues& r_values) {
  if (patterns.empty()) throw PreconditionError("build_lp needs at least one hidden pattern");
  const CmStrategy strategy(net, tuples);
  const std::size_t n = net.num_parties();
  const std::size_t num_t = patterns.size();
  std::vector<int> dims;
  std::uint64_t blocks = 1;
  for (std::size_t p = 0; p < n; ++p) {
    const int d = static_cast<int>(strategy.ambiguous_views(p).size());
    if (d == 0) throw PreconditionError("party '" + net.parties[p].name + "' has no ambiguous view");
    dims.push_back(d);
    blocks *= static_cast<std::uint64_t>(d);
    if (blocks * num_t > 2'000'000) throw CapExceededError("LP would exceed 2e6 variables");
  }
  for (const auto& pattern : patterns) {
    for (std::size_t p = 0; p < n; ++p) {
      if (strategy.compatible(p, strategy.view_index_of(p, pattern))) {
        throw PreconditionError("pattern leaves a party unambiguous");
      }
    }
  }

  // Refined outcome tuples in lexicographic order.
  std::vector<OutcomeTuple> fine;
  std::vector<int> idx(n, 1);
  for (;;) {
    OutcomeTuple o;
    for (std::size_t p = 0; p < n; ++p) o.push_back(Outcome::refined(idx[p]));
    fine.push_back(std::move(o));
    std::size_t p = n;
    while (p-- > 0) {
      if (++idx[p] <= dims[p]) break;
      idx[p] = 1;
    }
    if (p == static_cast<std::size_t>(-1)) break;
  }

  LPInstance lp;
  lp.num_vars = fine.size() * num_t;
  for (const auto& o : fine) {
    for (std::size_t t = 0; t < num_t; ++t) lp.variables.push_back({o, t});
  }
  auto var = [num_t](std::size_t o, std::size_t t) { return o * num_t + t; };

  for (std::size_t o = 0; o < fine.size(); ++o) {
    LpRow row;
    row.tag = RowTag::kBlockMarginal;
    for (std::size_t t = 0; t < num_t; ++t) row.terms.emplace_back(var(o, t), 1.0);
    row.rhs = quantum_p.probability(fine[o]);
    row.rhs_outcomes = {fine[o]};
    lp.rows.push_back(std::move(row));
  }

  const std::uint64_t total = strategy.assignment_count(std::numeric_limits<std::uint64_t>::max());
  const Rational weight(BigInt(1), BigInt(total));
  for (std::size_t p = 0; p < n; ++p) {
    for (int i = 1; i <= dims[p]; ++i) {
      for (std::size_t t = 0; t < num_t; ++t) {
        auto it = r_values.find({p, i, t});
        if (it == r_values.end()) throw PreconditionError("missing r-value");
        LpRow row;
        row.tag = RowTag::kPartyPattern;
        for (std::size_t o = 0; o < fine.size(); ++o) {
          if (fine[o][p].index == i) row.terms.emplace_back(var(o, t), 1.0);
        }
        row.rhs = it->second.value / static_cast<double>(total);
        row.rhs_outcomes = it->second.events;
        row.rhs_divisor = it->second.event_count;
        lp.rows.push_back(std::move(row));
      }
    }
  }

  for (std::size_t t = 0; t < num_t; ++t) {
    LpRow row;
    row.tag = RowTag::kNormalization;
    for (std::size_t o = 0; o < fine.size(); ++o) row.terms.emplace_back(var(o, t), 1.0);
    row.exact_rhs = weight;
    row.rhs = to_double(weight);
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

std::string to_string(VerifyMode mode) { return mode == VerifyMode::kExact ? "exact" : "interval"; }

namespace {

// Smallest double interval containing r.
Interval enclose(const Rational& r) {
  const double d = to_double(r);
  double lo = d;
  double hi = d;
  while (exact_rational(lo) > r) lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
  while (exact_rational(hi) < r) hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
  return Interval(lo, hi);
}

void check_shape(const LPInstance& lp, const FarkasCertificate& cert) {
  if (cert.y.size() != lp.rows.size()) throw PreconditionError("certificate length does not match row count");
  for (const auto& row : lp.rows) {
    for (const auto& [v, a] : row.terms) {
      if (v >= lp.num_vars) throw PreconditionError("LP term references unknown variable");
    }
  }
}

// Coefficients and multipliers are doubles, so y.A <= 0 is decided exactly
// in both modes; only the right-hand side may need an enclosure.
bool exact_ya_nonpositive(const LPInstance& lp, const FarkasCertificate& cert) {
  std::vector<Rational> ya(lp.num_vars);
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (!std::isfinite(cert.y[i])) return false;
    if (cert.y[i] == 0.0) continue;
    const Rational y = exact_rational(cert.y[i]);
    for (const auto& [v, a] : lp.rows[i].terms) ya[v] += y * exact_rational(a);
  }
  return std::none_of(ya.begin(), ya.end(), [](const Rational& x) { return x > 0; });
}

bool verify_exact(const LPInstance& lp, const FarkasCertificate& cert) {
  for (const auto& row : lp.rows) {
    if (!row.exact_rhs) throw PreconditionError("exact verification needs rational right-hand sides");
  }
  if (!exact_ya_nonpositive(lp, cert)) return false;
  Rational yb = 0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (cert.y[i] != 0.0) yb += exact_rational(cert.y[i]) * *lp.rows[i].exact_rhs;
  }
  return yb > 0;
}

bool verify_interval(const LPInstance& lp, const FarkasCertificate& cert) {
  std::vector<OutcomeTuple> wanted;
  if (lp.model) {
    for (const auto& row : lp.rows) {
      if (!row.exact_rhs) wanted.insert(wanted.end(), row.rhs_outcomes.begin(), row.rhs_outcomes.end());
    }
  }
  const auto enclosures = lp.model ? enclose_probabilities(*lp.model, wanted) : std::map<OutcomeTuple, Interval>{};

  if (!exact_ya_nonpositive(lp, cert)) return false;
  Interval yb(0.0);
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& row = lp.rows[i];
    const Interval y(cert.y[i]);

    Interval b;
    if (row.exact_rhs) {
      b = enclose(*row.exact_rhs);
    } else if (lp.model && !row.rhs_outcomes.empty()) {
      Interval sum(0.0);
      for (const auto& o : row.rhs_outcomes) sum += enclosures.at(o);
      b = sum / Interval(static_cast<double>(row.rhs_divisor));
    } else {
      b = Interval(row.rhs);
    }
    yb += y * b;
  }
  return yb.lo() > 0.0;
}

}  // namespace

bool verify_certificate(const LPInstance& lp, const FarkasCertificate& cert, VerifyMode mode) {
  check_shape(lp, cert);
  return mode == VerifyMode::kExact ? verify_exact(lp, cert) : verify_interval(lp, cert);
}

std::string to_string(FeasibilityResult::Status s) {
  switch (s) {
    case FeasibilityResult::Status::kFeasible:
      return "feasible";
    case FeasibilityResult::Status::kInfeasible:
      return "infeasible";
    case FeasibilityResult::Status::kBorderline:
      return "borderline";
  }
  return "borderline";
}

namespace {

// Pushes y.A strictly below zero using rows whose coefficient sum covers
// every variable (the normalization rows of a CM instance).
void tighten(const LPInstance& lp, std::vector<double>& y) {
  std::vector<double> cover(lp.num_vars, 0.0);
  std::vector<std::size_t> cover_rows;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].tag != RowTag::kNormalization) continue;
    cover_rows.push_back(i);
    for (const auto& [v, a] : lp.rows[i].terms) cover[v] += a;
  }
  if (cover_rows.empty() || std::any_of(cover.begin(), cover.end(), [](double c) { return c < 1.0; })) return;

  std::vector<long double> ya(lp.num_vars, 0.0L);
  double ymax = 0.0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    ymax = std::max(ymax, std::abs(y[i]));
    for (const auto& [v, a] : lp.rows[i].terms) ya[v] += static_cast<long double>(y[i]) * a;
  }
  long double eps = 0.0L;
  for (std::size_t v = 0; v < lp.num_vars; ++v) eps = std::max(eps, ya[v] / cover[v]);
  eps += 1e-12L * ymax + 1e-300L;
  for (std::size_t i : cover_rows) y[i] -= static_cast<double>(eps);
}

}  // namespace

FeasibilityResult solve_feasibility(const LPInstance& lp, double tol) {
  const std::size_t rows = lp.rows.size();
  const std::size_t n = lp.num_vars;
  for (const auto& row : lp.rows) {
    if (!std::isfinite(row.rhs)) throw PreconditionError("LP right-hand side is not finite");
    for (const auto& [v, a] : row.terms) {
      if (v >= n || !std::isfinite(a)) throw PreconditionError("malformed LP row");
    }
  }
  if (static_cast<double>(n + 1) * static_cast<double>(2 * rows) > 5e7) {
    throw CapExceededError("LP too large for the dense solver");
  }

  // max b.(y+ - y-)  s.t.  A^T (y+ - y-) <= 0,  sum(y+ + y-) <= 1.
  std::vector<std::vector<double>> at(n + 1, std::vector<double>(2 * rows, 0.0));
  std::vector<double> c(2 * rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (const auto& [v, a] : lp.rows[i].terms) {
      at[v][i] += a;
      at[v][rows + i] -= a;
    }
    at[n][i] = 1.0;
    at[n][rows + i] = 1.0;
    c[i] = lp.rows[i].rhs;
    c[rows + i] = -lp.rows[i].rhs;
  }
  std::vector<double> rhs(n + 1, 0.0);
  rhs[n] = 1.0;
  const SimplexResult sol = maximize_dense(at, rhs, c);
  if (sol.status != SimplexResult::Status::kOptimal) throw SolverError("margin LP reported unbounded");

  FeasibilityResult result;
  result.margin = std::max(0.0, sol.objective);

  if (result.margin <= tol) {
    std::vector<double> q(sol.duals.begin(), sol.duals.begin() + static_cast<std::ptrdiff_t>(n));
    for (double& x : q) {
      if (x < -1e-12) {
        result.status = FeasibilityResult::Status::kBorderline;
        return result;
      }
      x = std::max(x, 0.0);
    }
    double residual = 0.0;
    for (const auto& row : lp.rows) {
      long double s = -static_cast<long double>(row.rhs);
      for (const auto& [v, a] : row.terms) s += static_cast<long double>(a) * q[v];
      residual = std::max(residual, static_cast<double>(std::abs(s)));
    }
    result.witness = std::move(q);
    result.residual = residual;
    result.status = residual <= tol ? FeasibilityResult::Status::kFeasible : FeasibilityResult::Status::kBorderline;
    return result;
  }

  FarkasCertificate cert;
  cert.y.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) cert.y[i] = sol.x[i] - sol.x[rows + i];
  tighten(lp, cert.y);

  const bool all_exact =
      std::all_of(lp.rows.begin(), lp.rows.end(), [](const LpRow& r) { return r.exact_rhs.has_value(); });
  const VerifyMode mode = all_exact ? VerifyMode::kExact : VerifyMode::kInterval;
  if (verify_certificate(lp, cert, mode)) {
    result.status = FeasibilityResult::Status::kInfeasible;
    result.verified_by = mode;
  } else {
    result.status = FeasibilityResult::Status::kBorderline;
  }
  result.certificate = std::move(cert);
  return result;
}

std::string Certification::verdict() const {
  switch (feasibility.status) {
    case FeasibilityResult::Status::kInfeasible:
      return "nonlocal-certified";
    case FeasibilityResult::Status::kFeasible:
      return "inconclusive";
    case FeasibilityResult::Status::kBorderline:
      return "borderline";
  }
  return "borderline";
}

Certification certify(const QuantumModel& model, double tol) {
  const CmStrategy strategy(model.network, model.tuples);
  for (std::size_t p = 0; p < model.network.num_parties(); ++p) {
    if (!strategy.ambiguous_views(p).empty() && !model.refinements[p]) {
      throw PreconditionError("party '" + model.network.parties[p].name + "' has no refinement");
    }
  }
  Certification c;
  c.patterns = enumerate_hidden_patterns(model.network, model.tuples);
  if (c.patterns.empty()) throw PreconditionError("no hidden patterns: every assignment reveals some party");
  const RevealingIndex events = collect_revealing_events(model.network, model.tuples, c.patterns);
  const Distribution p = simulate(model);
  c.r_values = compute_r_values(model.network, model.tuples, p, c.patterns, events);
  c.lp = build_lp(model.network, model.tuples, p, c.patterns, c.r_values);
  c.lp.model = model;
  c.feasibility = solve_feasibility(c.lp, tol);
  return c;
}

}  // namespace cmnet
