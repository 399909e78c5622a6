#include "cmnet/search.hpp"

#include "cmnet/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

namespace cmnet {

ComplexMatrix parametrize_unitary(std::span<const double> params) {
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(params.size()) / 2.0)));
  if (d == 0 || 2 * d * d != params.size()) {
    throw PreconditionError("parameter vector length must be 2 d^2");
  }
  for (double x : params) {
    if (!std::isfinite(x)) throw PreconditionError("parameters must be finite");
  }
  std::vector<std::vector<Complex>> cols(d, std::vector<Complex>(d));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t k = 2 * (j * d + i);
      cols[j][i] = Complex(params[k], params[k + 1]);
    }
  }
  auto norm2 = [](const std::vector<Complex>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
  };
  for (std::size_t j = 0; j < d; ++j) {
    const double original = norm2(cols[j]);
    // Two projection passes keep the result orthonormal to ~1e-15.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += std::conj(cols[k][i]) * cols[j][i];
        for (std::size_t i = 0; i < d; ++i) cols[j][i] -= dot * cols[k][i];
      }
    }
    const double residual = norm2(cols[j]);
    if (original == 0.0 || residual < 1e-8 * original) {
      throw RankDeficientError("column " + std::to_string(j) + " is linearly dependent");
    }
    for (auto& z : cols[j]) z /= residual;
  }
  ComplexMatrix u(d, std::vector<Complex>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) u[i][j] = cols[j][i];
  }
  return u;
}

std::vector<double> encode_matrix(const ComplexMatrix& u) {
  const std::size_t d = u.size();
  std::vector<double> params(2 * d * d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      params[2 * (j * d + i)] = u[i][j].real();
      params[2 * (j * d + i) + 1] = u[i][j].imag();
    }
  }
  return params;
}

PortableRng::PortableRng(std::uint64_t seed) : engine_(seed) {}

double PortableRng::uniform() {
  // 53 random bits in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

double infeasibility_margin(const Network& net, const TupleSet& tuples,
                            const std::vector<RefinementUnitary>& refinements) {
  QuantumModel model = QuantumModel::cm(net, tuples);
  for (const auto& r : refinements) model.set_refinement(r);
  return certify(model).feasibility.margin;
}

void check_search_config(const SearchConfig& config) {
  if (config.iterations == 0) throw PreconditionError("search needs at least one iteration");
  if (config.restarts == 0) throw PreconditionError("search needs at least one restart");
  if (config.scales.empty()) throw PreconditionError("search needs at least one perturbation scale");
  for (std::size_t i = 0; i < config.scales.size(); ++i) {
    if (!(config.scales[i] > 0.0)) throw PreconditionError("perturbation scales must be positive");
    if (i > 0 && config.scales[i] > config.scales[i - 1]) {
      throw PreconditionError("perturbation scales must be non-increasing");
    }
  }
  if (!(config.time_budget_seconds > 0.0)) throw PreconditionError("time budget must be positive");
  if (config.temperature < 0.0) throw PreconditionError("temperature must be nonnegative");
}

std::string SearchResult::verdict() const { return certification ? certification->verdict() : "inconclusive"; }

namespace {

struct Layout {
  std::vector<std::size_t> dims;  // ambiguous dimension per party
  bool shared = true;

  std::size_t param_count() const {
    if (shared) {
      const std::size_t d = *std::max_element(dims.begin(), dims.end());
      return 2 * d * d;
    }
    std::size_t n = 0;
    for (std::size_t d : dims) n += 2 * d * d;
    return n;
  }

  std::vector<RefinementUnitary> decode(const Network& net, const std::vector<double>& params) const {
    std::vector<RefinementUnitary> out;
    if (shared) {
      const ComplexMatrix u = parametrize_unitary(params);
      for (std::size_t p = 0; p < dims.size(); ++p) {
        if (dims[p] > 0) out.push_back({net.parties[p].name, u});
      }
      return out;
    }
    std::size_t offset = 0;
    for (std::size_t p = 0; p < dims.size(); ++p) {
      if (dims[p] == 0) continue;
      const std::size_t len = 2 * dims[p] * dims[p];
      out.push_back({net.parties[p].name,
                     parametrize_unitary(std::span<const double>(params).subspan(offset, len))});
      offset += len;
    }
    return out;
  }

  std::vector<double> identity() const {
    if (shared) return encode_matrix(identity_matrix(dims.front()));
    std::vector<double> params;
    for (std::size_t d : dims) {
      if (d == 0) continue;
      const auto block = encode_matrix(identity_matrix(d));
      params.insert(params.end(), block.begin(), block.end());
    }
    return params;
  }
};

struct RestartOutcome {
  std::vector<double> params;
  std::vector<RefinementUnitary> refinements;
  double margin = -1.0;
  std::optional<Certification> certification;
  std::vector<TrajectoryEntry> trajectory;
  std::size_t evaluations = 0;
  bool found = false;
  bool budget_exhausted = false;
};

// SplitMix64 finalizer; decorrelates per-restart seeds.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t thread_count(const SearchConfig& config) {
  if (config.threads > 0) return config.threads;
  if (const char* env = std::getenv("CM_NETCERT_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

SearchResult search_nonlocal(const Network& net, const TupleSet& tuples, const SearchConfig& config,
                             const std::function<void(const TrajectoryEntry&)>& on_accept) {
  check_search_config(config);
  const EcsResult ecs = check_ecs(net);
  if (!ecs.holds) {
    for (std::size_t s = 0; s < net.num_sources(); ++s) {
      if (!ecs.witnesses[s]) {
        throw PreconditionError("network is not ECS: source '" + net.sources[s].name +
                                "' is not the only common source of any party pair");
      }
    }
  }
  if (!solve_pfis(net)) throw PreconditionError("network admits no perfect fractional independent set");

  const CmStrategy strategy(net, tuples);
  Layout layout;
  layout.shared = config.shared_unitary;
  for (std::size_t p = 0; p < net.num_parties(); ++p) layout.dims.push_back(strategy.ambiguous_views(p).size());
  if (std::all_of(layout.dims.begin(), layout.dims.end(), [](std::size_t d) { return d == 0; })) {
    throw PreconditionError("no party has an ambiguous subspace to refine");
  }
  if (layout.shared) {
    for (std::size_t d : layout.dims) {
      if (d != layout.dims.front()) {
        throw PreconditionError("a shared unitary needs equal ambiguous dimensions for all parties");
      }
    }
  }

  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() > config.time_budget_seconds;
  };
  std::mutex callback_mutex;
  std::atomic<std::size_t> first_found{std::numeric_limits<std::size_t>::max()};

  auto run_restart = [&](std::size_t restart) {
    RestartOutcome out;
    PortableRng rng(mix(config.seed ^ mix(restart)));
    const std::size_t count = layout.param_count();

    auto evaluate = [&](const std::vector<double>& params, std::vector<RefinementUnitary>& refinements,
                        std::optional<Certification>& cert) -> std::optional<double> {
      ++out.evaluations;
      try {
        refinements = layout.decode(net, params);
      } catch (const RankDeficientError&) {
        return std::nullopt;
      }
      QuantumModel model = QuantumModel::cm(net, tuples);
      for (const auto& r : refinements) model.set_refinement(r);
      try {
        cert = certify(model, config.lp_tolerance);
      } catch (const SolverError&) {
        return std::nullopt;
      }
      return cert->feasibility.margin;
    };

    std::vector<double> current;
    std::vector<RefinementUnitary> current_refinements;
    std::optional<Certification> current_cert;
    std::optional<double> current_margin;
    // Draw until the starting point is full rank.
    for (int attempt = 0; attempt < 100 && !current_margin; ++attempt) {
      if (config.start_identity && attempt == 0) {
        current = layout.identity();
      } else {
        current.assign(count, 0.0);
        for (double& x : current) x = rng.normal();
      }
      current_margin = evaluate(current, current_refinements, current_cert);
    }
    if (!current_margin) throw SolverError("could not evaluate any starting point");

    auto accept = [&](std::size_t iteration) {
      out.margin = std::max(out.margin, *current_margin);
      if (*current_margin >= out.margin) {
        out.params = current;
        out.refinements = current_refinements;
        out.certification = current_cert;
      }
      TrajectoryEntry e{restart, iteration, *current_margin, out.margin};
      out.trajectory.push_back(e);
      if (on_accept) {
        std::lock_guard lock(callback_mutex);
        on_accept(e);
      }
      const auto& f = current_cert->feasibility;
      if (f.status == FeasibilityResult::Status::kInfeasible && f.margin > config.certify_margin) out.found = true;
    };
    accept(0);

    const std::size_t share = (config.iterations + config.scales.size() - 1) / config.scales.size();
    for (std::size_t it = 1; it < config.iterations; ++it) {
      if (out.found && config.stop_on_first_certificate) break;
      if (config.stop_on_first_certificate && restart > first_found.load()) break;
      if (out_of_time()) {
        out.budget_exhausted = true;
        break;
      }
      const double scale = config.scales[std::min(it / share, config.scales.size() - 1)];
      std::vector<double> candidate = current;
      for (double& x : candidate) x += scale * rng.normal();
      std::vector<RefinementUnitary> refinements;
      std::optional<Certification> cert;
      const auto margin = evaluate(candidate, refinements, cert);
      const double u = rng.uniform();
      if (!margin) continue;

      const double delta = *margin - *current_margin;
      const double temperature =
          config.temperature * (1.0 - static_cast<double>(it) / static_cast<double>(config.iterations));
      const bool take = delta >= 0.0 || (temperature > 0.0 && u < std::exp(delta / temperature));
      if (!take) continue;
      const bool changed = *margin != *current_margin;
      current = std::move(candidate);
      current_refinements = std::move(refinements);
      current_cert = std::move(cert);
      current_margin = margin;
      if (changed) {
        accept(it);
      } else if (*current_margin >= out.margin) {
        out.params = current;
        out.refinements = current_refinements;
        out.certification = current_cert;
      }
    }
    if (out.found) {
      std::size_t expected = first_found.load();
      while (restart < expected && !first_found.compare_exchange_weak(expected, restart)) {
      }
    }
    return out;
  };

  std::vector<std::optional<RestartOutcome>> outcomes(config.restarts);
  const std::size_t workers = std::min(thread_count(config), config.restarts);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= config.restarts) return;
      if (config.stop_on_first_certificate && r > first_found.load()) continue;
      try {
        outcomes[r] = run_restart(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Restarts after the first successful one are discarded so that the
  // result matches a sequential run.
  std::size_t last = config.restarts;
  if (config.stop_on_first_certificate) {
    for (std::size_t r = 0; r < config.restarts; ++r) {
      if (outcomes[r] && outcomes[r]->found) {
        last = r + 1;
        break;
      }
    }
  }

  SearchResult result;
  result.margin = -1.0;
  for (std::size_t r = 0; r < last; ++r) {
    if (!outcomes[r]) continue;
    RestartOutcome& o = *outcomes[r];
    result.evaluations += o.evaluations;
    result.budget_exhausted = result.budget_exhausted || o.budget_exhausted;
    result.trajectory.insert(result.trajectory.end(), o.trajectory.begin(), o.trajectory.end());
    if (o.margin > result.margin) {
      result.margin = o.margin;
      result.best_restart = r;
      result.params = o.params;
      result.refinements = o.refinements;
      result.certification = o.certification;
    }
  }
  if (result.certification && result.certification->feasibility.status != FeasibilityResult::Status::kInfeasible) {
    result.certification.reset();
  }
  return result;
}

}  // namespace cmnet
