#include "adn/engine.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "adn/error.hpp"
#include "adn/messages.hpp"
#include "adn/random.hpp"
#include "adn/surrogate.hpp"

namespace adn {

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::max_rounds: return "max_rounds";
    case StopReason::gap_tolerance: return "gap_tolerance";
    case StopReason::suboptimality_tolerance: return "suboptimality_tolerance";
    case StopReason::stationary: return "stationary";
    case StopReason::stalled: return "stalled";
  }
  return "unknown";
}

namespace {

enum class Mode { adn, cocoa, line_search };

// Owns one block of the iterate. The private copy spans all n coordinates so
// that tests can verify only the owned entries are ever read.
class Worker {
 public:
  Worker(const SparseColMatrix& a, const Partition& partition, std::size_t part, const Regularizer& reg,
         std::vector<double> alpha_full)
      : a_(&a),
        members_(partition.members(part)),
        part_(part),
        num_parts_(partition.num_parts()),
        reg_(&reg),
        alpha_full_(std::move(alpha_full)) {}

  std::span<double> private_alpha() noexcept { return alpha_full_; }

  std::vector<double> block() const {
    std::vector<double> out(members_.size());
    for (std::size_t p = 0; p < members_.size(); ++p) out[p] = alpha_full_[members_[p]];
    return out;
  }

  double g_sum() const { return regularizer_sum(*reg_, block()); }
  std::vector<double> image() const { return block_matvec(*a_, members_, block()); }

  std::vector<std::byte> propose(const ModelSnapshot& snapshot, double sigma, const SolverBudget& budget) {
    LocalSubproblem sub(*a_, members_, part_, num_parts_, snapshot, block(), *reg_, sigma);
    auto sol = solve_local(sub, budget);
    WorkerToMaster msg;
    msg.part = static_cast<std::uint32_t>(part_);
    msg.g_sum_new = sub.regularizer_sum(sol.delta);
    msg.local_model_value = sub.model_value(sol.delta, sol.delta_shared);
    msg.local_decrease = sol.decrease;
    msg.delta_shared = std::move(sol.delta_shared);
    pending_ = std::move(sol.delta);
    certified_eta_ = sol.certified_eta;
    return serialize(msg);
  }

  std::optional<double> certified_eta() const noexcept { return certified_eta_; }
  std::span<const double> pending() const noexcept { return pending_; }
  std::span<const std::size_t> members() const noexcept { return members_; }

  // g sum at alpha + step * delta, reported back for a line-search trial.
  std::vector<std::byte> trial(std::span<const std::byte> step_msg) const {
    const double step = deserialize_scalar(step_msg).value;
    double s = 0.0;
    for (std::size_t p = 0; p < members_.size(); ++p) s += reg_->value(alpha_full_[members_[p]] + step * pending_[p]);
    return serialize(ScalarMessage{static_cast<std::uint32_t>(part_), s});
  }

  void apply(std::span<const std::byte> decision_msg, double step) {
    const auto decision = deserialize_master(decision_msg);
    if (decision.accepted) {
      for (std::size_t p = 0; p < members_.size(); ++p) alpha_full_[members_[p]] += step * pending_[p];
    }
    pending_.clear();
  }

  double gap_partial(std::span<const double> w) const {
    return duality_gap_partial(*reg_, *a_, members_, block(), w);
  }

 private:
  const SparseColMatrix* a_;
  std::span<const std::size_t> members_;
  std::size_t part_;
  std::size_t num_parts_;
  const Regularizer* reg_;
  std::vector<double> alpha_full_;
  std::vector<double> pending_;
  std::optional<double> certified_eta_;
};

template <class F>
void for_each_worker(std::size_t k, Threading threading, F&& fn) {
  if (threading == Threading::multiplexed || k == 1) {
    for (std::size_t p = 0; p < k; ++p) fn(p);
    return;
  }
  std::vector<std::exception_ptr> errors(k);
  std::vector<std::thread> threads;
  threads.reserve(k);
  for (std::size_t p = 0; p < k; ++p) {
    threads.emplace_back([&, p] {
      try {
        fn(p);
      } catch (...) {
        errors[p] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_finite(double x, const char* what, std::size_t round) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::non_finite_value, std::string(what) + " is not finite in round " + std::to_string(round));
  }
}

struct EngineSetup {
  Mode mode = Mode::adn;
  TrustConfig trust;
  double sigma_cocoa = 1.0;
  LineSearchConfig ls;
};

RunResult run_engine(const ProblemSpec& spec, const SparseColMatrix& a, const Partition& partition,
                     const EngineSetup& setup, const SolverBudget& budget, const StopCriteria& stop,
                     const EngineOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::size_t n = a.cols();
  const std::size_t d = a.rows();
  const std::size_t num_parts = partition.num_parts();
  if (partition.num_coordinates() != n) throw Error(ErrorCode::length_mismatch, "partition does not cover A");
  if (spec.loss.dimension() != d) throw Error(ErrorCode::length_mismatch, "loss dimension differs from rows of A");
  if (budget.epochs == 0) throw Error(ErrorCode::invalid_budget, "local solver needs at least one epoch");
  setup.trust.validate();

  std::vector<double> alpha0 = options.alpha0.value_or(std::vector<double>(n, 0.0));
  if (alpha0.size() != n) throw Error(ErrorCode::length_mismatch, "alpha0 must have length n");

  std::vector<Worker> workers;
  workers.reserve(num_parts);
  for (std::size_t k = 0; k < num_parts; ++k) workers.emplace_back(a, partition, k, spec.reg, alpha0);

  // Setup: v = sum_k A_k alpha_k and the cached objective.
  SharedVector v(d);
  double g_total = 0.0;
  for (auto& w : workers) {
    v.apply_delta(w.image());
    g_total += w.g_sum();
  }
  double objective = spec.loss.value(v.values()) + g_total;
  require_finite(objective, "initial objective", 0);

  auto gather_alpha = [&] {
    std::vector<double> alpha(n);
    for (auto& w : workers) {
      const auto block = w.block();
      for (std::size_t p = 0; p < block.size(); ++p) alpha[w.members()[p]] = block[p];
    }
    return alpha;
  };
  auto compute_gap = [&] {
    const auto grad = spec.loss.gradient(v.values());
    double g = 0.0;
    for (auto& w : workers) g += w.gap_partial(grad);
    return std::max(0.0, g);
  };

  RunResult result;
  result.initial_objective = objective;
  result.initial_gap = compute_gap();
  double gap = result.initial_gap;
  double sigma = setup.mode == Mode::adn ? setup.trust.sigma0 : setup.mode == Mode::cocoa ? setup.sigma_cocoa : 1.0;

  auto converged = [&]() -> std::optional<StopReason> {
    if (stop.gap_tol > 0.0 && gap <= stop.gap_tol) return StopReason::gap_tolerance;
    if (stop.optimum && objective - *stop.optimum <= stop.subopt_tol) return StopReason::suboptimality_tolerance;
    return std::nullopt;
  };

  result.reason = StopReason::max_rounds;
  if (auto r = converged()) result.reason = *r;

  RunTotals& totals = result.totals;
  for (std::size_t round = 1; round <= stop.max_rounds && !converged(); ++round) {
    result.sigma_max_seen = std::max(result.sigma_max_seen, sigma);
    const auto snapshot = setup.mode == Mode::cocoa ? ModelSnapshot::capture_smoothness(spec.loss, v.values())
                                                    : ModelSnapshot::capture(spec.loss, v.values());

    // Stage 1: local solves from the frozen snapshot.
    std::vector<std::vector<std::byte>> uplink(num_parts);
    for_each_worker(num_parts, options.threading, [&](std::size_t k) {
      if (options.tamper) options.tamper(round, k, workers[k].private_alpha());
      SolverBudget local = budget;
      local.seed = detail::mix_seed(detail::mix_seed(options.seed, budget.seed), round, k);
      uplink[k] = workers[k].propose(snapshot, sigma, local);
    });

    // Stage 2: the master reads the messages in part order.
    std::vector<double> delta_total(d, 0.0);
    double g_new = 0.0;
    double model_value = 0.0;
    double model_decrease = 0.0;
    double curvature_model = 0.0;
    for (std::size_t k = 0; k < num_parts; ++k) {
      totals.bytes_up += uplink[k].size();
      const auto msg = deserialize_worker(uplink[k]);
      if (msg.part != k || msg.delta_shared.size() != d) {
        throw Error(ErrorCode::malformed_message, "unexpected worker message in round " + std::to_string(round));
      }
      for (std::size_t j = 0; j < d; ++j) {
        delta_total[j] += msg.delta_shared[j];
        curvature_model += snapshot.curvature[j] * msg.delta_shared[j] * msg.delta_shared[j];
      }
      g_new += msg.g_sum_new;
      model_value += msg.local_model_value;
      model_decrease += msg.local_decrease;
    }
    curvature_model *= 0.5 * sigma;

    // Stage 3: rho from v, dv and the reported scalars only.
    std::vector<double> v_new(v.values().begin(), v.values().end());
    for (std::size_t j = 0; j < d; ++j) v_new[j] += delta_total[j];
    double objective_new = spec.loss.value(v_new) + g_new;
    const double bregman = spec.loss.bregman(v.values(), delta_total);
    require_finite(objective_new, "proposed objective", round);
    require_finite(bregman, "curvature of f", round);
    const double actual_decrease = model_decrease + curvature_model - bregman;
    const auto rho = rho_from_decreases(actual_decrease, model_decrease, std::abs(objective));

    RoundEvent event;
    event.round = round;
    event.sigma = sigma;
    event.objective_old = objective;
    event.objective_new = objective_new;
    event.model_value = model_value;
    event.model_decrease = model_decrease;
    event.actual_decrease = actual_decrease;
    event.curvature_model = curvature_model;
    event.curvature_actual = bregman;

    RoundDecision decision;
    double step = 1.0;
    switch (setup.mode) {
      case Mode::adn:
        decision = decide_round(setup.trust, sigma, rho, bregman, curvature_model);
        break;
      case Mode::cocoa:
        decision.rho = rho;
        decision.reason = classify_rho(rho, setup.trust);
        decision.accepted = true;
        decision.sigma_next = sigma;
        break;
      case Mode::line_search: {
        decision.reason = classify_rho(rho, setup.trust);
        decision.sigma_next = sigma;
        decision.rho = rho;
        auto sufficient = [&](double beta, double obj_trial) {
          return obj_trial <= objective - setup.ls.c1 * beta * model_decrease;
        };
        decision.accepted = rho.has_value() && sufficient(1.0, objective_new);
        for (std::size_t bt = 1; !decision.accepted && rho && bt <= setup.ls.max_backtracks; ++bt) {
          step *= setup.ls.backtrack;
          event.backtracks = bt;
          // One distributed objective evaluation: broadcast the step, gather g sums.
          const auto down = serialize(ScalarMessage{static_cast<std::uint32_t>(round), step});
          totals.bytes_down += num_parts * down.size();
          double g_trial = 0.0;
          for (std::size_t k = 0; k < num_parts; ++k) {
            const auto up = workers[k].trial(down);
            totals.bytes_up += up.size();
            g_trial += deserialize_scalar(up).value;
          }
          for (std::size_t j = 0; j < d; ++j) v_new[j] = v.values()[j] + step * delta_total[j];
          const double obj_trial = spec.loss.value(v_new) + g_trial;
          require_finite(obj_trial, "line-search objective", round);
          objective_new = obj_trial;
          decision.rho = (objective - obj_trial) / (step * model_decrease);
          decision.accepted = sufficient(step, obj_trial);
        }
        if (!decision.accepted) step = 0.0;
        break;
      }
    }

    // Stage 4: broadcast the verdict; workers commit or discard.
    MasterToWorker verdict;
    verdict.round = static_cast<std::uint32_t>(round);
    verdict.accepted = decision.accepted;
    verdict.sigma_next = decision.sigma_next;
    if (decision.accepted) {
      verdict.delta_total = delta_total;
      if (step != 1.0) {
        for (double& x : verdict.delta_total) x *= step;
      }
    }
    const auto down = serialize(verdict);
    totals.bytes_down += num_parts * down.size();

    std::vector<double> proposed;
    if (options.observer) {
      proposed.assign(n, 0.0);
      for (auto& w : workers) {
        for (std::size_t p = 0; p < w.members().size(); ++p) proposed[w.members()[p]] = w.pending()[p];
      }
      std::optional<double> eta;
      for (auto& w : workers) {
        if (auto e = w.certified_eta()) eta = std::max(eta.value_or(0.0), *e);
      }
      event.max_certified_eta = eta;
    }

    for_each_worker(num_parts, options.threading, [&](std::size_t k) { workers[k].apply(down, step); });

    if (decision.accepted) {
      v.apply_delta(verdict.delta_total);
      objective = objective_new;
      ++totals.accepted;
      gap = compute_gap();
      if (options.verify_shared) {
        const auto alpha = gather_alpha();
        const auto recomputed = a.multiply(alpha);
        double diff = 0.0;
        for (std::size_t j = 0; j < d; ++j) diff = std::max(diff, std::abs(recomputed[j] - v.values()[j]));
        if (diff > 1e-8 * (1.0 + norm2(v.values()))) {
          throw Error(ErrorCode::inconsistent_shared_vector,
                      "v drifted from A alpha by " + std::to_string(diff) + " in round " + std::to_string(round));
        }
      }
    } else {
      ++totals.rejected;
    }
    ++totals.rounds;

    MetricsRecord rec;
    rec.round = round;
    rec.objective = objective;
    rec.gap = gap;
    rec.sigma = sigma;
    rec.rho = decision.rho;
    rec.accepted = decision.accepted;
    rec.bytes_up = totals.bytes_up;
    rec.bytes_down = totals.bytes_down;
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    result.metrics.push_back(rec);

    if (options.observer) {
      const auto alpha = gather_alpha();
      event.decision = decision;
      event.step = step;
      event.delta = proposed;
      event.alpha = alpha;
      options.observer(event);
    }

    const double sigma_prev = sigma;
    sigma = decision.sigma_next;

    if (auto r = converged()) {
      result.reason = *r;
      break;
    }
    result.reason = StopReason::max_rounds;
    if (!rho) {
      result.reason = StopReason::stationary;
      break;
    }
    if (!decision.accepted &&
        (setup.mode == Mode::line_search || (sigma_prev >= setup.trust.sigma_max && sigma >= setup.trust.sigma_max))) {
      result.reason = StopReason::stalled;
      break;
    }
  }

  result.alpha = gather_alpha();
  result.shared.assign(v.values().begin(), v.values().end());
  result.objective = objective;
  result.gap = gap;
  return result;
}

}  // namespace

RunResult run_adn(const ProblemSpec& spec, const SparseColMatrix& a, const Partition& partition,
                  const TrustConfig& trust, const SolverBudget& budget, const StopCriteria& stop,
                  const EngineOptions& options) {
  EngineSetup setup;
  setup.mode = Mode::adn;
  setup.trust = trust;
  return run_engine(spec, a, partition, setup, budget, stop, options);
}

RunResult run_cocoa(const ProblemSpec& spec, const SparseColMatrix& a, const Partition& partition,
                    std::optional<double> sigma_fixed, const SolverBudget& budget, const StopCriteria& stop,
                    const EngineOptions& options) {
  EngineSetup setup;
  setup.mode = Mode::cocoa;
  setup.sigma_cocoa = sigma_fixed.value_or(static_cast<double>(partition.num_parts()));
  if (!(setup.sigma_cocoa > 0.0)) throw Error(ErrorCode::config_error, "CoCoA sigma must be positive");
  return run_engine(spec, a, partition, setup, budget, stop, options);
}

RunResult run_line_search(const ProblemSpec& spec, const SparseColMatrix& a, const Partition& partition,
                          const SolverBudget& budget, const StopCriteria& stop, const LineSearchConfig& ls,
                          const EngineOptions& options) {
  if (!(ls.c1 > 0.0 && ls.c1 < 1.0) || !(ls.backtrack > 0.0 && ls.backtrack < 1.0)) {
    throw Error(ErrorCode::config_error, "line search needs 0 < c1 < 1 and 0 < backtrack < 1");
  }
  EngineSetup setup;
  setup.mode = Mode::line_search;
  setup.ls = ls;
  return run_engine(spec, a, partition, setup, budget, stop, options);
}

}  // namespace adn
