#include "heliqsim/optimizer.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <random>

#include "heliqsim/effective.hpp"
#include "heliqsim/error.hpp"
#include "heliqsim/parallel.hpp"

namespace heliqsim {

namespace {

double sq(double x) { return x * x; }

CostFunction make_cost(const Pipeline& pipeline,
                       std::function<double(const SpectralObservables&)> f) {
  return [&pipeline, f = std::move(f)](std::span<const double> v) {
    try {
      return f(pipeline.evaluate(v)->observables);
    } catch (const NotDoubleWell&) {
      return std::numeric_limits<double>::quiet_NaN();
    } catch (const SolverError&) {
      return std::numeric_limits<double>::quiet_NaN();
    } catch (const RangeError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

SweepRecord evaluate_point(const Pipeline& pipeline, std::span<const double> v_i,
                           std::span<const double> v_iii, double lambda,
                           Eigen::MatrixXd* vectors) {
  SweepRecord rec;
  rec.lambda = lambda;
  rec.voltages_mv = parametrize(v_i, v_iii, lambda);
  try {
    auto r = pipeline.evaluate(rec.voltages_mv);
    rec.observables = r->observables;
    if (vectors) *vectors = r->spectrum.vectors;
    rec.ok = true;
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

double cost_config_I(const SpectralObservables& o, const ConfigITargets& t) {
  return sq(o.omega_left - t.omega_left) + sq(o.omega_right - t.omega_right) +
         sq(o.beta_left - t.beta_left) + sq(o.beta_right - t.beta_right);
}

double cost_config_III(const SpectralObservables& o, const ConfigIIITargets& t) {
  if (o.entropies.size() < 6) throw InvalidArgument("cost_config_III: need 6 entropies");
  const auto& s = o.entropies;
  return sq(s[1]) + sq(s[2]) + sq(s[3] - t.s3) + sq(s[4] - t.s4) + sq(s[5] - t.s5) +
         sq(o.beta_left - t.beta_left) + sq(o.beta_right - t.beta_right) +
         sq(o.detuning - t.detuning);
}

CostFunction make_cost_I(const Pipeline& pipeline, const ConfigITargets& t) {
  return make_cost(pipeline, [t](const SpectralObservables& o) { return cost_config_I(o, t); });
}

CostFunction make_cost_III(const Pipeline& pipeline, const ConfigIIITargets& t) {
  return make_cost(pipeline,
                   [t](const SpectralObservables& o) { return cost_config_III(o, t); });
}

FdGradient fd_gradient(const CostFunction& cost, std::span<const double> v, double h, double f0,
                       int jobs) {
  if (!(h > 0.0)) throw InvalidArgument("fd_gradient: step must be positive");
  const std::size_t n = v.size();
  std::vector<double> values(2 * n);
  parallel_for(2 * n, jobs, [&](std::size_t k) {
    std::vector<double> p(v.begin(), v.end());
    p[k / 2] += (k % 2 == 0) ? h : -h;
    values[k] = cost(p);
  });
  FdGradient out{Eigen::VectorXd(static_cast<Eigen::Index>(n)), 0, true};
  for (std::size_t i = 0; i < n; ++i) {
    const double fp = values[2 * i];
    const double fm = values[2 * i + 1];
    double g = 0.0;
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp) && std::isfinite(f0)) {
      g = (fp - f0) / h;
      ++out.one_sided;
    } else if (std::isfinite(fm) && std::isfinite(f0)) {
      g = (f0 - fm) / h;
      ++out.one_sided;
    } else {
      out.ok = false;
    }
    out.gradient(static_cast<Eigen::Index>(i)) = g;
  }
  return out;
}

AdamResult adam_minimize(const CostFunction& cost, std::span<const double> v0,
                         const OptimizerConfig& cfg,
                         const std::function<void(const AdamRecord&)>& on_iter) {
  if (!(cfg.learning_rate_mv > 0.0) || !(cfg.fd_step_mv > 0.0)) {
    throw InvalidArgument("adam_minimize: learning rate and fd step must be positive");
  }
  const auto n = static_cast<Eigen::Index>(v0.size());
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(v0.data(), n);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  auto as_vector = [](const Eigen::VectorXd& x) {
    return std::vector<double>(x.data(), x.data() + x.size());
  };

  AdamResult res;
  double f = cost(as_vector(v));
  if (!std::isfinite(f)) {
    res.failed = true;
    res.message = "cost is not finite at the starting point";
    res.best = as_vector(v);
    return res;
  }
  res.best = as_vector(v);
  res.best_cost = f;
  double lr = cfg.learning_rate_mv;
  int since_best = 0;
  double b1t = 1.0;
  double b2t = 1.0;

  for (int it = 0;; ++it) {
    AdamRecord rec{it, f, lr, as_vector(v)};
    res.history.push_back(rec);
    if (on_iter) on_iter(rec);
    res.iterations = it;
    if (f < cfg.cost_tol) {
      res.reached_tol = true;
      break;
    }
    if (it >= cfg.max_iters) break;

    const FdGradient g = fd_gradient(cost, as_vector(v), cfg.fd_step_mv, f, cfg.jobs);
    if (!g.ok) {
      res.failed = true;
      res.message = "gradient stencil left the double-well region";
      break;
    }
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g.gradient;
    s = cfg.adam_beta2 * s + (1.0 - cfg.adam_beta2) * g.gradient.cwiseAbs2();
    b1t *= cfg.adam_beta1;
    b2t *= cfg.adam_beta2;
    const Eigen::VectorXd m_hat = m / (1.0 - b1t);
    const Eigen::VectorXd s_hat = s / (1.0 - b2t);
    const Eigen::VectorXd dir = m_hat.cwiseQuotient((s_hat.cwiseSqrt().array() + cfg.adam_eps).matrix());

    double step = g.one_sided > 0 ? 0.1 * lr : lr;
    double f_next = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd v_next;
    for (int attempt = 0; attempt < 3 && !std::isfinite(f_next); ++attempt, step *= 0.1) {
      v_next = v - step * dir;
      f_next = cost(as_vector(v_next));
    }
    if (!std::isfinite(f_next)) {
      res.failed = true;
      res.message = "every reduced step landed outside the double-well region";
      break;
    }
    v = std::move(v_next);
    f = f_next;
    if (f < res.best_cost) {
      res.best_cost = f;
      res.best = as_vector(v);
      since_best = 0;
    } else if (cfg.plateau_patience > 0 && ++since_best >= cfg.plateau_patience) {
      lr = std::max(cfg.min_learning_rate_mv, lr * cfg.lr_decay);
      since_best = 0;
    }
  }
  if (res.message.empty()) {
    res.message = res.reached_tol ? "cost tolerance reached" : "iteration limit reached";
  }
  return res;
}

AdamResult multi_start(const CostFunction& cost, std::span<const double> v0,
                       const OptimizerConfig& cfg, int restarts, double radius_mv,
                       std::uint64_t rng_seed,
                       const std::function<void(const AdamRecord&)>& on_iter) {
  AdamResult best = adam_minimize(cost, v0, cfg, on_iter);
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> offset(-radius_mv, radius_mv);
  for (int r = 0; r < restarts && !best.reached_tol; ++r) {
    std::vector<double> seed(v0.begin(), v0.end());
    for (double& x : seed) x += offset(rng);
    AdamResult run = adam_minimize(cost, seed, cfg, on_iter);
    auto history = std::move(best.history);
    history.insert(history.end(), run.history.begin(), run.history.end());
    if (run.best_cost < best.best_cost) best = std::move(run);
    best.history = std::move(history);
  }
  return best;
}

std::vector<double> parametrize(std::span<const double> v_i, std::span<const double> v_iii,
                                double lambda) {
  if (v_i.size() != v_iii.size()) throw InvalidArgument("parametrize: size mismatch");
  std::vector<double> out(v_i.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (1.0 - lambda) * v_i[k] + lambda * v_iii[k];
  }
  return out;
}

std::vector<double> lambda_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw InvalidArgument("lambda_grid: need at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return out;
}

std::vector<SweepRecord> sweep(const Pipeline& pipeline, std::span<const double> v_i,
                               std::span<const double> v_iii, std::span<const double> lambdas,
                               int jobs, Eigen::Index tracked_states, int max_refinements) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end())) {
    throw InvalidArgument("sweep: lambda grid must be sorted");
  }
  std::vector<SweepRecord> records(lambdas.size());
  std::vector<Eigen::MatrixXd> vectors(lambdas.size());
  parallel_for(lambdas.size(), jobs, [&](std::size_t k) {
    records[k] = evaluate_point(pipeline, v_i, v_iii, lambdas[k], &vectors[k]);
  });

  std::vector<SweepRecord> out;
  std::vector<Eigen::MatrixXd> out_vectors;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (k > 0 && records[k].ok && !out.empty() && out.back().ok) {
      // Insert midpoints until each step keeps the states recognisable.
      for (int depth = 0; depth < max_refinements; ++depth) {
        double overlap = 1.0;
        track_states(out_vectors.back(), vectors[k], tracked_states, &overlap);
        if (overlap >= 0.5) break;
        const double mid = 0.5 * (out.back().lambda + records[k].lambda);
        Eigen::MatrixXd mv;
        SweepRecord r = evaluate_point(pipeline, v_i, v_iii, mid, &mv);
        if (!r.ok) break;
        r.tracked = track_states(out_vectors.back(), mv, tracked_states, &r.min_overlap);
        out.push_back(std::move(r));
        out_vectors.push_back(std::move(mv));
      }
      records[k].tracked =
          track_states(out_vectors.back(), vectors[k], tracked_states, &records[k].min_overlap);
    }
    out.push_back(std::move(records[k]));
    out_vectors.push_back(std::move(vectors[k]));
  }
  return out;
}

void annotate_effective_zeta(std::vector<SweepRecord>& records, double g_ghz) {
  for (auto& r : records) {
    if (!r.ok) continue;
    const auto& o = r.observables;
    r.zeta_eff = effective_zeta(g_ghz, o.detuning, o.beta_left, o.beta_right).zeta;
  }
}

std::vector<double> first_gap(const std::vector<SweepRecord>& records,
                              std::vector<double>* lambdas) {
  std::vector<double> gaps;
  if (lambdas) lambdas->clear();
  for (const auto& r : records) {
    if (!r.ok) continue;
    gaps.push_back(r.observables.energies[2] - r.observables.energies[1]);
    if (lambdas) lambdas->push_back(r.lambda);
  }
  return gaps;
}

GapMinimum refine_gap_minimum(const Pipeline& pipeline, std::span<const double> v_i,
                              std::span<const double> v_iii, double lo, double hi,
                              double tol) {
  if (!(hi > lo)) throw InvalidArgument("refine_gap_minimum: empty bracket");
  auto gap = [&](double lambda) {
    SweepRecord r = evaluate_point(pipeline, v_i, v_iii, lambda, nullptr);
    if (!r.ok) throw NotDoubleWell("refine_gap_minimum: " + r.error);
    return r.observables.energies[2] - r.observables.energies[1];
  };
  // Brent's bit count sets a relative tolerance; beyond half the mantissa
  // it buys nothing.
  const int bits = std::clamp(static_cast<int>(std::ceil(1.0 - std::log2(tol))), 8, 26);
  std::uintmax_t max_iter = 100;
  const auto [lambda, value] =
      boost::math::tools::brent_find_minima(gap, lo, hi, bits, max_iter);
  GapMinimum out;
  out.lambda = lambda;
  out.g = 0.5 * value;
  out.record = evaluate_point(pipeline, v_i, v_iii, lambda, nullptr);
  return out;
}

}  // namespace heliqsim
