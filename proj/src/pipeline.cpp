#include "heliqsim/pipeline.hpp"

#include <cmath>

#include "heliqsim/error.hpp"
#include "heliqsim/hash.hpp"

namespace heliqsim {

namespace {

constexpr std::size_t kCacheLimit = 2000;

}  // namespace

PipelineResult pipeline_evaluate(const CouplingTable& table, std::span<const double> voltages_mv,
                                 const PipelineSettings& settings) {
  PipelineResult r;
  r.voltages_mv.assign(voltages_mv.begin(), voltages_mv.end());
  r.profile = assemble_potential(table, voltages_mv, settings.units);
  r.barrier = find_barrier(r.profile);
  std::tie(r.left, r.right) = auto_grids(r.profile, r.barrier, settings.points_per_well);
  const OneBodyOperator hl = one_body_hamiltonian(r.left, r.profile);
  const OneBodyOperator hr = one_body_hamiltonian(r.right, r.profile);
  const InteractionDiagonal u =
      coulomb_diagonal(r.left, r.right, settings.kappa(), settings.epsilon);
  r.basis = scf_solve(hl, hr, u, settings.scf);
  if (!r.basis.converged) {
    throw SolverError("Hartree iteration did not converge in " +
                      std::to_string(r.basis.iterations) + " iterations");
  }
  r.hartree_energy = hartree_energy(r.basis, u);
  r.spectrum = solve_ci(hl, hr, u, r.basis);
  r.observables = spectral_observables(r.spectrum, r.basis, settings.units);
  r.basis.fock_left.resize(0, 0);
  r.basis.fock_right.resize(0, 0);
  return r;
}

Pipeline::Pipeline(std::shared_ptr<const CouplingTable> table, PipelineSettings settings)
    : table_(std::move(table)), settings_(settings) {
  if (!table_) throw InvalidArgument("Pipeline: missing coupling table");
}

std::shared_ptr<const PipelineResult> Pipeline::evaluate(
    std::span<const double> voltages_mv) const {
  for (double v : voltages_mv) {
    if (!std::isfinite(v) || std::abs(v) > 1000.0) {
      throw InvalidArgument("electrode voltages must be finite and within 1000 mV");
    }
  }
  const std::uint64_t key = Fnv1a().add(voltages_mv).value();
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto result = std::make_shared<const PipelineResult>(
      pipeline_evaluate(*table_, voltages_mv, settings_));
  std::lock_guard lock(mutex_);
  ++evaluations_;
  if (cache_.size() >= kCacheLimit) cache_.clear();
  cache_.emplace(key, result);
  return result;
}

std::size_t Pipeline::evaluations() const {
  std::lock_guard lock(mutex_);
  return evaluations_;
}

std::size_t Pipeline::cache_hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

}  // namespace heliqsim
