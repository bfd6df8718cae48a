#include "gluepour/dbgp.hpp"

#include <algorithm>
#include <limits>

#include "gluepour/pouring.hpp"

namespace gluepour {

PourPlan build_pour_plan(const Scenario& s) {
  s.validate();
  PourPlan plan;
  const std::size_t n = s.size();
  for (std::size_t k = n; k-- > 0;) {
    const auto& e = s.epochs[k];
    if (e.arrival > 0.0) plan.steps.push_back({k, e.start, e.arrival, k});
  }
  // Walls at zero-energy arrivals are implied by the wall before them.
  for (std::size_t j = 1; j < n; ++j) {
    const double arrival = s.epochs[j].arrival;
    if (arrival > 0.0) plan.walls.push_back({j, s.battery_capacity - arrival});
  }
  return plan;
}

DbgpResult solve_dbgp(const Scenario& s) {
  const PourPlan plan = build_pour_plan(s);
  const std::size_t n = s.size();

  LevelAllocator alloc = LevelAllocator::for_scenario(s);
  std::vector<double> capacity(n, std::numeric_limits<double>::infinity());
  for (const auto& w : plan.walls) capacity[w.epoch] = w.capacity;

  std::vector<double> consumed(n, 0.0);
  // carried[j]: energy from already-poured packets crossing into epoch j.
  std::vector<double> carried(n, 0.0);

  for (const auto& step : plan.steps) {
    alloc.clear_walls();
    for (std::size_t j = step.first_admissible + 1; j < n; ++j)
      alloc.set_wall(j, std::max(0.0, capacity[j] - carried[j]));
    for (std::size_t i = 0; i < n; ++i) alloc.set_base(i, consumed[i]);

    const Allocation poured = glue_pour(alloc, step.energy, step.first_admissible);

    // Flow through each boundary grows by whatever the packet feeds beyond it.
    double downstream = 0.0;
    for (std::size_t i = n; i-- > step.first_admissible + 1;) {
      downstream += poured.consumed[i] - consumed[i];
      carried[i] += downstream;
    }
    consumed = poured.consumed;
  }

  DbgpResult result;
  result.policy = TransmissionPolicy(n);
  for (std::size_t i = 0; i < n; ++i)
    result.policy[i] = alloc.shape(i, consumed[i]);
  result.throughput = evaluate_throughput(s, result.policy);
  result.report = verify_optimality(s, result.policy, kCertifyTol);
  result.certified = result.report.certified;
  return result;
}

}  // namespace gluepour
