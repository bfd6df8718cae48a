#include "gluepour/pouring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gluepour {

namespace {

// (1 + x) ln(1 + x) - x, with a series near zero where the direct form
// cancels catastrophically.
double on_power_lhs(double x) {
  if (x < 1e-2) {
    double term = x * x;
    double sum = 0.0;
    for (int k = 2; k < 14; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      sum += sign * term / (k * (k - 1.0));
      term *= x;
    }
    return sum;
  }
  return (1.0 + x) * std::log1p(x) - x;
}

}  // namespace

double on_power(double gain, double processing_cost) {
  if (!std::isfinite(gain) || !std::isfinite(processing_cost))
    throw InvalidInput("on_power: non-finite input");
  if (gain <= 0.0) throw InvalidInput("on_power: gain must be > 0");
  if (processing_cost < 0.0)
    throw InvalidInput("on_power: processing cost must be >= 0");
  if (processing_cost == 0.0) return 0.0;

  const double target = gain * processing_cost;
  double lo = 0.0;
  double hi = 1.0;
  while (on_power_lhs(hi) < target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (on_power_lhs(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi) / gain;
}

EpochPolicy single_arrival_policy(double energy, double gain,
                                  double processing_cost, double deadline) {
  if (!(energy >= 0.0)) throw InvalidInput("energy must be >= 0");
  if (!(deadline > 0.0)) throw InvalidInput("deadline must be > 0");
  const double v = on_power(gain, processing_cost);
  if (energy == 0.0) return {};

  const double per_time = v + processing_cost;
  if (per_time > 0.0 && deadline * per_time >= energy)
    return {energy / per_time, v};
  return {deadline, energy / deadline - processing_cost};
}

LevelAllocator::LevelAllocator(std::vector<double> durations,
                               std::vector<double> gains,
                               double processing_cost)
    : durations_(std::move(durations)),
      gains_(std::move(gains)),
      processing_cost_(processing_cost) {
  if (durations_.size() != gains_.size())
    throw InvalidInput("LevelAllocator: durations and gains differ in length");
  if (durations_.empty()) throw InvalidInput("LevelAllocator: no epochs");
  on_powers_.reserve(gains_.size());
  for (std::size_t i = 0; i < gains_.size(); ++i) {
    if (!(durations_[i] > 0.0) || !std::isfinite(durations_[i]))
      throw InvalidInput("LevelAllocator: durations must be finite and > 0");
    on_powers_.push_back(gluepour::on_power(gains_[i], processing_cost_));
  }
  base_.assign(size(), 0.0);
  walls_.assign(size(), std::numeric_limits<double>::infinity());
}

LevelAllocator LevelAllocator::for_scenario(const Scenario& s) {
  std::vector<double> durations;
  std::vector<double> gains;
  for (const auto& e : s.epochs) {
    durations.push_back(e.duration);
    gains.push_back(e.gain);
  }
  return LevelAllocator(std::move(durations), std::move(gains),
                        s.processing_cost);
}

void LevelAllocator::set_base(std::size_t i, double energy) {
  if (!(energy >= 0.0)) throw InvalidInput("base energy must be >= 0");
  base_.at(i) = energy;
}

void LevelAllocator::set_wall(std::size_t j, double capacity) {
  if (j == 0 || j >= size()) throw std::out_of_range("wall index");
  walls_[j] = capacity;
}

void LevelAllocator::clear_walls() {
  std::fill(walls_.begin(), walls_.end(),
            std::numeric_limits<double>::infinity());
}

EnergyInterval LevelAllocator::consumption(std::size_t i, double level) const {
  const double lambda = threshold(i);
  if (level < lambda - kLevelTol) return {0.0, 0.0};
  if (level <= lambda + kLevelTol) return {0.0, partial_capacity(i)};
  const double full =
      durations_[i] * (level - 1.0 / gains_[i] + processing_cost_);
  return {full, full};
}

double LevelAllocator::level_of(std::size_t i, double energy) const {
  if (energy < partial_capacity(i)) return threshold(i);
  return energy / durations_[i] - processing_cost_ + 1.0 / gains_[i];
}

EpochPolicy LevelAllocator::shape(std::size_t i, double energy) const {
  if (energy <= 0.0) return {};
  if (energy < partial_capacity(i))
    return {energy / (on_powers_[i] + processing_cost_), on_powers_[i]};
  return {durations_[i],
          std::max(0.0, energy / durations_[i] - processing_cost_)};
}

EnergyInterval level_energy_map(const LevelAllocator& alloc, double level) {
  if (!(level >= 0.0)) throw InvalidInput("level must be >= 0");
  EnergyInterval total;
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    const auto c = alloc.consumption(i, level);
    total.min += std::max(alloc.base(i), c.min);
    total.max += std::max(alloc.base(i), c.max);
  }
  return total;
}

Allocation glue_pour(const LevelAllocator& alloc, double energy,
                     std::size_t entry) {
  const std::size_t n = alloc.size();
  if (entry >= n) throw InvalidInput("glue_pour: entry epoch out of range");
  if (!(energy >= 0.0) || !std::isfinite(energy))
    throw InvalidInput("glue_pour: energy must be finite and >= 0");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> c = alloc.base();
  std::vector<double> slack(n, inf);
  std::size_t reach = n;
  for (std::size_t j = entry + 1; j < n; ++j) {
    slack[j] = alloc.wall(j);
    if (slack[j] <= 0.0 && reach == n) reach = j;
  }

  auto full_regime = [&](std::size_t i) {
    return c[i] >= alloc.partial_capacity(i);
  };
  auto level_of = [&](std::size_t i) { return alloc.level_of(i, c[i]); };

  // Energy consumed in epoch i has crossed every wall between entry and i.
  auto drain_walls = [&](std::size_t i, double amount) {
    for (std::size_t j = entry + 1; j <= i; ++j) slack[j] -= amount;
  };

  double level = 0.0;
  double remaining = energy;
  const std::size_t max_steps = 16 * (n + 1) * (n + 1);
  std::size_t steps = 0;

  while (remaining > 0.0) {
    if (++steps > max_steps)
      throw std::logic_error("glue_pour: event loop did not terminate");

    // Epochs sitting at their threshold absorb energy at constant level,
    // earliest first.
    for (std::size_t i = entry; i < reach && remaining > 0.0; ++i) {
      if (full_regime(i) || alloc.threshold(i) > level + kLevelTol) continue;
      const double need = alloc.partial_capacity(i) - c[i];
      double room = inf;
      std::size_t binding = n;
      for (std::size_t j = entry + 1; j <= i; ++j) {
        if (slack[j] < room) {
          room = slack[j];
          binding = j;
        }
      }
      const double amount = std::min({need, remaining, std::max(room, 0.0)});
      c[i] = (amount == need) ? alloc.partial_capacity(i) : c[i] + amount;
      remaining -= amount;
      drain_walls(i, amount);
      if (binding < n && room <= amount) {
        slack[binding] = 0.0;
        reach = binding;
      }
    }
    if (remaining <= 0.0) break;

    // Raise the level across the fully-on epochs until the next event.
    double slope = 0.0;
    double next_level = inf;
    std::vector<std::size_t> rising;
    for (std::size_t i = entry; i < reach; ++i) {
      const double li = level_of(i);
      if (li <= level + kLevelTol && full_regime(i)) {
        slope += alloc.duration(i);
        rising.push_back(i);
      } else if (li > level + kLevelTol) {
        next_level = std::min(next_level, li);
      }
    }
    if (slope == 0.0) {
      if (next_level == inf)
        throw std::logic_error("glue_pour: no epoch can absorb energy");
      level = next_level;
      continue;
    }

    enum class Event { Energy, Level, Wall } event = Event::Energy;
    double step = remaining / slope;
    if (next_level - level < step) {
      step = next_level - level;
      event = Event::Level;
    }
    std::vector<bool> is_rising(n, false);
    for (std::size_t i : rising) is_rising[i] = true;
    std::size_t binding = n;
    double rate = 0.0;
    for (std::size_t j = reach - 1; j > entry; --j) {
      if (is_rising[j]) rate += alloc.duration(j);
      if (rate > 0.0 && std::max(slack[j], 0.0) / rate <= step) {
        step = std::max(slack[j], 0.0) / rate;
        event = Event::Wall;
        binding = j;
      }
    }

    const double new_level = (event == Event::Level) ? next_level : level + step;
    double used = 0.0;
    for (std::size_t i : rising) {
      const double updated =
          alloc.duration(i) *
          (new_level - 1.0 / alloc.gain(i) + alloc.processing_cost());
      const double delta = std::max(0.0, updated - c[i]);
      c[i] += delta;
      used += delta;
      drain_walls(i, delta);
    }
    level = new_level;

    remaining -= used;
    if (event == Event::Energy) break;
    if (event == Event::Wall) {
      slack[binding] = 0.0;
      reach = binding;
    }
  }

  Allocation out;
  out.consumed = c;
  out.epochs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.epochs.push_back(alloc.shape(i, c[i]));
  out.level = level;
  out.leftover = remaining;
  return out;
}

}  // namespace gluepour
