#include "promind/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "promind/log.hpp"

namespace promind {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 5-node Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode[5] = {-0.906179845938664, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.906179845938664};
constexpr double kGlWeight[5] = {0.23692688505618908, 0.47862867049936647,
                                 0.5688888888888889, 0.47862867049936647,
                                 0.23692688505618908};

// Uniform double in [0, 1) built from the top 53 bits; identical across
// standard library implementations, unlike std::uniform_real_distribution.
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int pick_index(std::mt19937_64& rng, int count) {
  return std::min(count - 1, static_cast<int>(u01(rng) * count));
}

struct Individual {
  std::vector<double> genes;
  double f_time = kInf;
  double f_jerk = kInf;
  double violation = kInf;  // 0 when feasible
  int rank = 0;
  double crowding = 0.0;
};

void evaluate(Individual& ind, const WaypointList& wps, const BoundaryConditions& bc,
              const KinematicLimits& limits) {
  try {
    const IntervalVector h(ind.genes);
    const BSplineBundle traj = solve_trajectory(wps, h, bc);
    const LimitCheck check = check_limits(traj, limits);
    ind.f_time = time_objective(h);
    ind.f_jerk = jerk_objective(traj);
    ind.violation = std::max(0.0, check.worst_violation);
  } catch (const SolverError&) {
    ind.f_time = kInf;
    ind.f_jerk = kInf;
    ind.violation = kInf;
  }
}

// Feasible beats infeasible; infeasible compare by violation; feasible
// compare by Pareto domination.
bool constrained_dominates(const Individual& a, const Individual& b) {
  const bool fa = a.violation == 0.0;
  const bool fb = b.violation == 0.0;
  if (fa != fb) return fa;
  if (!fa) return a.violation < b.violation;
  const bool no_worse = a.f_time <= b.f_time && a.f_jerk <= b.f_jerk;
  const bool better = a.f_time < b.f_time || a.f_jerk < b.f_jerk;
  return no_worse && better;
}

std::vector<std::vector<int>> sort_fronts(std::vector<Individual>& pop) {
  const int n = static_cast<int>(pop.size());
  std::vector<std::vector<int>> dominated(static_cast<size_t>(n));
  std::vector<int> domination_count(static_cast<size_t>(n), 0);
  std::vector<std::vector<int>> fronts(1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (constrained_dominates(pop[static_cast<size_t>(i)], pop[static_cast<size_t>(j)]))
        dominated[static_cast<size_t>(i)].push_back(j);
      else if (constrained_dominates(pop[static_cast<size_t>(j)], pop[static_cast<size_t>(i)]))
        ++domination_count[static_cast<size_t>(i)];
    }
    if (domination_count[static_cast<size_t>(i)] == 0) {
      pop[static_cast<size_t>(i)].rank = 0;
      fronts[0].push_back(i);
    }
  }
  int current = 0;
  while (!fronts[static_cast<size_t>(current)].empty()) {
    std::vector<int> next;
    for (int i : fronts[static_cast<size_t>(current)]) {
      for (int j : dominated[static_cast<size_t>(i)]) {
        if (--domination_count[static_cast<size_t>(j)] == 0) {
          pop[static_cast<size_t>(j)].rank = current + 1;
          next.push_back(j);
        }
      }
    }
    ++current;
    fronts.push_back(std::move(next));
  }
  if (fronts.back().empty()) fronts.pop_back();
  return fronts;
}

void assign_crowding(std::vector<Individual>& pop, const std::vector<int>& front) {
  for (int i : front) pop[static_cast<size_t>(i)].crowding = 0.0;
  const int m = static_cast<int>(front.size());
  if (m <= 2) {
    for (int i : front) pop[static_cast<size_t>(i)].crowding = kInf;
    return;
  }
  for (int obj = 0; obj < 2; ++obj) {
    auto key = [&](int i) {
      const Individual& ind = pop[static_cast<size_t>(i)];
      return obj == 0 ? ind.f_time : ind.f_jerk;
    };
    std::vector<int> order = front;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
    pop[static_cast<size_t>(order.front())].crowding = kInf;
    pop[static_cast<size_t>(order.back())].crowding = kInf;
    const double span = key(order.back()) - key(order.front());
    if (!(span > 0.0) || !std::isfinite(span)) continue;
    for (int idx = 1; idx + 1 < m; ++idx) {
      const double gap = key(order[static_cast<size_t>(idx + 1)]) -
                         key(order[static_cast<size_t>(idx - 1)]);
      pop[static_cast<size_t>(order[static_cast<size_t>(idx)])].crowding += gap / span;
    }
  }
}

// Lower (rank, -crowding) wins; index breaks ties deterministically.
int tournament(const std::vector<Individual>& pop, std::mt19937_64& rng) {
  const int a = pick_index(rng, static_cast<int>(pop.size()));
  const int b = pick_index(rng, static_cast<int>(pop.size()));
  const Individual& ia = pop[static_cast<size_t>(a)];
  const Individual& ib = pop[static_cast<size_t>(b)];
  if (ia.rank != ib.rank) return ia.rank < ib.rank ? a : b;
  if (ia.crowding != ib.crowding) return ia.crowding > ib.crowding ? a : b;
  return std::min(a, b);
}

double sbx_child(double y1, double y2, double lo, double hi, double eta, double rand,
                 bool lower) {
  const double spread = y2 - y1;
  const double edge = lower ? (y1 - lo) : (hi - y2);
  const double beta = 1.0 + 2.0 * edge / spread;
  const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
  double betaq;
  if (rand <= 1.0 / alpha)
    betaq = std::pow(rand * alpha, 1.0 / (eta + 1.0));
  else
    betaq = std::pow(1.0 / (2.0 - rand * alpha), 1.0 / (eta + 1.0));
  const double mid = 0.5 * (y1 + y2);
  const double value = lower ? (mid - 0.5 * betaq * spread) : (mid + 0.5 * betaq * spread);
  return std::clamp(value, lo, hi);
}

void crossover(const Individual& p1, const Individual& p2, Individual& c1, Individual& c2,
               const std::vector<double>& lo, double hi, const OptimizerConfig& cfg,
               std::mt19937_64& rng) {
  c1.genes = p1.genes;
  c2.genes = p2.genes;
  if (u01(rng) > cfg.crossover_probability) return;
  for (size_t i = 0; i < c1.genes.size(); ++i) {
    if (u01(rng) > 0.5) continue;
    double y1 = p1.genes[i];
    double y2 = p2.genes[i];
    if (std::abs(y2 - y1) < 1e-14) continue;
    if (y1 > y2) std::swap(y1, y2);
    const double rand = u01(rng);
    double low = sbx_child(y1, y2, lo[i], hi, cfg.crossover_eta, rand, true);
    double high = sbx_child(y1, y2, lo[i], hi, cfg.crossover_eta, rand, false);
    if (u01(rng) <= 0.5) std::swap(low, high);
    c1.genes[i] = low;
    c2.genes[i] = high;
  }
}

void mutate(Individual& ind, const std::vector<double>& lo, double hi,
            const OptimizerConfig& cfg, std::mt19937_64& rng) {
  const double pm = cfg.mutation_probability > 0.0
                        ? cfg.mutation_probability
                        : 1.0 / static_cast<double>(ind.genes.size());
  for (size_t i = 0; i < ind.genes.size(); ++i) {
    if (u01(rng) > pm) continue;
    const double span = hi - lo[i];
    if (span <= 0.0) continue;
    const double y = ind.genes[i];
    const double r = u01(rng);
    const double exponent = 1.0 / (cfg.mutation_eta + 1.0);
    double deltaq;
    if (r < 0.5) {
      const double d = (y - lo[i]) / span;
      deltaq = std::pow(2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d, cfg.mutation_eta + 1.0),
                        exponent) -
               1.0;
    } else {
      const double d = (hi - y) / span;
      deltaq = 1.0 - std::pow(2.0 * (1.0 - r) +
                                  2.0 * (r - 0.5) * std::pow(1.0 - d, cfg.mutation_eta + 1.0),
                              exponent);
    }
    ind.genes[i] = std::clamp(y + deltaq * span, lo[i], hi);
  }
}

}  // namespace

void KinematicLimits::validate() const {
  if ((velocity.array() <= 0.0).any() || (acceleration.array() <= 0.0).any() ||
      (jerk.array() <= 0.0).any() || !velocity.allFinite() || !acceleration.allFinite() ||
      !jerk.allFinite())
    throw std::invalid_argument("kinematic limits: all bounds must be strictly positive");
}

void OptimizerConfig::validate() const {
  if (population < 4 || population % 2 != 0)
    throw std::invalid_argument("optimizer: population must be even and at least 4");
  if (generations < 1) throw std::invalid_argument("optimizer: generations must be positive");
  if (!(h_max > 0.0) || !(min_interval > 0.0) || min_interval >= h_max)
    throw std::invalid_argument("optimizer: need 0 < min_interval < h_max");
  if (crossover_probability < 0.0 || crossover_probability > 1.0)
    throw std::invalid_argument("optimizer: crossover probability outside [0, 1]");
  if (crossover_eta <= 0.0 || mutation_eta <= 0.0)
    throw std::invalid_argument("optimizer: distribution indices must be positive");
}

double time_objective(const IntervalVector& h) {
  return static_cast<double>(kPoseDims) * h.total();
}

double jerk_objective(const BSplineBundle& traj) {
  const KnotVector& knots = traj.knots();
  const int degree = knots.degree();
  double acc = 0.0;
  for (int l = degree; l + degree + 1 < knots.size(); ++l) {
    const double a = knots[l];
    const double b = knots[l + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < 5; ++i) {
      const double t = mid + half * kGlNode[i];
      acc += kGlWeight[i] * half * traj.eval(t, 3).squaredNorm();
    }
  }
  return acc;
}

std::vector<double> interval_lower_bounds(const WaypointList& wps,
                                          const KinematicLimits& limits,
                                          double min_interval) {
  limits.validate();
  if (!(min_interval > 0.0))
    throw std::invalid_argument("lower bounds: min_interval must be positive");
  const int legs = wps.count() + 1;
  std::vector<double> lb(static_cast<size_t>(legs), min_interval);
  // Legs 1..W-1 carry the waypoint-to-waypoint displacements; the two virtual
  // legs at the ends carry none and keep the floor.
  for (int g = 1; g + 1 < legs; ++g) {
    const Vec6 delta = wps[g] - wps[g - 1];
    double bound = 0.0;
    for (int d = 0; d < kPoseDims; ++d)
      bound = std::max(bound, std::abs(delta[d]) / limits.velocity[d]);
    lb[static_cast<size_t>(g)] = std::max(min_interval, bound);
  }
  return lb;
}

LimitCheck check_limits(const BSplineBundle& traj, const KinematicLimits& limits) {
  limits.validate();
  LimitCheck report{true, -kInf, 0, 0};
  for (int order = 1; order <= 3; ++order) {
    const Vec6& bound = order == 1   ? limits.velocity
                        : order == 2 ? limits.acceleration
                                     : limits.jerk;
    const BSplineBundle::ControlMatrix& pts = traj.derivative_points(order);
    for (int k = 0; k < pts.cols(); ++k) {
      for (int d = 0; d < kPoseDims; ++d) {
        const double ratio = std::abs(pts(d, k)) / bound[d] - 1.0;
        if (ratio > report.worst_violation) {
          report.worst_violation = ratio;
          report.worst_order = order;
          report.worst_dimension = d;
        }
      }
    }
  }
  report.feasible = report.worst_violation <= 0.0;
  return report;
}

std::vector<ParetoEntry> optimize_front(const WaypointList& wps, const BoundaryConditions& bc,
                                        const KinematicLimits& limits,
                                        const OptimizerConfig& cfg) {
  cfg.validate();
  limits.validate();
  const int genes = wps.count() + 1;
  const std::vector<double> lb = interval_lower_bounds(wps, limits, cfg.min_interval);
  for (double b : lb) {
    if (b >= cfg.h_max)
      throw std::invalid_argument("optimizer: an interval lower bound exceeds h_max");
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<Individual> pop(static_cast<size_t>(cfg.population));
  for (int i = 0; i < cfg.population; ++i) {
    Individual& ind = pop[static_cast<size_t>(i)];
    ind.genes.resize(static_cast<size_t>(genes));
    for (int g = 0; g < genes; ++g) {
      const double low = lb[static_cast<size_t>(g)];
      double value;
      if (i == 0) {
        value = low;  // fastest corner
      } else if (i == 1) {
        value = cfg.h_max;  // smoothest corner
      } else if (i == 2) {
        value = low + 0.5 * (cfg.h_max - low);
      } else {
        // Quadratic bias toward short intervals, where feasibility turns over.
        const double u = u01(rng);
        value = low + u * u * (cfg.h_max - low);
      }
      ind.genes[static_cast<size_t>(g)] = value;
    }
    evaluate(ind, wps, bc, limits);
  }

  double best_violation = kInf;
  for (const Individual& ind : pop) best_violation = std::min(best_violation, ind.violation);

  std::vector<std::vector<int>> fronts = sort_fronts(pop);
  for (const std::vector<int>& front : fronts) assign_crowding(pop, front);

  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(static_cast<size_t>(cfg.population));
    while (static_cast<int>(offspring.size()) < cfg.population) {
      const Individual& p1 = pop[static_cast<size_t>(tournament(pop, rng))];
      const Individual& p2 = pop[static_cast<size_t>(tournament(pop, rng))];
      Individual c1;
      Individual c2;
      crossover(p1, p2, c1, c2, lb, cfg.h_max, cfg, rng);
      mutate(c1, lb, cfg.h_max, cfg, rng);
      mutate(c2, lb, cfg.h_max, cfg, rng);
      evaluate(c1, wps, bc, limits);
      evaluate(c2, wps, bc, limits);
      best_violation = std::min({best_violation, c1.violation, c2.violation});
      offspring.push_back(std::move(c1));
      offspring.push_back(std::move(c2));
    }

    std::vector<Individual> combined;
    combined.reserve(pop.size() + offspring.size());
    for (Individual& ind : pop) combined.push_back(std::move(ind));
    for (Individual& ind : offspring) combined.push_back(std::move(ind));

    fronts = sort_fronts(combined);
    std::vector<Individual> next;
    next.reserve(static_cast<size_t>(cfg.population));
    for (const std::vector<int>& front : fronts) {
      assign_crowding(combined, front);
      if (static_cast<int>(next.size() + front.size()) <= cfg.population) {
        for (int i : front) next.push_back(combined[static_cast<size_t>(i)]);
      } else {
        std::vector<int> order = front;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
          const Individual& ia = combined[static_cast<size_t>(a)];
          const Individual& ib = combined[static_cast<size_t>(b)];
          if (ia.crowding != ib.crowding) return ia.crowding > ib.crowding;
          return a < b;
        });
        for (int i : order) {
          if (static_cast<int>(next.size()) == cfg.population) break;
          next.push_back(combined[static_cast<size_t>(i)]);
        }
      }
      if (static_cast<int>(next.size()) == cfg.population) break;
    }
    pop = std::move(next);
    fronts = sort_fronts(pop);
    for (const std::vector<int>& front : fronts) assign_crowding(pop, front);
  }

  std::vector<ParetoEntry> result;
  for (int i : fronts[0]) {
    const Individual& ind = pop[static_cast<size_t>(i)];
    if (ind.violation != 0.0) continue;
    result.push_back(ParetoEntry{ind.genes, ind.f_time, ind.f_jerk});
  }
  if (result.empty())
    throw InfeasibleError("optimizer: no feasible interval vector found", best_violation);

  // Deduplicate objective pairs and drop weak domination so the ladder can
  // rely on strict monotonicity.
  std::sort(result.begin(), result.end(), [](const ParetoEntry& a, const ParetoEntry& b) {
    if (a.f_time != b.f_time) return a.f_time < b.f_time;
    return a.f_jerk < b.f_jerk;
  });
  std::vector<ParetoEntry> clean;
  for (ParetoEntry& entry : result) {
    if (!clean.empty() && entry.f_jerk >= clean.back().f_jerk) continue;
    clean.push_back(std::move(entry));
  }
  PROMIND_DEBUG("optimizer: front size %zu after cleanup", clean.size());
  return clean;
}

SolutionLadder::SolutionLadder(std::vector<ParetoEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("ladder: empty");
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].h.empty()) throw std::invalid_argument("ladder: entry without intervals");
    if (i == 0) continue;
    if (!(entries_[i].f_time < entries_[i - 1].f_time))
      throw std::invalid_argument("ladder: f_time must strictly decrease along the index");
    if (entries_[i].f_jerk < entries_[i - 1].f_jerk)
      throw std::invalid_argument("ladder: f_jerk must not decrease along the index");
  }
}

const ParetoEntry& SolutionLadder::at(int index) const {
  if (index < 1 || index > size())
    throw std::out_of_range("ladder: index outside [1, size]");
  return entries_[static_cast<size_t>(index - 1)];
}

SolutionLadder downsample_ladder(const std::vector<ParetoEntry>& front, int n) {
  if (n < 2) throw std::invalid_argument("downsample: need at least two entries");

  // Work on a strictly non-dominated, deduplicated copy.
  std::vector<ParetoEntry> pool = front;
  std::sort(pool.begin(), pool.end(), [](const ParetoEntry& a, const ParetoEntry& b) {
    if (a.f_time != b.f_time) return a.f_time < b.f_time;
    return a.f_jerk < b.f_jerk;
  });
  std::vector<ParetoEntry> clean;
  for (ParetoEntry& entry : pool) {
    if (!clean.empty() && entry.f_jerk >= clean.back().f_jerk) continue;
    clean.push_back(std::move(entry));
  }
  if (static_cast<int>(clean.size()) < n)
    throw std::invalid_argument("downsample: front smaller than the requested ladder");

  double t_lo = kInf, t_hi = -kInf, j_lo = kInf, j_hi = -kInf;
  for (const ParetoEntry& e : clean) {
    t_lo = std::min(t_lo, e.f_time);
    t_hi = std::max(t_hi, e.f_time);
    j_lo = std::min(j_lo, e.f_jerk);
    j_hi = std::max(j_hi, e.f_jerk);
  }
  const double t_span = t_hi > t_lo ? t_hi - t_lo : 1.0;
  const double j_span = j_hi > j_lo ? j_hi - j_lo : 1.0;
  auto norm_time = [&](const ParetoEntry& e) { return (e.f_time - t_lo) / t_span; };
  auto norm_jerk = [&](const ParetoEntry& e) { return (e.f_jerk - j_lo) / j_span; };

  // Scalarization: z* is the per-objective minimum (0 after normalization).
  constexpr double kAugment = 1e-4;
  constexpr double kWeightFloor = 1e-12;
  auto asf = [&](const ParetoEntry& e, double w_time, double w_jerk) {
    const double zt = norm_time(e) / std::max(w_time, kWeightFloor);
    const double zj = norm_jerk(e) / std::max(w_jerk, kWeightFloor);
    return std::max(zt, zj) + kAugment * (zt + zj);
  };

  std::vector<int> selected;
  auto already = [&](int idx) {
    return std::find(selected.begin(), selected.end(), idx) != selected.end();
  };
  for (int j = 0; j < n; ++j) {
    // s = 0 pins the minimum-f_time extreme, s = 1 the minimum-jerk extreme.
    // The exponent packs indices slightly denser toward the fast end.
    const double s = static_cast<double>(j) / static_cast<double>(n - 1);
    const double w_time = std::pow(s, 1.15);
    const double w_jerk = std::pow(1.0 - s, 1.15);
    int best = -1;
    double best_value = kInf;
    for (int i = 0; i < static_cast<int>(clean.size()); ++i) {
      const double value = asf(clean[static_cast<size_t>(i)], w_time, w_jerk);
      if (value < best_value) {
        best_value = value;
        best = i;
      }
    }
    if (!already(best)) selected.push_back(best);
  }

  // Duplicate picks leave holes; fill with the most isolated remaining points.
  while (static_cast<int>(selected.size()) < n) {
    int best = -1;
    double best_distance = -1.0;
    for (int i = 0; i < static_cast<int>(clean.size()); ++i) {
      if (already(i)) continue;
      double nearest = kInf;
      for (int k : selected) {
        const double dt = norm_time(clean[static_cast<size_t>(i)]) -
                          norm_time(clean[static_cast<size_t>(k)]);
        const double dj = norm_jerk(clean[static_cast<size_t>(i)]) -
                          norm_jerk(clean[static_cast<size_t>(k)]);
        nearest = std::min(nearest, dt * dt + dj * dj);
      }
      if (nearest > best_distance) {
        best_distance = nearest;
        best = i;
      }
    }
    selected.push_back(best);
  }

  std::vector<ParetoEntry> entries;
  for (int i : selected) entries.push_back(clean[static_cast<size_t>(i)]);
  std::sort(entries.begin(), entries.end(),
            [](const ParetoEntry& a, const ParetoEntry& b) { return a.f_time > b.f_time; });
  return SolutionLadder(std::move(entries));
}

}  // namespace promind
