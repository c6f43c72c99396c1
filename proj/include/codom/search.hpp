#pragma once

#include <chrono>
#include <optional>

#include "codom/element.hpp"

namespace codom {

/// Branching strategy: ordered phases of variables, smallest projected width
/// first within the active phase (ties by name), lower bound assigned first.
struct Strategy {
  std::vector<std::vector<VarName>> phases;

  static Strategy single_phase(std::vector<VarName> vars) {
    Strategy s;
    s.phases.push_back(std::move(vars));
    return s;
  }

  std::vector<VarName> all_vars() const {
    std::vector<VarName> out;
    for (const auto& p : phases) out.insert(out.end(), p.begin(), p.end());
    return out;
  }
};

enum class SearchStatus { Optimal, Sat, Unsat, Timeout };

inline std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Optimal: return "optimal";
    case SearchStatus::Sat: return "sat";
    case SearchStatus::Unsat: return "unsat";
    case SearchStatus::Timeout: return "timeout";
  }
  return "?";
}

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t solutions = 0;
  std::optional<std::int64_t> best_objective;
  std::uint64_t nodes_to_best = 0;
  std::chrono::milliseconds time_to_best{0};
  std::chrono::milliseconds total_time{0};
  SearchStatus status = SearchStatus::Unsat;
};

/// Branches on the first phase holding a non-singleton variable: the
/// smallest-width variable x = [l..u] there yields [x = l] then [x >= l+1].
/// When every strategy variable is fixed, delegates to the element's split.
inline std::vector<ElementPtr> dms_branch(const Element& e, const Strategy& s) {
  for (const auto& phase : s.phases) {
    const VarName* best = nullptr;
    Interval best_itv;
    for (const VarName& x : phase) {
      const Interval itv = e.project(x);
      if (itv.is_empty() || itv.is_singleton()) continue;
      if (best == nullptr || itv.width() < best_itv.width() ||
          (itv.width() == best_itv.width() && x < *best)) {
        best = &x;
        best_itv = itv;
      }
    }
    if (best == nullptr) continue;
    if (!best_itv.lo().is_finite())
      throw SearchError("branching variable has no finite lower bound: " + *best);
    const std::int64_t l = best_itv.lo().value();
    auto left = e.clone();
    left->embed(*best, Interval::singleton(l));
    auto right = e.clone();
    right->embed(*best, Interval::at_least(ExtInt(l) + ExtInt(1)));
    std::vector<ElementPtr> out;
    out.push_back(std::move(left));
    out.push_back(std::move(right));
    return out;
  }
  return e.split();
}

struct SolveResult {
  std::vector<ElementPtr> solutions;
  SearchStats stats;
};

/// Depth-first propagate-and-search: closure, then collect on true, prune on
/// false, branch on unknown. Left branches (lower-bound assignments) are
/// explored first. Every solution element found within the budget is
/// returned.
inline SolveResult solve(const Element& root, std::chrono::milliseconds budget,
                         const Strategy* strategy = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  SolveResult res;
  std::vector<ElementPtr> stack;
  stack.push_back(root.clone());
  bool timed_out = false;
  while (!stack.empty()) {
    if (std::chrono::steady_clock::now() - start > budget) {
      timed_out = true;
      break;
    }
    ElementPtr e = std::move(stack.back());
    stack.pop_back();
    e->closure();
    ++res.stats.nodes;
    const Kleene st = e->state();
    if (st == Kleene::False) continue;
    if (st == Kleene::True) {
      ++res.stats.solutions;
      res.solutions.push_back(std::move(e));
      continue;
    }
    auto branches = strategy ? dms_branch(*e, *strategy) : e->split();
    if (branches.empty())
      throw SearchError("unknown state but nothing to branch on");
    for (auto it = branches.rbegin(); it != branches.rend(); ++it)
      stack.push_back(std::move(*it));
  }
  res.stats.total_time = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  res.stats.status = timed_out ? SearchStatus::Timeout
                     : res.stats.solutions > 0 ? SearchStatus::Sat
                                               : SearchStatus::Unsat;
  return res;
}

/// Branch-and-bound minimization of one variable. Each recorded solution v
/// adds the bound objective <= v - 1 at every subsequent node, so recorded
/// values strictly decrease. Solutions are only recorded once every strategy
/// variable is fixed, which makes the witness assignment a genuine point.
/// Status is Optimal when the tree was exhausted within the budget.
inline SearchStats minimize(const Element& root, const VarName& objective,
                            const Strategy& strategy, std::chrono::milliseconds budget,
                            Assignment* best_assignment = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  SearchStats stats;
  {
    auto probe = root.clone();
    probe->closure();
    if (!probe->project(objective).hi().is_finite())
      throw SearchError("objective '" + objective + "' has no finite upper bound");
  }
  const std::vector<VarName> all_vars = strategy.all_vars();
  std::optional<std::int64_t> best;
  std::vector<ElementPtr> stack;
  stack.push_back(root.clone());
  bool timed_out = false;
  while (!stack.empty()) {
    if (std::chrono::steady_clock::now() - start > budget) {
      timed_out = true;
      break;
    }
    ElementPtr e = std::move(stack.back());
    stack.pop_back();
    if (best) e->embed(objective, Interval::at_most(ExtInt(*best) - ExtInt(1)));
    e->closure();
    ++stats.nodes;
    const Kleene st = e->state();
    if (st == Kleene::False) continue;
    if (st == Kleene::True) {
      bool all_fixed = true;
      for (const VarName& x : all_vars) {
        if (!e->project(x).is_singleton()) {
          all_fixed = false;
          break;
        }
      }
      if (all_fixed) {
        const Interval obj = e->project(objective);
        const std::int64_t v = obj.lo().value();
        best = v;
        stats.best_objective = v;
        ++stats.solutions;
        stats.nodes_to_best = stats.nodes;
        stats.time_to_best = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start);
        if (best_assignment != nullptr) {
          best_assignment->clear();
          for (const VarName& x : all_vars)
            (*best_assignment)[x] = e->project(x).lo().value();
        }
        continue;
      }
      // Keep assigning until the witness is a point.
    }
    auto branches = dms_branch(*e, strategy);
    if (branches.empty())
      throw SearchError("unknown state but nothing to branch on");
    for (auto it = branches.rbegin(); it != branches.rend(); ++it)
      stack.push_back(std::move(*it));
  }
  stats.total_time = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  stats.status = timed_out                ? SearchStatus::Timeout
                 : stats.solutions > 0    ? SearchStatus::Optimal
                                          : SearchStatus::Unsat;
  return stats;
}

}  // namespace codom
