#pragma once

#include <istream>
#include <sstream>

#include "codom/search.hpp"
#include "codom/shared_product.hpp"

namespace codom {

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

struct FjsAlternative {
  int machine;  // 1-based
  std::int64_t duration;
};
using FjsTask = std::vector<FjsAlternative>;  // at least one alternative

struct FjsInstance {
  int n_jobs = 0;
  int n_machines = 0;
  std::vector<std::vector<FjsTask>> jobs;

  std::size_t total_tasks() const {
    std::size_t n = 0;
    for (const auto& j : jobs) n += j.size();
    return n;
  }
};

/// Parses the whitespace-separated flexible job shop format:
///   line 1: n_jobs n_machines [ignored trailing numbers]
///   then one line per job: T, then for each task: k, then k pairs
///   (machine_id, duration).
/// Blank lines and trailing whitespace are tolerated.
inline FjsInstance parse_fjs(std::istream& in) {
  FjsInstance inst;
  std::string line;
  int line_no = 0;

  auto next_line = [&](std::vector<std::string>& tokens) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      tokens.clear();
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  };

  auto parse_int = [&](const std::string& tok, int token_no,
                       ParseError::Code code) -> std::int64_t {
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(code, line_no, token_no,
                       "line " + std::to_string(line_no) + ", token " +
                           std::to_string(token_no) + ": expected integer, got '" + tok +
                           "'");
    }
  };

  std::vector<std::string> tokens;
  if (!next_line(tokens) || tokens.size() < 2)
    throw ParseError(ParseError::Code::MalformedHeader, line_no, 1,
                     "header must hold at least n_jobs and n_machines");
  const std::int64_t nj = parse_int(tokens[0], 1, ParseError::Code::MalformedHeader);
  const std::int64_t nm = parse_int(tokens[1], 2, ParseError::Code::MalformedHeader);
  if (nj < 1 || nm < 1)
    throw ParseError(ParseError::Code::MalformedHeader, line_no, 1,
                     "job and machine counts must be positive");
  inst.n_jobs = static_cast<int>(nj);
  inst.n_machines = static_cast<int>(nm);

  for (int j = 0; j < inst.n_jobs; ++j) {
    if (!next_line(tokens))
      throw ParseError(ParseError::Code::TruncatedJobLine, line_no + 1, 1,
                       "missing line for job " + std::to_string(j + 1));
    std::size_t pos = 0;
    auto take = [&]() -> std::int64_t {
      if (pos >= tokens.size())
        throw ParseError(ParseError::Code::TruncatedJobLine, line_no,
                         static_cast<int>(pos + 1),
                         "line " + std::to_string(line_no) + " ends after token " +
                             std::to_string(pos) + " but more values are needed");
      const std::int64_t v =
          parse_int(tokens[pos], static_cast<int>(pos + 1),
                    ParseError::Code::TruncatedJobLine);
      ++pos;
      return v;
    };
    const std::int64_t n_tasks = take();
    if (n_tasks < 1)
      throw ParseError(ParseError::Code::TruncatedJobLine, line_no, 1,
                       "job " + std::to_string(j + 1) + " declares no tasks");
    std::vector<FjsTask> tasks;
    for (std::int64_t t = 0; t < n_tasks; ++t) {
      const std::int64_t k = take();
      if (k < 1)
        throw ParseError(ParseError::Code::TruncatedJobLine, line_no,
                         static_cast<int>(pos),
                         "task must offer at least one machine alternative");
      FjsTask task;
      for (std::int64_t a = 0; a < k; ++a) {
        const int machine_token = static_cast<int>(pos + 1);
        const std::int64_t machine = take();
        const int duration_token = static_cast<int>(pos + 1);
        const std::int64_t duration = take();
        if (machine < 1 || machine > inst.n_machines)
          throw ParseError(ParseError::Code::MachineIdOutOfRange, line_no, machine_token,
                           "line " + std::to_string(line_no) + ", token " +
                               std::to_string(machine_token) + ": machine id " +
                               std::to_string(machine) + " outside 1.." +
                               std::to_string(inst.n_machines));
        if (duration < 1)
          throw ParseError(ParseError::Code::NonPositiveDuration, line_no, duration_token,
                           "line " + std::to_string(line_no) + ", token " +
                               std::to_string(duration_token) +
                               ": duration must be positive");
        task.push_back(FjsAlternative{static_cast<int>(machine), duration});
      }
      tasks.push_back(std::move(task));
    }
    inst.jobs.push_back(std::move(tasks));
  }
  return inst;
}

inline FjsInstance parse_fjs(const std::string& text) {
  std::istringstream in(text);
  return parse_fjs(in);
}

/// Serial-schedule horizon: the sum over all tasks of the largest
/// alternative duration. Any schedule fits below it.
inline std::int64_t horizon(const FjsInstance& inst) {
  ExtInt h(0);
  for (const auto& job : inst.jobs)
    for (const auto& task : job) {
      std::int64_t longest = 0;
      for (const auto& alt : task) longest = std::max(longest, alt.duration);
      h = h + ExtInt(longest);
    }
  return h.value();
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct FjsModel {
  std::vector<SharedDecl> declarations;
  std::vector<FormulaPtr> registrations;  // variable bounds, interpreted first
  std::vector<FormulaPtr> constraints;
  Strategy strategy;
  VarName objective = "makespan";
};

namespace fjs_detail {

inline VarName s_var(int j, int t) {
  return "s" + std::to_string(j) + "_" + std::to_string(t);
}
inline VarName d_var(int j, int t) {
  return "d" + std::to_string(j) + "_" + std::to_string(t);
}
inline VarName m_var(int j, int t) {
  return "m" + std::to_string(j) + "_" + std::to_string(t);
}

inline std::optional<std::int64_t> fixed_duration(const FjsTask& task) {
  const std::int64_t d = task[0].duration;
  for (const auto& alt : task)
    if (alt.duration != d) return std::nullopt;
  return d;
}

inline FormulaPtr between(const VarName& x, std::int64_t lo, std::int64_t hi) {
  return f_and(atom(Rel::Ge, Expr::var(x), Expr::constant(lo)),
               atom(Rel::Le, Expr::var(x), Expr::constant(hi)));
}

// s + D <= target with D the duration variable, or its constant when every
// alternative lasts the same.
inline FormulaPtr precedence(const FjsInstance& inst, int j, int t, const VarName& target) {
  const FjsTask& task = inst.jobs[j - 1][t - 1];
  const auto fixed = fixed_duration(task);
  const Expr::Ptr dur = fixed ? Expr::constant(*fixed) : Expr::var(d_var(j, t));
  return atom(Rel::Le, Expr::add(Expr::var(s_var(j, t)), dur), Expr::var(target));
}

struct BuildParts {
  std::vector<FormulaPtr> registrations;
  std::vector<FormulaPtr> bounds_free;  // unannotated variable bounds
  std::vector<FormulaPtr> prec;         // Eq. (1) and (3), unannotated
  std::vector<bool> prec_fixed;         // parallel: duration statically known
  std::vector<FormulaPtr> no_overlap;   // Eq. (2)
  std::vector<FormulaPtr> alternatives;  // Eq. (4)
  Strategy strategy;
};

inline BuildParts build_parts(const FjsInstance& inst, std::int64_t h) {
  BuildParts parts;
  std::vector<VarName> d_phase, m_phase, s_phase;

  for (int j = 1; j <= inst.n_jobs; ++j) {
    const auto& job = inst.jobs[j - 1];
    for (int t = 1; t <= static_cast<int>(job.size()); ++t) {
      const FjsTask& task = job[t - 1];
      std::int64_t min_d = task[0].duration, max_d = task[0].duration;
      int min_m = task[0].machine, max_m = task[0].machine;
      for (const auto& alt : task) {
        min_d = std::min(min_d, alt.duration);
        max_d = std::max(max_d, alt.duration);
        min_m = std::min(min_m, alt.machine);
        max_m = std::max(max_m, alt.machine);
      }
      parts.bounds_free.push_back(between(s_var(j, t), 0, h));
      parts.bounds_free.push_back(between(d_var(j, t), min_d, max_d));
      parts.bounds_free.push_back(between(m_var(j, t), min_m, max_m));
      d_phase.push_back(d_var(j, t));
      m_phase.push_back(m_var(j, t));
      s_phase.push_back(s_var(j, t));
    }
  }
  parts.bounds_free.push_back(between("makespan", 0, h));

  // Eq. (1): precedence inside each job; Eq. (3): makespan bound.
  for (int j = 1; j <= inst.n_jobs; ++j) {
    const int T = static_cast<int>(inst.jobs[j - 1].size());
    for (int t = 1; t < T; ++t) {
      parts.prec.push_back(precedence(inst, j, t, s_var(j, t + 1)));
      parts.prec_fixed.push_back(fixed_duration(inst.jobs[j - 1][t - 1]).has_value());
    }
    parts.prec.push_back(precedence(inst, j, T, "makespan"));
    parts.prec_fixed.push_back(fixed_duration(inst.jobs[j - 1][T - 1]).has_value());
  }

  // Eq. (2): one non-overlap implication per unordered pair of tasks from
  // distinct jobs.
  auto dur_expr = [&](int j, int t) -> Expr::Ptr {
    const auto fixed = fixed_duration(inst.jobs[j - 1][t - 1]);
    return fixed ? Expr::constant(*fixed) : Expr::var(d_var(j, t));
  };
  for (int j1 = 1; j1 <= inst.n_jobs; ++j1)
    for (int j2 = j1 + 1; j2 <= inst.n_jobs; ++j2)
      for (int t1 = 1; t1 <= static_cast<int>(inst.jobs[j1 - 1].size()); ++t1)
        for (int t2 = 1; t2 <= static_cast<int>(inst.jobs[j2 - 1].size()); ++t2) {
          const FormulaPtr same_machine =
              atom(Rel::Eq, Expr::var(m_var(j1, t1)), Expr::var(m_var(j2, t2)));
          const FormulaPtr before = atom(
              Rel::Le, Expr::add(Expr::var(s_var(j1, t1)), dur_expr(j1, t1)),
              Expr::var(s_var(j2, t2)));
          const FormulaPtr after = atom(
              Rel::Le, Expr::add(Expr::var(s_var(j2, t2)), dur_expr(j2, t2)),
              Expr::var(s_var(j1, t1)));
          parts.no_overlap.push_back(f_imply(same_machine, f_or(before, after)));
        }

  // Eq. (4): machine alternatives fix the duration.
  for (int j = 1; j <= inst.n_jobs; ++j)
    for (int t = 1; t <= static_cast<int>(inst.jobs[j - 1].size()); ++t) {
      const FjsTask& task = inst.jobs[j - 1][t - 1];
      FormulaPtr alt_formula;
      for (const auto& alt : task) {
        FormulaPtr one =
            f_and(atom(Rel::Eq, Expr::var(m_var(j, t)), Expr::constant(alt.machine)),
                  atom(Rel::Eq, Expr::var(d_var(j, t)), Expr::constant(alt.duration)));
        alt_formula = alt_formula ? f_or(alt_formula, one) : one;
      }
      parts.alternatives.push_back(alt_formula);
    }

  parts.strategy.phases = {d_phase, m_phase, s_phase, {"makespan"}};
  return parts;
}

}  // namespace fjs_detail

/// Static dispatch: immediately octagonal precedences (all alternatives of
/// the task last the same) go to the octagon, everything else to the
/// logic-completed propagator completion over box x octagon.
inline FjsModel build_fjs1(const FjsInstance& inst,
                           std::optional<std::int64_t> horizon_override = std::nullopt) {
  using K = DomainKind;
  const std::int64_t h = horizon_override.value_or(horizon(inst));
  fjs_detail::BuildParts parts = fjs_detail::build_parts(inst, h);

  FjsModel model;
  model.declarations = {
      {"box", K::box(), {}},
      {"oct", K::oct(), {}},
      {"any", K::logic(K::ipc(K::product({K::box(), K::oct()}))),
       {DepArg::tuple({DepArg::named("box"), DepArg::named("oct")})}},
  };
  for (const auto& b : parts.bounds_free)
    model.registrations.push_back(annotate(b, "box"));
  for (std::size_t i = 0; i < parts.prec.size(); ++i)
    model.constraints.push_back(
        annotate(parts.prec[i], parts.prec_fixed[i] ? "oct" : "any"));
  for (const auto& f : parts.no_overlap) model.constraints.push_back(annotate(f, "any"));
  for (const auto& f : parts.alternatives)
    model.constraints.push_back(annotate(f, "any"));
  model.strategy = parts.strategy;
  return model;
}

/// Dynamic dispatch: every precedence goes to the delayed product, which
/// sends it (exactly or as a bound-substituted over-approximation) into the
/// octagon as durations become fixed during search.
inline FjsModel build_fjs2(const FjsInstance& inst,
                           std::optional<std::int64_t> horizon_override = std::nullopt) {
  using K = DomainKind;
  const std::int64_t h = horizon_override.value_or(horizon(inst));
  fjs_detail::BuildParts parts = fjs_detail::build_parts(inst, h);

  const K prec_kind =
      K::delayed(K::ipc(K::product({K::box(), K::oct()})), K::oct());
  FjsModel model;
  model.declarations = {
      {"box", K::box(), {}},
      {"oct", K::oct(), {}},
      {"prec", prec_kind,
       {DepArg::tuple({DepArg::tuple({DepArg::named("box"), DepArg::named("oct")})}),
        DepArg::named("oct")}},
      {"no_overlap", K::logic(K::product({K::box(), prec_kind})),
       {DepArg::tuple({DepArg::named("box"), DepArg::named("prec")})}},
      {"alternatives", K::logic(K::box()), {DepArg::named("box")}},
  };
  for (const auto& b : parts.bounds_free)
    model.registrations.push_back(annotate(b, "box"));
  for (const auto& f : parts.prec) model.constraints.push_back(annotate(f, "prec"));
  for (const auto& f : parts.no_overlap)
    model.constraints.push_back(annotate(f, "no_overlap"));
  for (const auto& f : parts.alternatives)
    model.constraints.push_back(annotate(f, "alternatives"));
  model.strategy = parts.strategy;
  return model;
}

/// Single-domain baseline: everything in L(IPC(Box)).
inline FjsModel build_box_ipc(const FjsInstance& inst,
                              std::optional<std::int64_t> horizon_override = std::nullopt) {
  using K = DomainKind;
  const std::int64_t h = horizon_override.value_or(horizon(inst));
  fjs_detail::BuildParts parts = fjs_detail::build_parts(inst, h);

  FjsModel model;
  model.declarations = {
      {"box", K::box(), {}},
      {"solver", K::logic(K::ipc(K::box())), {DepArg::named("box")}},
  };
  for (const auto& b : parts.bounds_free)
    model.registrations.push_back(annotate(b, "box"));
  for (const auto& f : parts.prec) model.constraints.push_back(annotate(f, "solver"));
  for (const auto& f : parts.no_overlap)
    model.constraints.push_back(annotate(f, "solver"));
  for (const auto& f : parts.alternatives)
    model.constraints.push_back(annotate(f, "solver"));
  model.strategy = parts.strategy;
  return model;
}

/// Builds the shared product and interprets the model: variable registrations
/// first, one reduction so every view sees them, then the constraints.
inline SharedProduct instantiate(const FjsModel& model) {
  SharedProduct sp = SharedProduct::build(model.declarations);
  for (const FormulaPtr& f : model.registrations) {
    const InterpretResult r = sp.interpret(*f);
    if (r != InterpretResult::Ok)
      throw std::runtime_error("registration rejected (" + to_string(r) +
                               "): " + to_string(*f));
  }
  sp.rho_reduce();
  for (const FormulaPtr& f : model.constraints) {
    const InterpretResult r = sp.interpret(*f);
    if (r != InterpretResult::Ok)
      throw std::runtime_error("constraint rejected (" + to_string(r) +
                               "): " + to_string(*f));
  }
  sp.rho_reduce();
  return sp;
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Exhaustive optimal makespan via depth-first list scheduling: repeatedly
/// append the next task of some job on some machine alternative at its
/// earliest start. Covers all semi-active schedules, which contain an
/// optimum. Intended for instances with at most ~8 tasks; larger enumeration
/// spaces are refused.
inline std::int64_t fjssp_oracle(const FjsInstance& inst, std::int64_t h,
                                 double size_cap = 5e7) {
  // Enumeration size: interleavings x machine choices.
  double size = 1.0;
  std::size_t total = 0;
  for (const auto& job : inst.jobs) {
    for (std::size_t t = 0; t < job.size(); ++t) {
      ++total;
      size *= static_cast<double>(total);          // grows like (sum T)!
      size /= static_cast<double>(t + 1);          // / T_j! per job
      size *= static_cast<double>(job[t].size());  // alternatives
    }
  }
  if (size > size_cap)
    throw SizeGuardError("oracle enumeration space ~" + std::to_string(size) +
                         " exceeds cap");

  std::vector<std::size_t> next_task(inst.jobs.size(), 0);
  std::vector<std::int64_t> job_ready(inst.jobs.size(), 0);
  std::vector<std::int64_t> machine_free(inst.n_machines + 1, 0);
  std::int64_t best = -1;

  auto lower_bound_now = [&]() {
    std::int64_t lb = 0;
    for (std::int64_t r : job_ready) lb = std::max(lb, r);
    return lb;
  };

  std::size_t remaining = inst.total_tasks();
  auto dfs = [&](auto&& self) -> void {
    if (remaining == 0) {
      const std::int64_t mk = lower_bound_now();
      if (best < 0 || mk < best) best = mk;
      return;
    }
    if (best >= 0 && lower_bound_now() >= best) return;
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
      if (next_task[j] >= inst.jobs[j].size()) continue;
      const FjsTask& task = inst.jobs[j][next_task[j]];
      for (const FjsAlternative& alt : task) {
        const std::int64_t start = std::max(job_ready[j], machine_free[alt.machine]);
        const std::int64_t end = start + alt.duration;
        if (end > h) continue;
        if (best >= 0 && end >= best) continue;  // cannot improve the makespan
        const std::int64_t saved_ready = job_ready[j];
        const std::int64_t saved_free = machine_free[alt.machine];
        job_ready[j] = end;
        machine_free[alt.machine] = end;
        ++next_task[j];
        --remaining;
        self(self);
        ++remaining;
        --next_task[j];
        job_ready[j] = saved_ready;
        machine_free[alt.machine] = saved_free;
      }
    }
  };
  dfs(dfs);
  if (best < 0) throw std::runtime_error("oracle found no schedule within the horizon");
  return best;
}

}  // namespace codom
