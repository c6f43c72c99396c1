#pragma once

#include "codom/element.hpp"
#include "codom/hc4.hpp"

namespace codom {

namespace detail {

/// Negation normal form: Imply and Not are eliminated, negation lands on
/// atoms via the complementary integer relation. Annotations stay attached
/// to the sub-formulas they label.
inline FormulaPtr nnf(const FormulaPtr& f, bool negated) {
  return std::visit(
      [&](const auto& n) -> FormulaPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) {
          return negated ? atom(negate_atom(n)) : f;
        } else if constexpr (std::is_same_v<T, Formula::NotF>) {
          return nnf(n.sub, !negated);
        } else if constexpr (std::is_same_v<T, Formula::AndF>) {
          return negated ? f_or(nnf(n.l, true), nnf(n.r, true))
                         : f_and(nnf(n.l, false), nnf(n.r, false));
        } else if constexpr (std::is_same_v<T, Formula::OrF>) {
          return negated ? f_and(nnf(n.l, true), nnf(n.r, true))
                         : f_or(nnf(n.l, false), nnf(n.r, false));
        } else if constexpr (std::is_same_v<T, Formula::ImplyF>) {
          // l => r  ==  !l \/ r
          return negated ? f_and(nnf(n.l, false), nnf(n.r, true))
                         : f_or(nnf(n.l, true), nnf(n.r, false));
        } else {
          return annotate(nnf(n.sub, negated), n.target);
        }
      },
      f->node());
}

inline void flatten_or(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (const auto* o = std::get_if<Formula::OrF>(&f->node())) {
    flatten_or(o->l, out);
    flatten_or(o->r, out);
  } else {
    out.push_back(f);
  }
}

inline void flatten_and(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (const auto* a = std::get_if<Formula::AndF>(&f->node())) {
    flatten_and(a->l, out);
    flatten_and(a->r, out);
  } else {
    out.push_back(f);
  }
}

}  // namespace detail

/// Logic completion L(A): extends a domain with /\, \/, =>, ! over its
/// constraint language. Conjuncts the base supports are joined directly;
/// the remaining residues become clauses in negation normal form, propagated
/// by hull-entailment unit propagation and resolved by splitting.
class LogicCompletion final : public Element {
 public:
  enum class ClauseStatus { Unknown, Entailed };
  struct Clause {
    FormulaPtr formula;  // NNF residue, usually an Or
    ClauseStatus status = ClauseStatus::Unknown;
    int last_told = -1;  // disjunct already joined as a unit (idempotence cache)
  };

  explicit LogicCompletion(ElementPtr base) : base_(std::move(base)) {}
  LogicCompletion(const LogicCompletion& o)
      : base_(o.base_->clone()), clauses_(o.clauses_) {}
  LogicCompletion& operator=(const LogicCompletion&) = delete;

  const Element& base() const { return *base_; }
  Element& base() { return *base_; }
  const std::vector<Clause>& clauses() const { return clauses_; }

  std::unique_ptr<Element> clone() const override {
    return std::make_unique<LogicCompletion>(*this);
  }

  bool supports(const Formula& f) const override {
    return supports_nnf(*detail::nnf(make_formula(Formula::Node(f.node())), false));
  }

  InterpretResult interpret(const Formula& f) override {
    const FormulaPtr n = detail::nnf(make_formula(Formula::Node(f.node())), false);
    if (!supports_nnf(*n)) return InterpretResult::NotSupported;
    tell(n);
    return InterpretResult::Ok;
  }

  /// Three-valued evaluation over the base's projections.
  Kleene eval3(const Formula& f) const {
    return std::visit(
        [&](const auto& n) -> Kleene {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Atom>) {
            return hc4::entail(*base_, n);
          } else if constexpr (std::is_same_v<T, Formula::AndF>) {
            return kleene_and(eval3(*n.l), eval3(*n.r));
          } else if constexpr (std::is_same_v<T, Formula::OrF>) {
            return kleene_or(eval3(*n.l), eval3(*n.r));
          } else if constexpr (std::is_same_v<T, Formula::ImplyF>) {
            return kleene_or(kleene_not(eval3(*n.l)), eval3(*n.r));
          } else if constexpr (std::is_same_v<T, Formula::NotF>) {
            return kleene_not(eval3(*n.sub));
          } else {
            return eval3(*n.sub);
          }
        },
        f.node());
  }

  /// Unit propagation to a fixpoint, interleaved with the base's closure:
  /// a clause whose disjuncts are all false makes the element inconsistent;
  /// a clause with exactly one non-false disjunct has that disjunct joined
  /// into the base, and is marked entailed once it evaluates true.
  bool closure() override {
    if (failed_) return false;
    bool any = false;
    for (std::size_t round = 0; round < kMaxRounds; ++round) {
      bool changed = base_->closure();
      if (base_->state() == Kleene::False) return any || changed;
      for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
        if (clauses_[ci].status == ClauseStatus::Entailed) continue;
        std::vector<FormulaPtr> disjuncts;
        detail::flatten_or(clauses_[ci].formula, disjuncts);
        std::size_t non_false = 0;
        int unit = -1;
        bool some_true = false;
        for (std::size_t di = 0; di < disjuncts.size(); ++di) {
          const Kleene k = eval3(*disjuncts[di]);
          if (k == Kleene::True) some_true = true;
          if (k != Kleene::False) {
            ++non_false;
            unit = static_cast<int>(di);
          }
        }
        if (some_true) {
          clauses_[ci].status = ClauseStatus::Entailed;
          changed = true;
          continue;
        }
        if (non_false == 0) {  // every disjunct disentailed
          failed_ = true;
          return true;
        }
        if (non_false == 1 && clauses_[ci].last_told != unit) {
          const FormulaPtr chosen = disjuncts[unit];  // tell() may grow clauses_
          changed |= tell(chosen);
          clauses_[ci].last_told = unit;
          if (eval3(*chosen) == Kleene::True) {
            clauses_[ci].status = ClauseStatus::Entailed;
            changed = true;
          }
        }
      }
      if (!changed) break;
      any = true;
    }
    return any;
  }

  Kleene state() override {
    if (failed_) return Kleene::False;
    Kleene st = base_->state();
    for (const Clause& c : clauses_) {
      if (st == Kleene::False) return st;
      if (c.status == ClauseStatus::Entailed) continue;
      st = kleene_and(st, eval3(*c.formula));
    }
    return st;
  }

  /// One branch per non-false disjunct of the first unknown clause; without
  /// clauses, delegates to the base's split.
  std::vector<ElementPtr> split() const override {
    for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
      if (clauses_[ci].status == ClauseStatus::Entailed) continue;
      std::vector<FormulaPtr> disjuncts;
      detail::flatten_or(clauses_[ci].formula, disjuncts);
      std::vector<ElementPtr> out;
      for (const FormulaPtr& d : disjuncts) {
        if (eval3(*d) == Kleene::False) continue;
        auto branch = std::make_unique<LogicCompletion>(*this);
        branch->tell(d);
        branch->clauses_[ci].status = ClauseStatus::Entailed;
        out.push_back(std::move(branch));
      }
      return out;
    }
    std::vector<ElementPtr> out;
    for (auto& b : base_->split()) {
      auto e = std::make_unique<LogicCompletion>(std::move(b));
      e->clauses_ = clauses_;
      out.push_back(std::move(e));
    }
    return out;
  }

  Interval project(const VarName& x) const override { return base_->project(x); }
  bool knows_var(const VarName& x) const override { return base_->knows_var(x); }
  void collect_element_vars(VarSet& out) const override { base_->collect_element_vars(out); }

  bool embed(const VarName& x, const Interval& hull) override {
    return base_->embed(x, hull);
  }

  bool join_from(const Element& other) override {
    const auto& o = dynamic_cast<const LogicCompletion&>(other);
    bool changed = base_->join_from(*o.base_);
    for (const Clause& c : o.clauses_) {
      Clause* mine = find_clause(*c.formula);
      if (mine == nullptr) {
        clauses_.push_back(c);
        changed = true;
      } else if (c.status == ClauseStatus::Entailed && mine->status != c.status) {
        mine->status = c.status;
        changed = true;
      }
    }
    if (o.failed_ && !failed_) {
      failed_ = true;
      changed = true;
    }
    return changed;
  }

  bool leq(const Element& other) const override {
    const auto& o = dynamic_cast<const LogicCompletion&>(other);
    if (!base_->leq(*o.base_)) return false;
    for (const Clause& c : clauses_) {
      const Clause* theirs = o.find_clause(*c.formula);
      if (theirs == nullptr) return false;
      if (c.status == ClauseStatus::Entailed && theirs->status != ClauseStatus::Entailed)
        return false;
    }
    return true;
  }

  bool equals(const Element& other) const override {
    const auto& o = dynamic_cast<const LogicCompletion&>(other);
    if (clauses_.size() != o.clauses_.size()) return false;
    for (const Clause& c : clauses_) {
      const Clause* theirs = o.find_clause(*c.formula);
      if (theirs == nullptr || theirs->status != c.status) return false;
    }
    return base_->equals(*o.base_);
  }

  bool gamma_contains(const Assignment& point) const override {
    if (failed_ || !base_->gamma_contains(point)) return false;
    for (const Clause& c : clauses_)
      if (!evaluate(*c.formula, point)) return false;
    return true;
  }

  std::size_t child_count() const override { return 1; }
  Element* child(std::size_t i) override { return i == 0 ? base_.get() : nullptr; }
  const Element* child(std::size_t i) const override {
    return i == 0 ? base_.get() : nullptr;
  }

  std::string str() const override {
    std::string out = "lc(" + base_->str();
    for (const Clause& c : clauses_) {
      out += "; " + to_string(*c.formula);
      if (c.status == ClauseStatus::Entailed) out += " [ok]";
    }
    return out + ")";
  }

 private:
  // Joins an NNF formula: supported conjuncts go to the base, the rest
  // become clauses. Returns true when anything changed.
  bool tell(const FormulaPtr& n) {
    bool changed = false;
    std::vector<FormulaPtr> conjuncts;
    detail::flatten_and(n, conjuncts);
    for (const FormulaPtr& c : conjuncts) {
      if (base_->supports(*c)) {
        const InterpretResult r = base_->interpret(*c);
        if (r != InterpretResult::Ok)
          throw std::logic_error("base rejected a supported formula: " + to_string(r));
        changed = true;
      } else if (find_clause(*c) == nullptr) {
        clauses_.push_back(Clause{c, ClauseStatus::Unknown});
        changed = true;
      }
    }
    return changed;
  }

  bool supports_nnf(const Formula& f) const {
    if (base_->supports(f)) return true;
    const Formula& g = strip_annotations(f);
    if (const auto* a = std::get_if<Formula::AndF>(&g.node()))
      return supports_nnf(*a->l) && supports_nnf(*a->r);
    if (const auto* o = std::get_if<Formula::OrF>(&g.node()))
      return supports_nnf(*o->l) && supports_nnf(*o->r);
    return false;
  }

  Clause* find_clause(const Formula& f) {
    for (Clause& c : clauses_)
      if (structural_equal(*c.formula, f)) return &c;
    return nullptr;
  }
  const Clause* find_clause(const Formula& f) const {
    return const_cast<LogicCompletion*>(this)->find_clause(f);
  }

  static constexpr std::size_t kMaxRounds = 10000;

  ElementPtr base_;
  std::vector<Clause> clauses_;
  bool failed_ = false;  // some clause had every disjunct disentailed
};

}  // namespace codom
