#pragma once

#include "codom/element.hpp"

namespace codom {

/// Delayed product DP(A1, A2): formulas that A2 cannot interpret yet are held
/// in A1 and recorded as pending transfers. During closure each pending
/// formula is retried: once its variables are instantiated in A1 it is
/// rewritten and joined into A2 (transferred); otherwise a bound-substituted
/// over-approximation may be joined while the formula stays pending. A2 only
/// receives formulas whose variables it already knows, which lets the
/// composition decide which variables matter.
class DelayedProduct final : public Element {
 public:
  enum class Transfer { Pending, Transferred };
  struct TableEntry {
    FormulaPtr formula;  // keyed structurally, annotations stripped
    Transfer status = Transfer::Pending;
  };
  struct LogEntry {
    FormulaPtr formula;  // what was actually joined into A2
    bool relaxed;        // true when it was an over-approximation
  };

  DelayedProduct(ElementPtr a1, ElementPtr a2) : a1_(std::move(a1)), a2_(std::move(a2)) {}

  DelayedProduct(const DelayedProduct& o)
      : a1_(o.a1_->clone()), a2_(o.a2_->clone()), table_(o.table_), log_(o.log_) {}
  DelayedProduct& operator=(const DelayedProduct&) = delete;

  const Element& first() const { return *a1_; }
  const Element& second() const { return *a2_; }
  const std::vector<TableEntry>& transfer_table() const { return table_; }
  const std::vector<LogEntry>& transfer_log() const { return log_; }

  std::unique_ptr<Element> clone() const override {
    return std::make_unique<DelayedProduct>(*this);
  }

  bool supports(const Formula& f) const override {
    return a2_->supports(f) || a1_->supports(f);
  }

  InterpretResult interpret(const Formula& f) override {
    if (a2_->supports(f)) return a2_->interpret(f);
    if (a1_->supports(f)) {
      const InterpretResult r = a1_->interpret(f);
      if (r != InterpretResult::Ok) return r;
      const Formula& key = strip_annotations(f);
      if (find_entry(key) == nullptr)
        table_.push_back(TableEntry{make_formula(Formula::Node(key.node()))});
      return InterpretResult::Ok;
    }
    return InterpretResult::NotSupported;
  }

  bool closure() override {
    bool any = false;
    for (std::size_t round = 0; round < kMaxRounds; ++round) {
      bool changed = a1_->closure();
      changed |= a2_->closure();
      changed |= transfer_pass();
      if (!changed) break;
      any = true;
    }
    return any;
  }

  Kleene state() override {
    const Kleene s1 = a1_->state();
    if (s1 == Kleene::False) return s1;
    const Kleene st = kleene_and(s1, a2_->state());
    if (st == Kleene::False) return st;
    // The two sides may contradict each other on a shared variable.
    VarSet vs;
    collect_element_vars(vs);
    for (const VarName& x : vs)
      if (project(x).is_empty()) return Kleene::False;
    return st;
  }

  std::vector<ElementPtr> split() const override {
    for (int side = 0; side < 2; ++side) {
      const Element& e = side == 0 ? *a1_ : *a2_;
      auto branches = e.split();
      if (branches.empty()) continue;
      std::vector<ElementPtr> out;
      for (auto& b : branches) {
        auto dp = std::make_unique<DelayedProduct>(*this);
        (side == 0 ? dp->a1_ : dp->a2_) = std::move(b);
        out.push_back(std::move(dp));
      }
      return out;
    }
    return {};
  }

  Interval project(const VarName& x) const override {
    return join(a1_->project(x), a2_->project(x));
  }

  bool knows_var(const VarName& x) const override {
    return a1_->knows_var(x) || a2_->knows_var(x);
  }

  void collect_element_vars(VarSet& out) const override {
    a1_->collect_element_vars(out);
    a2_->collect_element_vars(out);
  }

  bool embed(const VarName& x, const Interval& hull) override {
    bool changed = a1_->embed(x, hull);
    changed |= a2_->embed(x, hull);
    return changed;
  }

  bool join_from(const Element& other) override {
    const auto& o = dynamic_cast<const DelayedProduct&>(other);
    bool changed = a1_->join_from(*o.a1_);
    changed |= a2_->join_from(*o.a2_);
    for (const TableEntry& e : o.table_) {
      TableEntry* mine = find_entry(*e.formula);
      if (mine == nullptr) {
        table_.push_back(e);
        changed = true;
      } else if (e.status == Transfer::Transferred && mine->status != e.status) {
        mine->status = e.status;  // Pending <= Transferred
        changed = true;
      }
    }
    for (const LogEntry& e : o.log_)
      if (!logged(*e.formula)) log_.push_back(e);
    return changed;
  }

  bool leq(const Element& other) const override {
    const auto& o = dynamic_cast<const DelayedProduct&>(other);
    if (!a1_->leq(*o.a1_) || !a2_->leq(*o.a2_)) return false;
    for (const TableEntry& e : table_) {
      const TableEntry* theirs = o.find_entry(*e.formula);
      if (theirs == nullptr) return false;
      if (e.status == Transfer::Transferred && theirs->status != Transfer::Transferred)
        return false;
    }
    return true;
  }

  bool equals(const Element& other) const override {
    const auto& o = dynamic_cast<const DelayedProduct&>(other);
    if (table_.size() != o.table_.size()) return false;
    for (const TableEntry& e : table_) {
      const TableEntry* theirs = o.find_entry(*e.formula);
      if (theirs == nullptr || theirs->status != e.status) return false;
    }
    return a1_->equals(*o.a1_) && a2_->equals(*o.a2_);
  }

  bool gamma_contains(const Assignment& point) const override {
    return a1_->gamma_contains(point) && a2_->gamma_contains(point);
  }

  std::size_t child_count() const override { return 2; }
  Element* child(std::size_t i) override {
    return i == 0 ? a1_.get() : i == 1 ? a2_.get() : nullptr;
  }
  const Element* child(std::size_t i) const override {
    return i == 0 ? a1_.get() : i == 1 ? a2_.get() : nullptr;
  }

  std::string str() const override {
    std::string out = "dp(" + a1_->str() + ", " + a2_->str();
    for (const TableEntry& e : table_) {
      out += "; " + to_string(*e.formula);
      out += e.status == Transfer::Transferred ? " [sent]" : " [pending]";
    }
    return out + ")";
  }

 private:
  // One retry pass over the pending formulas.
  bool transfer_pass() {
    bool changed = false;
    for (TableEntry& e : table_) {
      if (e.status == Transfer::Transferred) continue;
      // Instantiate the variables that are fixed in A1.
      Assignment fixed;
      for (const VarName& x : vars(*e.formula)) {
        const Interval itv = a1_->project(x);
        if (itv.is_singleton()) fixed[x] = itv.lo().value();
      }
      const FormulaPtr inst = substitute_fixed(e.formula, fixed);
      if (a2_->supports(*inst) && vars_known_by_a2(*inst)) {
        join_into_a2(inst, /*relaxed=*/false);
        e.status = Transfer::Transferred;
        changed = true;
        continue;
      }
      // Over-approximate away one still-free variable that A2 does not know.
      BoundMap lb, ub;
      for (const VarName& x : vars(*inst)) {
        if (a2_->knows_var(x)) continue;
        const Interval itv = a1_->project(x);
        lb.emplace(x, itv.lo());
        ub.emplace(x, itv.hi());
      }
      if (lb.empty()) continue;
      const auto relaxed = relax(*inst, lb, ub);
      if (!relaxed || !a2_->supports(**relaxed) || !vars_known_by_a2(**relaxed)) continue;
      if (!logged(**relaxed)) {
        join_into_a2(*relaxed, /*relaxed=*/true);
        changed = true;  // formula stays pending: not yet fully accounted for
      }
    }
    return changed;
  }

  void join_into_a2(const FormulaPtr& f, bool relaxed) {
    const InterpretResult r = a2_->interpret(*f);
    if (r != InterpretResult::Ok)
      throw std::logic_error("transfer target rejected a supported formula");
    log_.push_back(LogEntry{f, relaxed});
  }

  bool vars_known_by_a2(const Formula& f) const {
    for (const VarName& x : vars(f))
      if (!a2_->knows_var(x)) return false;
    return true;
  }

  TableEntry* find_entry(const Formula& f) {
    for (TableEntry& e : table_)
      if (structural_equal(*e.formula, f)) return &e;
    return nullptr;
  }
  const TableEntry* find_entry(const Formula& f) const {
    return const_cast<DelayedProduct*>(this)->find_entry(f);
  }

  bool logged(const Formula& f) const {
    for (const LogEntry& e : log_)
      if (structural_equal(*e.formula, f)) return true;
    return false;
  }

  static constexpr std::size_t kMaxRounds = 10000;

  ElementPtr a1_, a2_;
  std::vector<TableEntry> table_;
  std::vector<LogEntry> log_;
};

}  // namespace codom
