#pragma once

#include <deque>

#include "codom/element.hpp"
#include "codom/hc4.hpp"

namespace codom {

/// A propagator implements inference for one arithmetic atom. Its transition
/// function is one HC4-revise pass over the underlying element (extensive and
/// sound); the fixpoint loop lives in the completion's closure.
struct Propagator {
  Atom atom;
  VarSet reacts_on;  // wakes when any of these changed its hull

  explicit Propagator(Atom a) : atom(std::move(a)), reacts_on(vars(atom)) {}

  hc4::ReviseResult apply(Element& el) const { return hc4::revise(el, atom); }
  Kleene state_of(const Element& el) const { return hc4::entail(el, atom); }
};

/// Interval propagators completion IPC(A): pairs a projecting domain with a
/// set of propagators compiled from arbitrary arithmetic atoms. The element
/// order is (a, P) <= (a', P') iff a <= a' and P is a subset of P'.
///
/// The completion's closure runs the propagators to a fixpoint but does not
/// invoke the underlying domain's own closure; compositions that need it
/// (e.g. an octagon coordinate) declare the sub-domain separately in a shared
/// product.
class Ipc final : public Element {
 public:
  explicit Ipc(ElementPtr base) : base_(std::move(base)) {}

  Ipc(const Ipc& o) : base_(o.base_->clone()), props_(o.props_) {}
  Ipc& operator=(const Ipc&) = delete;

  const Element& base() const { return *base_; }
  Element& base() { return *base_; }
  const std::vector<Propagator>& propagators() const { return props_; }

  std::unique_ptr<Element> clone() const override { return std::make_unique<Ipc>(*this); }

  bool supports(const Formula& f) const override {
    return strip_annotations(f).is_atom();
  }

  InterpretResult interpret(const Formula& f) override {
    const Formula& g = strip_annotations(f);
    const auto* a = std::get_if<Atom>(&g.node());
    if (a == nullptr) return InterpretResult::NotSupported;
    for (const VarName& x : vars(*a))
      if (!base_->knows_var(x)) return InterpretResult::UnregisteredVariable;
    for (const Propagator& p : props_)
      if (structural_equal(p.atom, *a)) return InterpretResult::Ok;
    props_.emplace_back(*a);
    return InterpretResult::Ok;
  }

  /// Round-robin worklist keyed on changed variable hulls; any fixpoint of
  /// the propagator set is acceptable.
  bool closure() override {
    bool any = false;
    std::deque<std::size_t> queue;
    std::vector<bool> queued(props_.size(), true);
    for (std::size_t i = 0; i < props_.size(); ++i) queue.push_back(i);
    std::size_t steps = 0;
    while (!queue.empty()) {
      if (++steps > kMaxSteps) break;  // sound: stopping early only weakens pruning
      const std::size_t i = queue.front();
      queue.pop_front();
      queued[i] = false;
      const hc4::ReviseResult res = props_[i].apply(*base_);
      if (res.failed) return any || !res.changed.empty();
      if (res.changed.empty()) continue;
      any = true;
      for (std::size_t j = 0; j < props_.size(); ++j) {
        if (queued[j]) continue;
        for (const VarName& x : res.changed) {
          if (props_[j].reacts_on.count(x)) {
            queue.push_back(j);
            queued[j] = true;
            break;
          }
        }
      }
    }
    return any;
  }

  Kleene state() override {
    Kleene st = base_->state();
    for (const Propagator& p : props_) {
      st = kleene_and(st, p.state_of(*base_));
      if (st == Kleene::False) return st;
    }
    return st;
  }

  std::vector<ElementPtr> split() const override {
    std::vector<ElementPtr> out;
    for (auto& b : base_->split()) {
      auto e = std::make_unique<Ipc>(std::move(b));
      e->props_ = props_;
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
    const auto& o = dynamic_cast<const Ipc&>(other);
    bool changed = base_->join_from(*o.base_);
    for (const Propagator& p : o.props_) {
      bool found = false;
      for (const Propagator& mine : props_)
        if (structural_equal(mine.atom, p.atom)) {
          found = true;
          break;
        }
      if (!found) {
        props_.push_back(p);
        changed = true;
      }
    }
    return changed;
  }

  bool leq(const Element& other) const override {
    const auto& o = dynamic_cast<const Ipc&>(other);
    return base_->leq(*o.base_) && leq_props(o);
  }

  bool equals(const Element& other) const override {
    const auto& o = dynamic_cast<const Ipc&>(other);
    return base_->equals(*o.base_) && props_.size() == o.props_.size() && leq_props(o);
  }

  bool gamma_contains(const Assignment& point) const override {
    if (!base_->gamma_contains(point)) return false;
    for (const Propagator& p : props_)
      if (!evaluate(p.atom, point)) return false;
    return true;
  }

  std::size_t child_count() const override { return 1; }
  Element* child(std::size_t i) override { return i == 0 ? base_.get() : nullptr; }
  const Element* child(std::size_t i) const override {
    return i == 0 ? base_.get() : nullptr;
  }

  std::string str() const override {
    return "ipc(" + base_->str() + ", " + std::to_string(props_.size()) + " props)";
  }

 private:
  bool leq_props(const Ipc& o) const {
    for (const Propagator& p : props_) {
      bool found = false;
      for (const Propagator& theirs : o.props_)
        if (structural_equal(theirs.atom, p.atom)) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  }

  static constexpr std::size_t kMaxSteps = 200000;

  ElementPtr base_;
  std::vector<Propagator> props_;
};

}  // namespace codom
