#pragma once

#include <algorithm>
#include <map>
#include <optional>

#include "codom/element.hpp"

namespace codom {

namespace detail {

// x rel b with b a variable-free expression, mirror shapes normalized.
struct UnaryBound {
  VarName var;
  Rel rel;
  std::int64_t bound;
};

inline Rel mirror_rel(Rel r) {
  switch (r) {
    case Rel::Le: return Rel::Ge;
    case Rel::Lt: return Rel::Gt;
    case Rel::Ge: return Rel::Le;
    case Rel::Gt: return Rel::Lt;
    default: return r;  // Eq/Neq are symmetric
  }
}

inline std::optional<UnaryBound> as_unary_bound(const Atom& a) {
  if (a.rel == Rel::Neq) return std::nullopt;  // not a single interval
  const auto* lv = std::get_if<VarName>(&a.left->node());
  const auto* rv = std::get_if<VarName>(&a.right->node());
  if (lv != nullptr) {
    if (auto c = fold_constant(*a.right)) return UnaryBound{*lv, a.rel, *c};
  } else if (rv != nullptr) {
    if (auto c = fold_constant(*a.left)) return UnaryBound{*rv, mirror_rel(a.rel), *c};
  }
  return std::nullopt;
}

// Interval denoted by the bound; strict inequalities tighten by one.
inline Interval bound_interval(const UnaryBound& b) {
  switch (b.rel) {
    case Rel::Le: return Interval::at_most(ExtInt(b.bound));
    case Rel::Lt: return Interval::at_most(ExtInt(b.bound) - ExtInt(1));
    case Rel::Ge: return Interval::at_least(ExtInt(b.bound));
    case Rel::Gt: return Interval::at_least(ExtInt(b.bound) + ExtInt(1));
    case Rel::Eq: return Interval::singleton(b.bound);
    default: return Interval::full();
  }
}

}  // namespace detail

/// Box abstract domain: a partial map from variable names to intervals.
/// An absent variable is the unconstrained interval. Interpretation covers
/// x <= b, x < b, x >= b, x > b, x = b and conjunctions of those; the
/// interpretation is exact, so closure is the identity.
class Box final : public Element {
 public:
  Box() = default;

  static Box of(std::initializer_list<std::pair<VarName, Interval>> init) {
    Box b;
    for (auto& [name, itv] : init) b.env_[name] = itv;
    return b;
  }

  const std::map<VarName, Interval>& env() const { return env_; }

  /// Registers x (at the unconstrained interval) if absent.
  void register_var(const VarName& x) { env_.try_emplace(x, Interval::full()); }

  std::unique_ptr<Element> clone() const override { return std::make_unique<Box>(*this); }

  bool supports(const Formula& f) const override {
    const Formula& g = strip_annotations(f);
    if (const auto* a = std::get_if<Atom>(&g.node()))
      return detail::as_unary_bound(*a).has_value();
    if (const auto* c = std::get_if<Formula::AndF>(&g.node()))
      return supports(*c->l) && supports(*c->r);
    return false;
  }

  InterpretResult interpret(const Formula& f) override {
    const Formula& g = strip_annotations(f);
    if (const auto* a = std::get_if<Atom>(&g.node())) {
      auto b = detail::as_unary_bound(*a);
      if (!b) return InterpretResult::NotSupported;
      join_var(b->var, detail::bound_interval(*b));
      return InterpretResult::Ok;
    }
    if (const auto* c = std::get_if<Formula::AndF>(&g.node())) {
      if (!supports(*c->l) || !supports(*c->r)) return InterpretResult::NotSupported;
      interpret(*c->l);
      interpret(*c->r);
      return InterpretResult::Ok;
    }
    return InterpretResult::NotSupported;
  }

  bool closure() override { return false; }

  Kleene state() override {
    for (const auto& [_, itv] : env_)
      if (itv.is_empty()) return Kleene::False;
    return Kleene::True;
  }

  /// Bound-split on the non-singleton variable of smallest width (ties by
  /// name): [x = l] first, then [x > l]. Empty when all intervals are
  /// singletons.
  std::vector<ElementPtr> split() const override {
    const VarName* best = nullptr;
    ExtInt best_width;
    for (const auto& [name, itv] : env_) {
      if (itv.is_empty() || itv.is_singleton()) continue;
      const ExtInt w = itv.width();
      if (best == nullptr || w < best_width) {
        best = &name;
        best_width = w;
      }
    }
    if (best == nullptr) return {};
    const Interval itv = env_.at(*best);
    if (!itv.lo().is_finite())
      throw SearchError("split on variable with infinite lower bound: " + *best);
    const std::int64_t l = itv.lo().value();
    auto left = std::make_unique<Box>(*this);
    left->join_var(*best, Interval::singleton(l));
    auto right = std::make_unique<Box>(*this);
    right->join_var(*best, Interval::at_least(ExtInt(l) + ExtInt(1)));
    std::vector<ElementPtr> out;
    out.push_back(std::move(left));
    out.push_back(std::move(right));
    return out;
  }

  Interval project(const VarName& x) const override {
    auto it = env_.find(x);
    return it == env_.end() ? Interval::full() : it->second;
  }

  bool knows_var(const VarName& x) const override { return env_.count(x) > 0; }

  void collect_element_vars(VarSet& out) const override {
    for (const auto& [name, _] : env_) out.insert(name);
  }

  bool embed(const VarName& x, const Interval& hull) override {
    if (!knows_var(x)) return false;
    return join_var(x, hull);
  }

  bool join_from(const Element& other) override {
    const auto& o = dynamic_cast<const Box&>(other);
    bool changed = false;
    for (const auto& [name, itv] : o.env_) {
      auto [it, inserted] = env_.try_emplace(name, itv);
      if (inserted) {
        changed = true;
      } else {
        const Interval joined = join(it->second, itv);
        if (!(joined == it->second)) {
          it->second = joined;
          changed = true;
        }
      }
    }
    return changed;
  }

  bool leq(const Element& other) const override {
    const auto& o = dynamic_cast<const Box&>(other);
    for (const auto& [name, itv] : env_)
      if (!codom::leq(itv, o.project(name))) return false;
    for (const auto& [name, itv] : o.env_)
      if (!codom::leq(project(name), itv)) return false;
    return true;
  }

  bool equals(const Element& other) const override {
    const auto& o = dynamic_cast<const Box&>(other);
    return env_ == o.env_;
  }

  bool gamma_contains(const Assignment& point) const override {
    for (const auto& [name, itv] : env_) {
      auto it = point.find(name);
      if (it == point.end() || !itv.contains(it->second)) return false;
    }
    return true;
  }

  std::string str() const override {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, itv] : env_) {
      if (!first) out += ", ";
      first = false;
      out += name + " -> " + itv.str();
    }
    return out + "}";
  }

 private:
  bool join_var(const VarName& x, const Interval& itv) {
    auto [it, inserted] = env_.try_emplace(x, itv);
    if (inserted) return true;
    const Interval joined = join(it->second, itv);
    if (joined == it->second) return false;
    it->second = joined;
    return true;
  }

  std::map<VarName, Interval> env_;
};

}  // namespace codom
