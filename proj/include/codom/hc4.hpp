#pragma once

#include <map>

#include "codom/element.hpp"

namespace codom {
namespace hc4 {

/// Forward hull of an expression under the element's projections.
inline Interval forward(const Expr& e, const Element& el) {
  if (auto* c = std::get_if<std::int64_t>(&e.node())) return Interval::singleton(*c);
  if (auto* v = std::get_if<VarName>(&e.node())) return el.project(*v);
  if (auto* n = std::get_if<Expr::Neg>(&e.node())) {
    const Interval s = forward(*n->sub, el);
    return s.is_empty() ? s : interval_neg(s);
  }
  const auto& b = std::get<Expr::Bin>(e.node());
  const Interval l = forward(*b.left, el), r = forward(*b.right, el);
  if (l.is_empty() || r.is_empty()) return Interval::empty();
  return interval_arith(b.op, l, r);
}

/// Hull entailment of an atom: True when every point of the element's hull
/// satisfies it, False when none does, Unknown otherwise.
inline Kleene entail(const Element& el, const Atom& a) {
  const Interval l = forward(*a.left, el), r = forward(*a.right, el);
  if (l.is_empty() || r.is_empty()) return Kleene::False;
  switch (a.rel) {
    case Rel::Le:
      if (l.hi() <= r.lo()) return Kleene::True;
      if (l.lo() > r.hi()) return Kleene::False;
      return Kleene::Unknown;
    case Rel::Lt:
      if (l.hi() < r.lo()) return Kleene::True;
      if (l.lo() >= r.hi()) return Kleene::False;
      return Kleene::Unknown;
    case Rel::Ge:
      if (l.lo() >= r.hi()) return Kleene::True;
      if (l.hi() < r.lo()) return Kleene::False;
      return Kleene::Unknown;
    case Rel::Gt:
      if (l.lo() > r.hi()) return Kleene::True;
      if (l.hi() <= r.lo()) return Kleene::False;
      return Kleene::Unknown;
    case Rel::Eq:
      if (l.is_singleton() && r.is_singleton() && l.lo() == r.lo()) return Kleene::True;
      if (l.hi() < r.lo() || r.hi() < l.lo()) return Kleene::False;
      return Kleene::Unknown;
    case Rel::Neq:
      if (l.hi() < r.lo() || r.hi() < l.lo()) return Kleene::True;
      if (l.is_singleton() && r.is_singleton() && l.lo() == r.lo()) return Kleene::False;
      return Kleene::Unknown;
  }
  return Kleene::Unknown;
}

struct ReviseResult {
  VarSet changed;  // variables whose projection tightened
  bool failed = false;
};

namespace detail {

inline void backward(const Expr& e, const Interval& target, const Element& el,
                     std::map<VarName, Interval>& tight, bool& failed) {
  if (failed) return;
  if (auto* c = std::get_if<std::int64_t>(&e.node())) {
    if (!target.contains(*c)) failed = true;
    return;
  }
  if (auto* v = std::get_if<VarName>(&e.node())) {
    auto [it, inserted] = tight.try_emplace(*v, join(el.project(*v), target));
    if (!inserted) it->second = join(it->second, target);
    if (it->second.is_empty()) failed = true;
    return;
  }
  if (auto* n = std::get_if<Expr::Neg>(&e.node())) {
    const Interval sub = forward(*n->sub, el);
    backward(*n->sub, join(sub, interval_neg(target)), el, tight, failed);
    return;
  }
  const auto& b = std::get<Expr::Bin>(e.node());
  const Interval l = forward(*b.left, el), r = forward(*b.right, el);
  if (l.is_empty() || r.is_empty()) {
    failed = true;
    return;
  }
  const Interval nl = join(l, interval_inv_narrow(b.op, target, r, Side::Left));
  const Interval nr = join(r, interval_inv_narrow(b.op, target, l, Side::Right));
  if (nl.is_empty() || nr.is_empty()) {
    failed = true;
    return;
  }
  backward(*b.left, nl, el, tight, failed);
  backward(*b.right, nr, el, tight, failed);
}

}  // namespace detail

/// One HC4-revise pass for an atom: forward evaluation, relational narrowing
/// at the root, backward narrowing down both expression trees, and embedding
/// of the tightened variable hulls. Extensive and sound: no integer solution
/// of the atom is removed.
inline ReviseResult revise(Element& el, const Atom& a) {
  ReviseResult res;
  const Interval l = forward(*a.left, el), r = forward(*a.right, el);
  if (l.is_empty() || r.is_empty()) {
    res.failed = true;
  } else {
    Interval nl = l, nr = r;
    switch (a.rel) {
      case Rel::Le:
        nl = join(l, Interval::at_most(r.hi()));
        nr = join(r, Interval::at_least(l.lo()));
        break;
      case Rel::Lt:
        nl = join(l, Interval::at_most(r.hi() - ExtInt(1)));
        nr = join(r, Interval::at_least(l.lo() + ExtInt(1)));
        break;
      case Rel::Ge:
        nl = join(l, Interval::at_least(r.lo()));
        nr = join(r, Interval::at_most(l.hi()));
        break;
      case Rel::Gt:
        nl = join(l, Interval::at_least(r.lo() + ExtInt(1)));
        nr = join(r, Interval::at_most(l.hi() - ExtInt(1)));
        break;
      case Rel::Eq:
        nl = nr = join(l, r);
        break;
      case Rel::Neq:
        // Only narrows a hull endpoint against a singleton other side.
        if (r.is_singleton()) {
          if (l.lo() == r.lo()) nl = join(nl, Interval::at_least(r.lo() + ExtInt(1)));
          if (l.hi() == r.lo()) nl = join(nl, Interval::at_most(r.lo() - ExtInt(1)));
        }
        if (l.is_singleton()) {
          if (r.lo() == l.lo()) nr = join(nr, Interval::at_least(l.lo() + ExtInt(1)));
          if (r.hi() == l.lo()) nr = join(nr, Interval::at_most(l.lo() - ExtInt(1)));
        }
        break;
    }
    if (nl.is_empty() || nr.is_empty()) {
      res.failed = true;
    } else {
      std::map<VarName, Interval> tight;
      detail::backward(*a.left, nl, el, tight, res.failed);
      detail::backward(*a.right, nr, el, tight, res.failed);
      if (!res.failed) {
        for (const auto& [x, hull] : tight)
          if (el.embed(x, hull)) res.changed.insert(x);
      }
    }
  }
  if (res.failed) {
    // Decisive: empty one variable hull so the element itself reports False.
    const VarSet vs = vars(a);
    if (!vs.empty() && el.embed(*vs.begin(), Interval::empty()))
      res.changed.insert(*vs.begin());
  }
  return res;
}

}  // namespace hc4
}  // namespace codom
