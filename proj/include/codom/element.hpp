#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "codom/formula.hpp"
#include "codom/interval.hpp"
#include "codom/kleene.hpp"

namespace codom {

/// Outcome of the partial interpretation function. NotSupported means the
/// formula is outside the element's constraint language, which is distinct
/// from inconsistency (inconsistency shows up through state()).
enum class InterpretResult {
  Ok,
  NotSupported,
  AmbiguousTarget,
  MissingAnnotation,
  UnknownComponent,
  UnregisteredVariable,
};

inline std::string to_string(InterpretResult r) {
  switch (r) {
    case InterpretResult::Ok: return "ok";
    case InterpretResult::NotSupported: return "not-supported";
    case InterpretResult::AmbiguousTarget: return "ambiguous-target";
    case InterpretResult::MissingAnnotation: return "missing-annotation";
    case InterpretResult::UnknownComponent: return "unknown-component";
    case InterpretResult::UnregisteredVariable: return "unregistered-variable";
  }
  return "?";
}

/// Abstract-domain element. Every domain and domain transformer implements
/// this contract:
///   - interpret is partial; closure is extensive and never loses a solution;
///   - split produces finitely many sub-elements covering the element;
///   - project over-approximates the set of values of one variable;
///   - embed joins a single-variable hull into every part that already knows
///     the variable, and leaves the rest untouched.
/// Elements are values: branching clones them, nothing is shared between
/// branches.
class Element {
 public:
  virtual ~Element() = default;

  virtual std::unique_ptr<Element> clone() const = 0;

  /// True when the formula lies in this element's constraint language
  /// (syntactic check; no mutation).
  virtual bool supports(const Formula& f) const = 0;

  virtual InterpretResult interpret(const Formula& f) = 0;

  /// Removes inconsistent values; returns true when anything tightened.
  virtual bool closure() = 0;

  /// May normalize internal state (e.g. close a matrix) before answering.
  virtual Kleene state() = 0;

  virtual std::vector<std::unique_ptr<Element>> split() const = 0;

  virtual Interval project(const VarName& x) const = 0;

  virtual bool knows_var(const VarName& x) const = 0;

  virtual void collect_element_vars(VarSet& out) const = 0;

  /// Joins [hull] on x if x is registered here; products forward to each
  /// coordinate. Returns true when the element changed.
  virtual bool embed(const VarName& x, const Interval& hull) = 0;

  /// Join with an element of the same dynamic type; returns true on change.
  virtual bool join_from(const Element& other) = 0;

  /// Lattice order: *this <= other iff gamma(*this) contains gamma(other).
  virtual bool leq(const Element& other) const = 0;

  virtual bool equals(const Element& other) const = 0;

  /// Membership in the concretization; the point must cover the element's
  /// variables. Used by tests and post-hoc verification only.
  virtual bool gamma_contains(const Assignment& point) const = 0;

  /// Sub-elements a transformer exposes for dependency wiring.
  virtual std::size_t child_count() const { return 0; }
  virtual Element* child(std::size_t) { return nullptr; }
  virtual const Element* child(std::size_t) const { return nullptr; }

  virtual std::string str() const = 0;

  VarSet element_vars() const {
    VarSet out;
    collect_element_vars(out);
    return out;
  }
};

using ElementPtr = std::unique_ptr<Element>;

}  // namespace codom
