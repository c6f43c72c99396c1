#pragma once

#include "codom/element.hpp"

namespace codom {

/// Direct product: every operation is coordinatewise. Interpretation routes
/// by 1-based index annotation; an unannotated formula must be supported by
/// exactly one coordinate.
class DirectProduct final : public Element {
 public:
  explicit DirectProduct(std::vector<ElementPtr> comps) : comps_(std::move(comps)) {}

  DirectProduct(const DirectProduct& o) {
    comps_.reserve(o.comps_.size());
    for (const auto& c : o.comps_) comps_.push_back(c->clone());
  }
  DirectProduct& operator=(const DirectProduct&) = delete;

  std::size_t size() const { return comps_.size(); }
  Element& component(std::size_t i) { return *comps_[i]; }
  const Element& component(std::size_t i) const { return *comps_[i]; }

  std::unique_ptr<Element> clone() const override {
    return std::make_unique<DirectProduct>(*this);
  }

  bool supports(const Formula& f) const override {
    if (const auto* a = std::get_if<Formula::AnnotatedF>(&f.node())) {
      if (const int* idx = std::get_if<int>(&a->target))
        return *idx >= 1 && static_cast<std::size_t>(*idx) <= comps_.size() &&
               comps_[*idx - 1]->supports(*a->sub);
      return false;
    }
    return count_supporters(f) == 1;
  }

  InterpretResult interpret(const Formula& f) override {
    if (const auto* a = std::get_if<Formula::AnnotatedF>(&f.node())) {
      const int* idx = std::get_if<int>(&a->target);
      if (idx == nullptr) return InterpretResult::NotSupported;
      if (*idx < 1 || static_cast<std::size_t>(*idx) > comps_.size())
        return InterpretResult::UnknownComponent;
      return comps_[*idx - 1]->interpret(*a->sub);
    }
    const std::size_t n = count_supporters(f);
    if (n == 0) return InterpretResult::NotSupported;
    if (n > 1) return InterpretResult::AmbiguousTarget;
    for (auto& c : comps_)
      if (c->supports(f)) return c->interpret(f);
    return InterpretResult::NotSupported;
  }

  /// Coordinatewise; components do not exchange information here.
  bool closure() override {
    bool changed = false;
    for (auto& c : comps_) changed |= c->closure();
    return changed;
  }

  Kleene state() override {
    Kleene st = Kleene::True;
    for (auto& c : comps_) {
      st = kleene_and(st, c->state());
      if (st == Kleene::False) return st;
    }
    // Components may be consistent alone yet contradict each other on a
    // shared variable; an empty joint projection denotes the empty set.
    VarSet vs;
    collect_element_vars(vs);
    for (const VarName& x : vs)
      if (project(x).is_empty()) return Kleene::False;
    return st;
  }

  std::vector<ElementPtr> split() const override {
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      auto branches = comps_[i]->split();
      if (branches.empty()) continue;
      std::vector<ElementPtr> out;
      for (auto& b : branches) {
        auto prod = std::make_unique<DirectProduct>(*this);
        prod->comps_[i] = std::move(b);
        out.push_back(std::move(prod));
      }
      return out;
    }
    return {};
  }

  Interval project(const VarName& x) const override {
    Interval itv = Interval::full();
    for (const auto& c : comps_) itv = join(itv, c->project(x));
    return itv;
  }

  bool knows_var(const VarName& x) const override {
    for (const auto& c : comps_)
      if (c->knows_var(x)) return true;
    return false;
  }

  void collect_element_vars(VarSet& out) const override {
    for (const auto& c : comps_) c->collect_element_vars(out);
  }

  bool embed(const VarName& x, const Interval& hull) override {
    bool changed = false;
    for (auto& c : comps_) changed |= c->embed(x, hull);
    return changed;
  }

  bool join_from(const Element& other) override {
    const auto& o = dynamic_cast<const DirectProduct&>(other);
    bool changed = false;
    for (std::size_t i = 0; i < comps_.size(); ++i)
      changed |= comps_[i]->join_from(*o.comps_[i]);
    return changed;
  }

  bool leq(const Element& other) const override {
    const auto& o = dynamic_cast<const DirectProduct&>(other);
    for (std::size_t i = 0; i < comps_.size(); ++i)
      if (!comps_[i]->leq(*o.comps_[i])) return false;
    return true;
  }

  bool equals(const Element& other) const override {
    const auto& o = dynamic_cast<const DirectProduct&>(other);
    if (comps_.size() != o.comps_.size()) return false;
    for (std::size_t i = 0; i < comps_.size(); ++i)
      if (!comps_[i]->equals(*o.comps_[i])) return false;
    return true;
  }

  bool gamma_contains(const Assignment& point) const override {
    for (const auto& c : comps_)
      if (!c->gamma_contains(point)) return false;
    return true;
  }

  std::size_t child_count() const override { return comps_.size(); }
  Element* child(std::size_t i) override {
    return i < comps_.size() ? comps_[i].get() : nullptr;
  }
  const Element* child(std::size_t i) const override {
    return i < comps_.size() ? comps_[i].get() : nullptr;
  }

  std::string str() const override {
    std::string out = "(";
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      if (i > 0) out += " x ";
      out += comps_[i]->str();
    }
    return out + ")";
  }

 private:
  std::size_t count_supporters(const Formula& f) const {
    std::size_t n = 0;
    for (const auto& c : comps_)
      if (c->supports(f)) ++n;
    return n;
  }

  std::vector<ElementPtr> comps_;
};

}  // namespace codom
