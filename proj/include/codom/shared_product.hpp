#pragma once

#include "codom/box.hpp"
#include "codom/delayed_product.hpp"
#include "codom/direct_product.hpp"
#include "codom/element.hpp"
#include "codom/ipc.hpp"
#include "codom/logic.hpp"
#include "codom/octagon.hpp"

namespace codom {

// ---------------------------------------------------------------------------
// Domain kinds and declarations
// ---------------------------------------------------------------------------

/// Shape of a domain composition; used to build bottom elements and to check
/// dependency declarations.
struct DomainKind {
  enum class Tag { Box, Oct, Logic, Ipc, Delayed, Product };
  Tag tag;
  std::vector<DomainKind> subs;

  static DomainKind box() { return {Tag::Box, {}}; }
  static DomainKind oct() { return {Tag::Oct, {}}; }
  static DomainKind logic(DomainKind base) { return {Tag::Logic, {std::move(base)}}; }
  static DomainKind ipc(DomainKind base) { return {Tag::Ipc, {std::move(base)}}; }
  static DomainKind delayed(DomainKind a1, DomainKind a2) {
    return {Tag::Delayed, {std::move(a1), std::move(a2)}};
  }
  static DomainKind product(std::vector<DomainKind> coords) {
    return {Tag::Product, std::move(coords)};
  }

  bool operator==(const DomainKind& o) const {
    return tag == o.tag && subs == o.subs;
  }

  /// Number of dependency slots a declaration must fill.
  std::size_t slot_count() const {
    switch (tag) {
      case Tag::Box:
      case Tag::Oct: return 0;
      case Tag::Logic:
      case Tag::Ipc: return 1;
      case Tag::Delayed: return 2;
      case Tag::Product: return subs.size();
    }
    return 0;
  }

  std::string str() const {
    switch (tag) {
      case Tag::Box: return "box";
      case Tag::Oct: return "oct";
      case Tag::Logic: return "L(" + subs[0].str() + ")";
      case Tag::Ipc: return "IPC(" + subs[0].str() + ")";
      case Tag::Delayed: return "DP(" + subs[0].str() + ", " + subs[1].str() + ")";
      case Tag::Product: {
        std::string out;
        for (std::size_t i = 0; i < subs.size(); ++i) {
          if (i > 0) out += " x ";
          out += subs[i].str();
        }
        return out;
      }
    }
    return "?";
  }
};

inline ElementPtr make_bottom(const DomainKind& k) {
  switch (k.tag) {
    case DomainKind::Tag::Box: return std::make_unique<Box>();
    case DomainKind::Tag::Oct: return std::make_unique<Octagon>();
    case DomainKind::Tag::Logic:
      return std::make_unique<LogicCompletion>(make_bottom(k.subs[0]));
    case DomainKind::Tag::Ipc: return std::make_unique<Ipc>(make_bottom(k.subs[0]));
    case DomainKind::Tag::Delayed:
      return std::make_unique<DelayedProduct>(make_bottom(k.subs[0]),
                                              make_bottom(k.subs[1]));
    case DomainKind::Tag::Product: {
      std::vector<ElementPtr> coords;
      for (const DomainKind& s : k.subs) coords.push_back(make_bottom(s));
      return std::make_unique<DirectProduct>(std::move(coords));
    }
  }
  return nullptr;
}

/// Dependency argument of a declaration: an unnamed bottom, the name of an
/// earlier component, or a tuple descending into the sub-domain structure.
struct DepArg {
  enum class Tag { None, Name, Tuple };
  Tag tag = Tag::None;
  std::string name;
  std::vector<DepArg> subs;

  static DepArg none() { return {}; }
  static DepArg named(std::string n) { return {Tag::Name, std::move(n), {}}; }
  static DepArg tuple(std::vector<DepArg> s) { return {Tag::Tuple, {}, std::move(s)}; }
};

struct SharedDecl {
  std::string name;
  DomainKind kind;
  std::vector<DepArg> args;
};

// ---------------------------------------------------------------------------
// Shared product
// ---------------------------------------------------------------------------

/// Direct product with named components and dependency sharing. Dependencies
/// are exchanged through the reduction rho: each component's dependency view
/// is joined into the named element and refreshed from it, iterated to a
/// fixpoint; the shared sub-elements and all their views end up equal.
/// The closure interleaves component closures with the reduction.
class SharedProduct final : public Element {
 public:
  struct DepBinding {
    std::vector<std::size_t> path;  // child indices inside the component
    std::size_t target;             // index of the named dependency
  };

  /// shared_build: validates the declaration list and wires dependencies.
  /// Every dependency must name an earlier declaration of the same kind.
  static SharedProduct build(const std::vector<SharedDecl>& decls) {
    SharedProduct sp;
    for (const SharedDecl& d : decls) {
      if (sp.index_.count(d.name))
        throw BuildError(BuildError::Code::DuplicateName,
                         "component '" + d.name + "' declared twice");
      if (d.args.size() != d.kind.slot_count())
        throw BuildError(BuildError::Code::ArityMismatch,
                         "component '" + d.name + "' expects " +
                             std::to_string(d.kind.slot_count()) + " dependencies, got " +
                             std::to_string(d.args.size()));
      Comp comp;
      comp.name = d.name;
      comp.kind = d.kind;
      comp.elem = make_bottom(d.kind);
      for (std::size_t s = 0; s < d.args.size(); ++s)
        sp.match_arg(decls, d, d.args[s], d.kind.subs[s], {s}, comp.bindings);
      sp.index_.emplace(d.name, sp.comps_.size());
      sp.comps_.push_back(std::move(comp));
    }
    return sp;
  }

  std::size_t size() const { return comps_.size(); }
  const std::string& name_of(std::size_t i) const { return comps_[i].name; }
  bool has_component(const std::string& name) const { return index_.count(name) > 0; }
  Element& component(const std::string& name) { return *comps_[index_.at(name)].elem; }
  const Element& component(const std::string& name) const {
    return *comps_[index_.at(name)].elem;
  }

  std::unique_ptr<Element> clone() const override {
    return std::make_unique<SharedProduct>(*this);
  }

  SharedProduct(const SharedProduct& o) : index_(o.index_) {
    comps_.reserve(o.comps_.size());
    for (const Comp& c : o.comps_)
      comps_.push_back(Comp{c.name, c.kind, c.elem->clone(), c.bindings});
  }
  SharedProduct& operator=(const SharedProduct&) = delete;

  bool supports(const Formula& f) const override {
    const auto* a = std::get_if<Formula::AnnotatedF>(&f.node());
    if (a == nullptr) return false;
    const std::string* name = std::get_if<std::string>(&a->target);
    if (name == nullptr || !has_component(*name)) return false;
    return component(*name).supports(*a->sub);
  }

  /// Routes by name annotation; unannotated formulas are an error here.
  InterpretResult interpret(const Formula& f) override {
    const auto* a = std::get_if<Formula::AnnotatedF>(&f.node());
    if (a == nullptr) return InterpretResult::MissingAnnotation;
    const std::string* name = std::get_if<std::string>(&a->target);
    if (name == nullptr) return InterpretResult::MissingAnnotation;
    auto it = index_.find(*name);
    if (it == index_.end()) return InterpretResult::UnknownComponent;
    return comps_[it->second].elem->interpret(*a->sub);
  }

  /// Fixpoint of the reduction rho_1 ... rho_n alone.
  bool rho_reduce() {
    bool any = false;
    for (std::size_t round = 0; round < kMaxRounds; ++round) {
      bool changed = false;
      for (Comp& c : comps_) {
        for (const DepBinding& b : c.bindings) {
          Element* view = at_path(*c.elem, b.path);
          Element& dep = *comps_[b.target].elem;
          changed |= dep.join_from(*view);  // pi: dependency absorbs the view
          changed |= view->join_from(dep);  // kappa: view refreshed from it
        }
      }
      if (!changed) break;
      any = true;
    }
    return any;
  }

  bool closure() override {
    bool any = false;
    for (std::size_t round = 0; round < kMaxRounds; ++round) {
      bool changed = false;
      for (Comp& c : comps_) changed |= c.elem->closure();
      changed |= rho_reduce();
      if (!changed) break;
      any = true;
    }
    return any;
  }

  Kleene state() override {
    Kleene st = Kleene::True;
    for (Comp& c : comps_) {
      st = kleene_and(st, c.elem->state());
      if (st == Kleene::False) return st;
    }
    // Named components may contradict each other on a shared variable.
    VarSet vs;
    collect_element_vars(vs);
    for (const VarName& x : vs)
      if (project(x).is_empty()) return Kleene::False;
    return st;
  }

  /// The product defines no split of its own; branching is normally driven
  /// by a search strategy. Delegates to the first component that splits.
  std::vector<ElementPtr> split() const override {
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      auto branches = comps_[i].elem->split();
      if (branches.empty()) continue;
      std::vector<ElementPtr> out;
      for (auto& b : branches) {
        auto sp = std::make_unique<SharedProduct>(*this);
        sp->comps_[i].elem = std::move(b);
        out.push_back(std::move(sp));
      }
      return out;
    }
    return {};
  }

  Interval project(const VarName& x) const override {
    Interval itv = Interval::full();
    for (const Comp& c : comps_) itv = join(itv, c.elem->project(x));
    return itv;
  }

  bool knows_var(const VarName& x) const override {
    for (const Comp& c : comps_)
      if (c.elem->knows_var(x)) return true;
    return false;
  }

  void collect_element_vars(VarSet& out) const override {
    for (const Comp& c : comps_) c.elem->collect_element_vars(out);
  }

  bool embed(const VarName& x, const Interval& hull) override {
    bool changed = false;
    for (Comp& c : comps_) changed |= c.elem->embed(x, hull);
    return changed;
  }

  bool join_from(const Element& other) override {
    const auto& o = dynamic_cast<const SharedProduct&>(other);
    bool changed = false;
    for (std::size_t i = 0; i < comps_.size(); ++i)
      changed |= comps_[i].elem->join_from(*o.comps_[i].elem);
    return changed;
  }

  bool leq(const Element& other) const override {
    const auto& o = dynamic_cast<const SharedProduct&>(other);
    for (std::size_t i = 0; i < comps_.size(); ++i)
      if (!comps_[i].elem->leq(*o.comps_[i].elem)) return false;
    return true;
  }

  bool equals(const Element& other) const override {
    const auto& o = dynamic_cast<const SharedProduct&>(other);
    if (comps_.size() != o.comps_.size()) return false;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      if (comps_[i].name != o.comps_[i].name) return false;
      if (!comps_[i].elem->equals(*o.comps_[i].elem)) return false;
    }
    return true;
  }

  bool gamma_contains(const Assignment& point) const override {
    for (const Comp& c : comps_)
      if (!c.elem->gamma_contains(point)) return false;
    return true;
  }

  std::size_t child_count() const override { return comps_.size(); }
  Element* child(std::size_t i) override {
    return i < comps_.size() ? comps_[i].elem.get() : nullptr;
  }
  const Element* child(std::size_t i) const override {
    return i < comps_.size() ? comps_[i].elem.get() : nullptr;
  }

  std::string str() const override {
    std::string out;
    for (const Comp& c : comps_) {
      if (!out.empty()) out += ";\n";
      out += c.name + " = " + c.elem->str();
    }
    return out;
  }

 private:
  struct Comp {
    std::string name;
    DomainKind kind;
    ElementPtr elem;
    std::vector<DepBinding> bindings;
  };

  SharedProduct() = default;

  static Element* at_path(Element& root, const std::vector<std::size_t>& path) {
    Element* cur = &root;
    for (std::size_t i : path) cur = cur->child(i);
    return cur;
  }

  // Matches a dependency argument against the kind found at `path` inside the
  // declared component, producing bindings. Single-child transformers are
  // transparent: both ((box, oct)) and (box, oct) reach the coordinates of a
  // product nested under a completion.
  void match_arg(const std::vector<SharedDecl>& decls, const SharedDecl& decl,
                 const DepArg& arg, const DomainKind& kind, std::vector<std::size_t> path,
                 std::vector<DepBinding>& out) {
    switch (arg.tag) {
      case DepArg::Tag::None: return;  // private bottom sub-element
      case DepArg::Tag::Name: {
        auto it = index_.find(arg.name);
        if (it == index_.end()) {
          // Declared later (forward) or not at all?
          for (const SharedDecl& d : decls)
            if (d.name == arg.name)
              throw BuildError(BuildError::Code::ForwardReference,
                               "'" + decl.name + "' depends on '" + arg.name +
                                   "' which is declared later");
          throw BuildError(BuildError::Code::UnknownDependency,
                           "'" + decl.name + "' depends on unknown '" + arg.name + "'");
        }
        const Comp& target = comps_[it->second];
        if (target.kind == kind) {
          out.push_back(DepBinding{std::move(path), it->second});
          return;
        }
        if (kind.slot_count() == 1 && kind.tag != DomainKind::Tag::Product) {
          path.push_back(0);
          match_arg(decls, decl, arg, kind.subs[0], std::move(path), out);
          return;
        }
        throw BuildError(BuildError::Code::KindMismatch,
                         "'" + decl.name + "': dependency '" + arg.name + "' has kind " +
                             target.kind.str() + ", expected " + kind.str());
      }
      case DepArg::Tag::Tuple: {
        if (kind.tag == DomainKind::Tag::Product && kind.subs.size() == arg.subs.size()) {
          for (std::size_t i = 0; i < arg.subs.size(); ++i) {
            auto sub_path = path;
            sub_path.push_back(i);
            match_arg(decls, decl, arg.subs[i], kind.subs[i], std::move(sub_path), out);
          }
          return;
        }
        if (kind.tag == DomainKind::Tag::Delayed && arg.subs.size() == 2) {
          for (std::size_t i = 0; i < 2; ++i) {
            auto sub_path = path;
            sub_path.push_back(i);
            match_arg(decls, decl, arg.subs[i], kind.subs[i], std::move(sub_path), out);
          }
          return;
        }
        if ((kind.tag == DomainKind::Tag::Logic || kind.tag == DomainKind::Tag::Ipc)) {
          path.push_back(0);
          if (arg.subs.size() == 1) {
            match_arg(decls, decl, arg.subs[0], kind.subs[0], std::move(path), out);
          } else {
            match_arg(decls, decl, arg, kind.subs[0], std::move(path), out);
          }
          return;
        }
        throw BuildError(BuildError::Code::ArityMismatch,
                         "'" + decl.name + "': tuple of " +
                             std::to_string(arg.subs.size()) +
                             " dependencies does not fit kind " + kind.str());
      }
    }
  }

  static constexpr std::size_t kMaxRounds = 100000;

  std::vector<Comp> comps_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace codom
