#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "codom/errors.hpp"
#include "codom/extint.hpp"
#include "codom/interval.hpp"

namespace codom {

using VarName = std::string;
using VarSet = std::set<VarName>;
using Assignment = std::map<VarName, std::int64_t>;

// ---------------------------------------------------------------------------
// Arithmetic expressions
// ---------------------------------------------------------------------------

/// Quantifier-free arithmetic expression over +, -, * and unary negation.
/// Nodes are immutable and shared, so copying formulas is cheap.
class Expr {
 public:
  using Ptr = std::shared_ptr<const Expr>;

  struct Neg {
    Ptr sub;
  };
  struct Bin {
    ArithOp op;
    Ptr left, right;
  };
  using Node = std::variant<std::int64_t, VarName, Neg, Bin>;

  static Ptr constant(std::int64_t v) { return make(Node{v}); }
  static Ptr var(VarName name) { return make(Node{std::move(name)}); }
  static Ptr neg(Ptr e) { return make(Node{Neg{std::move(e)}}); }
  static Ptr bin(ArithOp op, Ptr l, Ptr r) {
    return make(Node{Bin{op, std::move(l), std::move(r)}});
  }
  static Ptr add(Ptr l, Ptr r) { return bin(ArithOp::Add, std::move(l), std::move(r)); }
  static Ptr sub(Ptr l, Ptr r) { return bin(ArithOp::Sub, std::move(l), std::move(r)); }
  static Ptr mul(Ptr l, Ptr r) { return bin(ArithOp::Mul, std::move(l), std::move(r)); }

  const Node& node() const { return node_; }

  bool is_constant() const { return std::holds_alternative<std::int64_t>(node_); }
  bool is_var() const { return std::holds_alternative<VarName>(node_); }

  explicit Expr(Node n) : node_(std::move(n)) {}

 private:
  static Ptr make(Node n) { return std::make_shared<const Expr>(std::move(n)); }
  Node node_;
};

enum class Rel { Le, Lt, Ge, Gt, Eq, Neq };

struct Atom {
  Rel rel;
  Expr::Ptr left, right;
};

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

/// Annotation label routing a sub-formula to a product component: either a
/// 1-based component index or a component name.
using Annotation = std::variant<int, std::string>;

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  struct AndF {
    FormulaPtr l, r;
  };
  struct OrF {
    FormulaPtr l, r;
  };
  struct ImplyF {
    FormulaPtr l, r;
  };
  struct NotF {
    FormulaPtr sub;
  };
  struct AnnotatedF {
    FormulaPtr sub;
    Annotation target;
  };
  using Node = std::variant<Atom, AndF, OrF, ImplyF, NotF, AnnotatedF>;

  explicit Formula(Node n) : node_(std::move(n)) {}
  const Node& node() const { return node_; }

  bool is_atom() const { return std::holds_alternative<Atom>(node_); }

 private:
  Node node_;
};

inline FormulaPtr make_formula(Formula::Node n) {
  return std::make_shared<const Formula>(std::move(n));
}

inline FormulaPtr atom(Rel rel, Expr::Ptr l, Expr::Ptr r) {
  return make_formula(Atom{rel, std::move(l), std::move(r)});
}
inline FormulaPtr atom(const Atom& a) { return make_formula(a); }
inline FormulaPtr f_and(FormulaPtr l, FormulaPtr r) {
  return make_formula(Formula::AndF{std::move(l), std::move(r)});
}
inline FormulaPtr f_or(FormulaPtr l, FormulaPtr r) {
  return make_formula(Formula::OrF{std::move(l), std::move(r)});
}
inline FormulaPtr f_imply(FormulaPtr l, FormulaPtr r) {
  return make_formula(Formula::ImplyF{std::move(l), std::move(r)});
}
inline FormulaPtr f_not(FormulaPtr f) { return make_formula(Formula::NotF{std::move(f)}); }
inline FormulaPtr annotate(FormulaPtr f, Annotation target) {
  return make_formula(Formula::AnnotatedF{std::move(f), std::move(target)});
}

/// Strips any top-level annotations.
inline const Formula& strip_annotations(const Formula& f) {
  const Formula* cur = &f;
  while (auto* a = std::get_if<Formula::AnnotatedF>(&cur->node())) cur = a->sub.get();
  return *cur;
}

// ---------------------------------------------------------------------------
// Variable extraction
// ---------------------------------------------------------------------------

inline void collect_vars(const Expr& e, VarSet& out) {
  if (auto* v = std::get_if<VarName>(&e.node())) {
    out.insert(*v);
  } else if (auto* n = std::get_if<Expr::Neg>(&e.node())) {
    collect_vars(*n->sub, out);
  } else if (auto* b = std::get_if<Expr::Bin>(&e.node())) {
    collect_vars(*b->left, out);
    collect_vars(*b->right, out);
  }
}

inline void collect_vars(const Formula& f, VarSet& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) {
          collect_vars(*n.left, out);
          collect_vars(*n.right, out);
        } else if constexpr (std::is_same_v<T, Formula::NotF>) {
          collect_vars(*n.sub, out);
        } else if constexpr (std::is_same_v<T, Formula::AnnotatedF>) {
          collect_vars(*n.sub, out);
        } else {
          collect_vars(*n.l, out);
          collect_vars(*n.r, out);
        }
      },
      f.node());
}

/// Set of variable names occurring in phi, ignoring annotations.
inline VarSet vars(const Formula& f) {
  VarSet out;
  collect_vars(f, out);
  return out;
}

inline VarSet vars(const Atom& a) {
  VarSet out;
  collect_vars(*a.left, out);
  collect_vars(*a.right, out);
  return out;
}

/// Value of a variable-free expression; nullopt when any variable occurs.
inline std::int64_t evaluate(const Expr& e, const Assignment& v);
inline std::optional<std::int64_t> fold_constant(const Expr& e) {
  VarSet vs;
  collect_vars(e, vs);
  if (!vs.empty()) return std::nullopt;
  return evaluate(e, {});
}

// ---------------------------------------------------------------------------
// Evaluation under a concrete assignment (overflow-checked)
// ---------------------------------------------------------------------------

inline std::int64_t evaluate(const Expr& e, const Assignment& v) {
  if (auto* c = std::get_if<std::int64_t>(&e.node())) return *c;
  if (auto* x = std::get_if<VarName>(&e.node())) {
    auto it = v.find(*x);
    if (it == v.end()) throw std::runtime_error("unbound variable " + *x);
    return it->second;
  }
  if (auto* n = std::get_if<Expr::Neg>(&e.node()))
    return (ExtInt(0) - ExtInt(evaluate(*n->sub, v))).value();
  const auto& b = std::get<Expr::Bin>(e.node());
  const ExtInt l{evaluate(*b.left, v)}, r{evaluate(*b.right, v)};
  switch (b.op) {
    case ArithOp::Add: return (l + r).value();
    case ArithOp::Sub: return (l - r).value();
    case ArithOp::Mul: return (l * r).value();
  }
  return 0;
}

inline bool evaluate(const Atom& a, const Assignment& v) {
  const std::int64_t l = evaluate(*a.left, v), r = evaluate(*a.right, v);
  switch (a.rel) {
    case Rel::Le: return l <= r;
    case Rel::Lt: return l < r;
    case Rel::Ge: return l >= r;
    case Rel::Gt: return l > r;
    case Rel::Eq: return l == r;
    case Rel::Neq: return l != r;
  }
  return false;
}

inline bool evaluate(const Formula& f, const Assignment& v) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) return evaluate(n, v);
        else if constexpr (std::is_same_v<T, Formula::AndF>)
          return evaluate(*n.l, v) && evaluate(*n.r, v);
        else if constexpr (std::is_same_v<T, Formula::OrF>)
          return evaluate(*n.l, v) || evaluate(*n.r, v);
        else if constexpr (std::is_same_v<T, Formula::ImplyF>)
          return !evaluate(*n.l, v) || evaluate(*n.r, v);
        else if constexpr (std::is_same_v<T, Formula::NotF>)
          return !evaluate(*n.sub, v);
        else
          return evaluate(*n.sub, v);
      },
      f.node());
}

// ---------------------------------------------------------------------------
// Structural identity and printing
// ---------------------------------------------------------------------------

inline bool structural_equal(const Expr& a, const Expr& b) {
  if (a.node().index() != b.node().index()) return false;
  if (auto* c = std::get_if<std::int64_t>(&a.node()))
    return *c == std::get<std::int64_t>(b.node());
  if (auto* v = std::get_if<VarName>(&a.node())) return *v == std::get<VarName>(b.node());
  if (auto* n = std::get_if<Expr::Neg>(&a.node()))
    return structural_equal(*n->sub, *std::get<Expr::Neg>(b.node()).sub);
  const auto& x = std::get<Expr::Bin>(a.node());
  const auto& y = std::get<Expr::Bin>(b.node());
  return x.op == y.op && structural_equal(*x.left, *y.left) &&
         structural_equal(*x.right, *y.right);
}

inline bool structural_equal(const Atom& a, const Atom& b) {
  return a.rel == b.rel && structural_equal(*a.left, *b.left) &&
         structural_equal(*a.right, *b.right);
}

inline bool structural_equal(const Formula& a, const Formula& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>)
          return structural_equal(n, std::get<Atom>(b.node()));
        else if constexpr (std::is_same_v<T, Formula::NotF>)
          return structural_equal(*n.sub, *std::get<Formula::NotF>(b.node()).sub);
        else if constexpr (std::is_same_v<T, Formula::AnnotatedF>) {
          const auto& o = std::get<Formula::AnnotatedF>(b.node());
          return n.target == o.target && structural_equal(*n.sub, *o.sub);
        } else {
          const auto& o = std::get<T>(b.node());
          return structural_equal(*n.l, *o.l) && structural_equal(*n.r, *o.r);
        }
      },
      a.node());
}

inline std::string to_string(const Expr& e) {
  if (auto* c = std::get_if<std::int64_t>(&e.node())) return std::to_string(*c);
  if (auto* v = std::get_if<VarName>(&e.node())) return *v;
  if (auto* n = std::get_if<Expr::Neg>(&e.node())) return "-(" + to_string(*n->sub) + ")";
  const auto& b = std::get<Expr::Bin>(e.node());
  const char* op = b.op == ArithOp::Add ? " + " : b.op == ArithOp::Sub ? " - " : " * ";
  return "(" + to_string(*b.left) + op + to_string(*b.right) + ")";
}

inline std::string to_string(Rel r) {
  switch (r) {
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
    case Rel::Eq: return "=";
    case Rel::Neq: return "!=";
  }
  return "?";
}

inline std::string to_string(const Atom& a) {
  return to_string(*a.left) + " " + to_string(a.rel) + " " + to_string(*a.right);
}

inline std::string to_string(const Formula& f) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) return to_string(n);
        else if constexpr (std::is_same_v<T, Formula::AndF>)
          return "(" + to_string(*n.l) + " /\\ " + to_string(*n.r) + ")";
        else if constexpr (std::is_same_v<T, Formula::OrF>)
          return "(" + to_string(*n.l) + " \\/ " + to_string(*n.r) + ")";
        else if constexpr (std::is_same_v<T, Formula::ImplyF>)
          return "(" + to_string(*n.l) + " => " + to_string(*n.r) + ")";
        else if constexpr (std::is_same_v<T, Formula::NotF>)
          return "!(" + to_string(*n.sub) + ")";
        else {
          std::string tag = std::holds_alternative<int>(n.target)
                                ? std::to_string(std::get<int>(n.target))
                                : std::get<std::string>(n.target);
          return to_string(*n.sub) + ":" + tag;
        }
      },
      f.node());
}

// ---------------------------------------------------------------------------
// Rewriting
// ---------------------------------------------------------------------------

/// Complementary integer relation: Le<->Gt, Lt<->Ge, Eq<->Neq.
inline Atom negate_atom(const Atom& a) {
  Rel r;
  switch (a.rel) {
    case Rel::Le: r = Rel::Gt; break;
    case Rel::Lt: r = Rel::Ge; break;
    case Rel::Ge: r = Rel::Lt; break;
    case Rel::Gt: r = Rel::Le; break;
    case Rel::Eq: r = Rel::Neq; break;
    case Rel::Neq: r = Rel::Eq; break;
    default: r = a.rel; break;
  }
  return Atom{r, a.left, a.right};
}

inline Expr::Ptr substitute_expr(const Expr::Ptr& e, const VarName& x, std::int64_t value) {
  if (auto* v = std::get_if<VarName>(&e->node()))
    return *v == x ? Expr::constant(value) : e;
  if (std::get_if<std::int64_t>(&e->node())) return e;
  if (auto* n = std::get_if<Expr::Neg>(&e->node()))
    return Expr::neg(substitute_expr(n->sub, x, value));
  const auto& b = std::get<Expr::Bin>(e->node());
  return Expr::bin(b.op, substitute_expr(b.left, x, value),
                   substitute_expr(b.right, x, value));
}

/// Replaces every bound variable with its value; the reflexive-transitive
/// closure of single-variable instantiation.
inline FormulaPtr substitute_fixed(const FormulaPtr& f, const Assignment& bindings) {
  return std::visit(
      [&](const auto& n) -> FormulaPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) {
          Expr::Ptr l = n.left, r = n.right;
          for (const auto& [x, v] : bindings) {
            l = substitute_expr(l, x, v);
            r = substitute_expr(r, x, v);
          }
          return atom(n.rel, l, r);
        } else if constexpr (std::is_same_v<T, Formula::NotF>) {
          return f_not(substitute_fixed(n.sub, bindings));
        } else if constexpr (std::is_same_v<T, Formula::AnnotatedF>) {
          return annotate(substitute_fixed(n.sub, bindings), n.target);
        } else if constexpr (std::is_same_v<T, Formula::AndF>) {
          return f_and(substitute_fixed(n.l, bindings), substitute_fixed(n.r, bindings));
        } else if constexpr (std::is_same_v<T, Formula::OrF>) {
          return f_or(substitute_fixed(n.l, bindings), substitute_fixed(n.r, bindings));
        } else {
          return f_imply(substitute_fixed(n.l, bindings), substitute_fixed(n.r, bindings));
        }
      },
      f->node());
}

namespace detail {

inline int count_occurrences(const Expr& e, const VarName& x) {
  if (auto* v = std::get_if<VarName>(&e.node())) return *v == x ? 1 : 0;
  if (std::get_if<std::int64_t>(&e.node())) return 0;
  if (auto* n = std::get_if<Expr::Neg>(&e.node())) return count_occurrences(*n->sub, x);
  const auto& b = std::get<Expr::Bin>(e.node());
  return count_occurrences(*b.left, x) + count_occurrences(*b.right, x);
}

// Sign of x along a +/-/neg-only path from the root; nullopt when x sits
// under a multiplication (not additively isolable).
inline std::optional<int> additive_sign(const Expr& e, const VarName& x, int sign) {
  if (auto* v = std::get_if<VarName>(&e.node())) return *v == x ? std::optional(sign) : std::nullopt;
  if (std::get_if<std::int64_t>(&e.node())) return std::nullopt;
  if (auto* n = std::get_if<Expr::Neg>(&e.node())) return additive_sign(*n->sub, x, -sign);
  const auto& b = std::get<Expr::Bin>(e.node());
  if (b.op == ArithOp::Mul) {
    // x must not occur under the product at all for isolation to apply.
    return std::nullopt;
  }
  if (auto s = additive_sign(*b.left, x, sign)) return s;
  return additive_sign(*b.right, x, b.op == ArithOp::Sub ? -sign : sign);
}

inline void ordered_vars(const Expr& e, std::vector<VarName>& out) {
  if (auto* v = std::get_if<VarName>(&e.node())) {
    for (const auto& seen : out)
      if (seen == *v) return;
    out.push_back(*v);
  } else if (auto* n = std::get_if<Expr::Neg>(&e.node())) {
    ordered_vars(*n->sub, out);
  } else if (auto* b = std::get_if<Expr::Bin>(&e.node())) {
    ordered_vars(*b->left, out);
    ordered_vars(*b->right, out);
  }
}

}  // namespace detail

using BoundMap = std::map<VarName, ExtInt>;

/// Over-approximates an inequality atom by substituting a projected bound for
/// one variable: for x <= e the lower bound of x, for x >= e the upper bound
/// (signs flip when x occurs negatively). The variable chosen is the first,
/// in occurrence order, that occurs exactly once, sits on an additive path,
/// and has the needed finite bound in lb/ub. Absent when no variable
/// qualifies. The result never loses a solution consistent with the bounds.
inline std::optional<FormulaPtr> relax(const Formula& phi, const BoundMap& lb,
                                       const BoundMap& ub) {
  const Formula& f = strip_annotations(phi);
  const auto* a = std::get_if<Atom>(&f.node());
  if (a == nullptr) return std::nullopt;
  if (a->rel == Rel::Eq || a->rel == Rel::Neq) return std::nullopt;

  std::vector<VarName> order;
  detail::ordered_vars(*a->left, order);
  detail::ordered_vars(*a->right, order);

  const bool upper_rel = (a->rel == Rel::Ge || a->rel == Rel::Gt);
  for (const VarName& x : order) {
    const int occurrences =
        detail::count_occurrences(*a->left, x) + detail::count_occurrences(*a->right, x);
    if (occurrences != 1) continue;
    // Treat the atom as (left - right) rel 0 to get the sign of x.
    std::optional<int> sign = detail::additive_sign(*a->left, x, +1);
    if (!sign) sign = detail::additive_sign(*a->right, x, -1);
    if (!sign) continue;
    // rel in {Le,Lt}: +x needs lb, -x needs ub; mirrored for {Ge,Gt}.
    const bool need_lower = (*sign > 0) != upper_rel;
    const BoundMap& bounds = need_lower ? lb : ub;
    auto it = bounds.find(x);
    if (it == bounds.end() || !it->second.is_finite()) continue;
    const std::int64_t b = it->second.value();
    return atom(a->rel, substitute_expr(a->left, x, b), substitute_expr(a->right, x, b));
  }
  return std::nullopt;
}

}  // namespace codom
