#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "codom/element.hpp"

namespace codom {

namespace detail {

// Linear view of an atom side: sum of +/-1-coefficient variables plus a
// constant. Multiplication is folded only when one factor is constant.
struct LinearForm {
  std::map<VarName, std::int64_t> coeffs;
  std::int64_t constant = 0;
};

inline bool linearize(const Expr& e, std::int64_t scale, LinearForm& out) {
  if (auto* c = std::get_if<std::int64_t>(&e.node())) {
    out.constant = (ExtInt(out.constant) + ExtInt(scale) * ExtInt(*c)).value();
    return true;
  }
  if (auto* v = std::get_if<VarName>(&e.node())) {
    out.coeffs[*v] += scale;
    return true;
  }
  if (auto* n = std::get_if<Expr::Neg>(&e.node()))
    return linearize(*n->sub, -scale, out);
  const auto& b = std::get<Expr::Bin>(e.node());
  switch (b.op) {
    case ArithOp::Add:
      return linearize(*b.left, scale, out) && linearize(*b.right, scale, out);
    case ArithOp::Sub:
      return linearize(*b.left, scale, out) && linearize(*b.right, -scale, out);
    case ArithOp::Mul: {
      if (auto k = fold_constant(*b.left)) return linearize(*b.right, (ExtInt(scale) * ExtInt(*k)).value(), out);
      if (auto k = fold_constant(*b.right)) return linearize(*b.left, (ExtInt(scale) * ExtInt(*k)).value(), out);
      return false;
    }
  }
  return false;
}

// lhs rel rhs reduced to (sum of signed unit terms) <= bound; at most two
// variables with coefficients +/-1. Equalities expand to two inequalities.
struct OctConstraint {
  std::vector<std::pair<VarName, int>> terms;  // (var, sign)
  std::int64_t bound;
};

inline std::optional<std::vector<OctConstraint>> as_octagonal(const Atom& a) {
  if (a.rel == Rel::Neq) return std::nullopt;
  LinearForm lf;
  if (!linearize(*a.left, +1, lf) || !linearize(*a.right, -1, lf)) return std::nullopt;
  std::erase_if(lf.coeffs, [](const auto& kv) { return kv.second == 0; });
  if (lf.coeffs.size() > 2) return std::nullopt;
  for (const auto& [_, c] : lf.coeffs)
    if (c != 1 && c != -1) return std::nullopt;

  auto mk = [&](int dir) {  // dir=+1 encodes lhs-rhs <= k, dir=-1 the reverse
    OctConstraint oc;
    for (const auto& [v, c] : lf.coeffs) oc.terms.emplace_back(v, dir * static_cast<int>(c));
    oc.bound = (ExtInt(0) - ExtInt(dir) * ExtInt(lf.constant)).value();
    return oc;
  };
  std::vector<OctConstraint> out;
  switch (a.rel) {
    case Rel::Le: out.push_back(mk(+1)); break;
    case Rel::Lt: {
      auto oc = mk(+1);
      oc.bound = (ExtInt(oc.bound) - ExtInt(1)).value();
      out.push_back(oc);
      break;
    }
    case Rel::Ge: out.push_back(mk(-1)); break;
    case Rel::Gt: {
      auto oc = mk(-1);
      oc.bound = (ExtInt(oc.bound) - ExtInt(1)).value();
      out.push_back(oc);
      break;
    }
    case Rel::Eq:
      out.push_back(mk(+1));
      out.push_back(mk(-1));
      break;
    default: return std::nullopt;
  }
  return out;
}

}  // namespace detail

/// Integer octagon over a coherent difference-bound matrix. Variable i has
/// positive literal index 2i and negative literal index 2i+1; entry (r, c)
/// bounds lit(c) - lit(r), so coherence reads dbm[r][c] = dbm[bar c][bar r].
/// Unary bounds live on the doubled entries (bar x, x) and (x, bar x).
/// Closure is all-pairs shortest paths followed by integer tightening of the
/// doubled entries and one strengthening pass; on coherent integer matrices
/// this yields the tight closure, and a negative diagonal marks
/// inconsistency. A one-entry incremental repair is available after a closed
/// matrix was tightened.
class Octagon final : public Element {
 public:
  using Entry = std::pair<std::size_t, std::size_t>;

  Octagon() = default;

  static std::size_t pos(std::size_t var_idx) { return 2 * var_idx; }
  static std::size_t neg(std::size_t var_idx) { return 2 * var_idx + 1; }
  static std::size_t bar(std::size_t lit) { return lit ^ 1; }

  std::size_t num_vars() const { return vars_.size(); }
  const std::vector<VarName>& var_names() const { return vars_; }
  bool is_closed() const { return closed_ && dirty_.empty(); }
  bool is_unsat_flagged() const { return unsat_; }

  ExtInt at(std::size_t r, std::size_t c) const { return dbm_[r * dim() + c]; }

  /// Index of x, registering it with unconstrained rows/columns if new.
  std::size_t ensure_var(const VarName& x) {
    auto it = index_.find(x);
    if (it != index_.end()) return it->second;
    const std::size_t i = vars_.size();
    vars_.push_back(x);
    index_.emplace(x, i);
    grow();
    return i;
  }

  std::unique_ptr<Element> clone() const override {
    return std::make_unique<Octagon>(*this);
  }

  bool supports(const Formula& f) const override {
    const Formula& g = strip_annotations(f);
    if (const auto* a = std::get_if<Atom>(&g.node()))
      return detail::as_octagonal(*a).has_value();
    if (const auto* c = std::get_if<Formula::AndF>(&g.node()))
      return supports(*c->l) && supports(*c->r);
    return false;
  }

  InterpretResult interpret(const Formula& f) override {
    const Formula& g = strip_annotations(f);
    if (const auto* c = std::get_if<Formula::AndF>(&g.node())) {
      if (!supports(*c->l) || !supports(*c->r)) return InterpretResult::NotSupported;
      interpret(*c->l);
      interpret(*c->r);
      return InterpretResult::Ok;
    }
    const auto* a = std::get_if<Atom>(&g.node());
    if (a == nullptr) return InterpretResult::NotSupported;
    auto ocs = detail::as_octagonal(*a);
    if (!ocs) return InterpretResult::NotSupported;
    for (const auto& oc : *ocs) tell(oc);
    return InterpretResult::Ok;
  }

  bool closure() override {
    if (unsat_) return false;
    if (closed_ && dirty_.empty()) return false;
    bool changed;
    if (closed_ && dirty_.size() <= std::max<std::size_t>(1, num_vars() / 2)) {
      changed = false;
      for (const Entry& e : dirty_) changed |= repair(e);
    } else {
      changed = floyd_warshall();
    }
    dirty_.clear();
    closed_ = true;
    if (negative_diagonal()) {
      unsat_ = true;
      return true;
    }
    changed |= tighten_and_strengthen();
    if (negative_diagonal()) unsat_ = true;
    return changed;
  }

  /// Full O(n^3) closure regardless of incremental bookkeeping.
  bool close_full() {
    dirty_.clear();
    closed_ = false;
    return closure();
  }

  /// O(n^2) repair after exactly one entry (plus its coherent mirror) of a
  /// closed matrix was tightened; equivalent to a full closure.
  bool close_incremental(const Entry& e) {
    if (unsat_) return false;
    bool changed = repair(e);
    dirty_.clear();
    closed_ = true;
    if (negative_diagonal()) {
      unsat_ = true;
      return true;
    }
    changed |= tighten_and_strengthen();
    if (negative_diagonal()) unsat_ = true;
    return changed;
  }

  Kleene state() override {
    if (unsat_) return Kleene::False;
    closure();
    return unsat_ ? Kleene::False : Kleene::True;
  }

  std::vector<ElementPtr> split() const override {
    Octagon closed(*this);
    closed.closure();
    if (closed.unsat_) return {};
    const VarName* best = nullptr;
    Interval best_itv;
    for (const auto& name : closed.vars_) {
      const Interval itv = closed.project(name);
      if (itv.is_empty() || itv.is_singleton()) continue;
      if (best == nullptr || itv.width() < best_itv.width() ||
          (itv.width() == best_itv.width() && name < *best)) {
        best = &name;
        best_itv = itv;
      }
    }
    if (best == nullptr) return {};
    if (!best_itv.lo().is_finite())
      throw SearchError("split on variable with infinite lower bound: " + *best);
    const std::int64_t l = best_itv.lo().value();
    auto left = std::make_unique<Octagon>(closed);
    left->embed(*best, Interval::singleton(l));
    auto right = std::make_unique<Octagon>(closed);
    right->embed(*best, Interval::at_least(ExtInt(l) + ExtInt(1)));
    std::vector<ElementPtr> out;
    out.push_back(std::move(left));
    out.push_back(std::move(right));
    return out;
  }

  /// [ceil(-dbm[x][bar x]/2) .. floor(dbm[bar x][x]/2)]; tight when closed.
  Interval project(const VarName& x) const override {
    if (unsat_) return Interval::empty();
    auto it = index_.find(x);
    if (it == index_.end()) return Interval::full();
    const std::size_t p = pos(it->second), n = neg(it->second);
    const ExtInt ub = at(n, p).div_floor(2);
    const ExtInt lb = ExtInt(0) - at(p, n).div_floor(2);
    return Interval(lb, ub);
  }

  bool knows_var(const VarName& x) const override { return index_.count(x) > 0; }

  void collect_element_vars(VarSet& out) const override {
    for (const auto& v : vars_) out.insert(v);
  }

  bool embed(const VarName& x, const Interval& hull) override {
    if (!knows_var(x)) return false;
    if (hull.is_empty()) {
      if (!unsat_) {
        unsat_ = true;
        return true;
      }
      return false;
    }
    const std::size_t i = index_.at(x);
    bool changed = false;
    if (hull.hi().is_finite())
      changed |= tighten(neg(i), pos(i), ExtInt(2) * hull.hi());
    if (hull.lo().is_finite())
      changed |= tighten(pos(i), neg(i), ExtInt(-2) * hull.lo());
    return changed;
  }

  bool join_from(const Element& other) override {
    const auto& o = dynamic_cast<const Octagon&>(other);
    bool changed = false;
    if (o.unsat_) {
      if (!unsat_) {
        unsat_ = true;
        changed = true;
      }
      return changed;
    }
    for (const auto& v : o.vars_) ensure_var(v);
    for (std::size_t i = 0; i < o.vars_.size(); ++i) {
      for (std::size_t j = 0; j < o.vars_.size(); ++j) {
        const std::size_t mi = index_.at(o.vars_[i]), mj = index_.at(o.vars_[j]);
        for (int si = 0; si < 2; ++si)
          for (int sj = 0; sj < 2; ++sj) {
            const ExtInt w = o.at(2 * i + si, 2 * j + sj);
            if (w.is_pos_inf()) continue;
            changed |= tighten(2 * mi + si, 2 * mj + sj, w);
          }
      }
    }
    return changed;
  }

  bool leq(const Element& other) const override {
    const auto& o = dynamic_cast<const Octagon&>(other);
    if (o.closed_form_unsat()) return true;
    if (closed_form_unsat()) return false;
    Octagon a(*this), b(o);
    a.closure();
    b.closure();
    return closed_entrywise_geq(a, b);
  }

  bool equals(const Element& other) const override {
    const auto& o = dynamic_cast<const Octagon&>(other);
    const bool ua = closed_form_unsat(), ub = o.closed_form_unsat();
    if (ua || ub) return ua == ub;
    Octagon a(*this), b(o);
    a.closure();
    b.closure();
    return closed_entrywise_geq(a, b) && closed_entrywise_geq(b, a);
  }

  bool gamma_contains(const Assignment& point) const override {
    if (unsat_) return false;
    std::vector<std::int64_t> lit(dim());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = point.find(vars_[i]);
      if (it == point.end()) return false;
      lit[pos(i)] = it->second;
      lit[neg(i)] = -it->second;
    }
    for (std::size_t r = 0; r < dim(); ++r)
      for (std::size_t c = 0; c < dim(); ++c) {
        const ExtInt w = at(r, c);
        if (w.is_finite() && lit[c] - lit[r] > w.value()) return false;
      }
    return true;
  }

  std::string str() const override {
    if (unsat_) return "oct(bot)";
    std::string out = "oct{";
    bool first = true;
    for (const auto& name : vars_) {
      if (!first) out += ", ";
      first = false;
      out += name + " -> " + project(name).str();
    }
    return out + "}";
  }

  /// Raw entry tightening used by interpret/embed; keeps coherence and
  /// incremental bookkeeping. Public so tests can drive single entries.
  bool tighten(std::size_t r, std::size_t c, ExtInt w) {
    if (w >= at(r, c)) return false;
    set(r, c, w);
    set(bar(c), bar(r), w);
    if (closed_) dirty_.push_back({r, c});
    return true;
  }

 private:
  std::size_t dim() const { return 2 * vars_.size(); }

  void set(std::size_t r, std::size_t c, ExtInt w) { dbm_[r * dim() + c] = w; }

  void grow() {
    const std::size_t nd = dim();
    std::vector<ExtInt> next(nd * nd, ExtInt::pos_inf());
    const std::size_t od = nd - 2;
    for (std::size_t r = 0; r < od; ++r)
      for (std::size_t c = 0; c < od; ++c) next[r * nd + c] = dbm_[r * od + c];
    dbm_ = std::move(next);
    for (std::size_t r = 0; r < nd; ++r) set(r, r, ExtInt(0));
  }

  void tell(const detail::OctConstraint& oc) {
    if (oc.terms.empty()) {
      if (oc.bound < 0) unsat_ = true;
      return;
    }
    if (oc.terms.size() == 1) {
      const auto& [v, sign] = oc.terms[0];
      const std::size_t i = ensure_var(v);
      // +x <= c is the doubled entry (bar x -> x); -x <= c the reverse.
      if (sign > 0)
        tighten(neg(i), pos(i), ExtInt(2) * ExtInt(oc.bound));
      else
        tighten(pos(i), neg(i), ExtInt(2) * ExtInt(oc.bound));
      return;
    }
    const auto& [va, sa] = oc.terms[0];
    const auto& [vb, sb] = oc.terms[1];
    const std::size_t ia = ensure_var(va), ib = ensure_var(vb);
    // sa*a + sb*b = lit(u) - lit(v) with u the literal of sa*a and v the
    // literal of -sb*b.
    const std::size_t u = sa > 0 ? pos(ia) : neg(ia);
    const std::size_t v = sb > 0 ? neg(ib) : pos(ib);
    tighten(v, u, ExtInt(oc.bound));
  }

  bool floyd_warshall() {
    bool changed = false;
    const std::size_t d = dim();
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t r = 0; r < d; ++r) {
        const ExtInt rk = at(r, k);
        if (rk.is_pos_inf()) continue;
        for (std::size_t c = 0; c < d; ++c) {
          const ExtInt kc = at(k, c);
          if (kc.is_pos_inf()) continue;
          const ExtInt w = rk + kc;
          if (w < at(r, c)) {
            set(r, c, w);
            changed = true;
          }
        }
      }
    return changed;
  }

  // Single-edge shortest-path repair: composes paths using the tightened
  // edge (a, b) and its coherent mirror at most once each.
  bool repair(const Entry& e) {
    const auto [a, b] = e;
    const ExtInt w = at(a, b);
    if (w.is_pos_inf()) return false;
    const std::size_t d = dim();
    bool changed = false;
    for (std::size_t r = 0; r < d; ++r) {
      const ExtInt ra = at(r, a), rbb = at(r, bar(b));
      const ExtInt via1 = ra.is_pos_inf() ? ExtInt::pos_inf() : ra + w;
      const ExtInt via2 = rbb.is_pos_inf() ? ExtInt::pos_inf() : rbb + w;
      if (via1.is_pos_inf() && via2.is_pos_inf()) continue;
      for (std::size_t c = 0; c < d; ++c) {
        ExtInt best = at(r, c);
        if (!via1.is_pos_inf() && !at(b, c).is_pos_inf()) best = min(best, via1 + at(b, c));
        if (!via2.is_pos_inf() && !at(bar(a), c).is_pos_inf())
          best = min(best, via2 + at(bar(a), c));
        // Both the edge and its mirror on one path.
        if (!via1.is_pos_inf() && !at(b, bar(b)).is_pos_inf() && !at(bar(a), c).is_pos_inf())
          best = min(best, via1 + at(b, bar(b)) + w + at(bar(a), c));
        if (!via2.is_pos_inf() && !at(bar(a), a).is_pos_inf() && !at(b, c).is_pos_inf())
          best = min(best, via2 + at(bar(a), a) + w + at(b, c));
        if (best < at(r, c)) {
          set(r, c, best);
          changed = true;
        }
      }
    }
    return changed;
  }

  bool negative_diagonal() const {
    for (std::size_t r = 0; r < dim(); ++r)
      if (at(r, r) < ExtInt(0)) return true;
    return false;
  }

  bool tighten_and_strengthen() {
    bool changed = false;
    const std::size_t d = dim();
    for (std::size_t r = 0; r < d; ++r) {
      const ExtInt v = at(r, bar(r));
      if (!v.is_pos_inf()) {
        const ExtInt t = ExtInt(2) * v.div_floor(2);
        if (t < v) {
          set(r, bar(r), t);
          changed = true;
        }
      }
    }
    for (std::size_t r = 0; r < d; ++r) {
      const ExtInt half_r = at(r, bar(r)).div_floor(2);
      if (half_r.is_pos_inf()) continue;
      for (std::size_t c = 0; c < d; ++c) {
        const ExtInt half_c = at(bar(c), c).div_floor(2);
        if (half_c.is_pos_inf()) continue;
        const ExtInt w = half_r + half_c;
        if (w < at(r, c)) {
          set(r, c, w);
          changed = true;
        }
      }
    }
    return changed;
  }

  bool closed_form_unsat() const {
    if (unsat_) return true;
    Octagon tmp(*this);
    tmp.closure();
    return tmp.unsat_;
  }

  // Entries of a vs b aligned by variable names; a >= b entrywise means
  // gamma(a) contains gamma(b). Variables unknown to one side behave as
  // unconstrained rows.
  static bool closed_entrywise_geq(const Octagon& a, const Octagon& b) {
    std::vector<VarName> names;
    for (const auto& v : a.vars_) names.push_back(v);
    for (const auto& v : b.vars_)
      if (!a.knows_var(v)) names.push_back(v);
    auto entry = [](const Octagon& o, const VarName& x, int sx, const VarName& y,
                    int sy) -> ExtInt {
      auto ix = o.index_.find(x);
      auto iy = o.index_.find(y);
      if (ix == o.index_.end() || iy == o.index_.end()) {
        const bool diag = (x == y) && (sx == sy);
        return diag ? ExtInt(0) : ExtInt::pos_inf();
      }
      const std::size_t r = sx > 0 ? pos(ix->second) : neg(ix->second);
      const std::size_t c = sy > 0 ? pos(iy->second) : neg(iy->second);
      return o.at(r, c);
    };
    for (const auto& x : names)
      for (const auto& y : names)
        for (int sx : {+1, -1})
          for (int sy : {+1, -1})
            if (entry(a, x, sx, y, sy) < entry(b, x, sx, y, sy)) return false;
    return true;
  }

  std::vector<VarName> vars_;
  std::map<VarName, std::size_t> index_;
  std::vector<ExtInt> dbm_;
  std::vector<Entry> dirty_;
  bool closed_ = false;
  bool unsat_ = false;
};

}  // namespace codom
