#pragma once

// Solver-agnostic constraint IR over Boolean and integer variables with
// deterministic names. Built once, immutable afterwards.

#include <cassert>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace porthos::formula {

enum class Sort { boolean, integer };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind {
    btrue,
    bfalse,
    bvar,
    band,
    bor,
    bnot,
    implies,
    iff,
    int_lt, // a < b
    int_le, // a <= b
    int_eq, // a = b
    ivar,
    iconst,
    iadd,
    isub,
    imul
  };
  Kind kind;
  int var = -1; // bvar/ivar index
  long value = 0;
  std::vector<NodePtr> kids;

  bool is_bool_const(bool v) const {
    return (kind == Kind::btrue && v) || (kind == Kind::bfalse && !v);
  }
};

struct Var {
  std::string name;
  Sort sort;
};

class Formula {
public:
  // -- variables -----------------------------------------------------------
  int declare(const std::string& name, Sort sort) {
    auto it = index_.find(name);
    if (it != index_.end()) {
      assert(vars_[static_cast<size_t>(it->second)].sort == sort);
      return it->second;
    }
    int id = static_cast<int>(vars_.size());
    vars_.push_back({name, sort});
    index_[name] = id;
    return id;
  }
  int bool_var(const std::string& name) { return declare(name, Sort::boolean); }
  int int_var(const std::string& name) { return declare(name, Sort::integer); }

  bool has_var(const std::string& name) const { return index_.count(name) > 0; }
  const std::vector<Var>& vars() const { return vars_; }
  const Var& var(int id) const { return vars_[static_cast<size_t>(id)]; }
  int var_id(const std::string& name) const { return index_.at(name); }

  size_t bool_var_count() const {
    size_t k = 0;
    for (auto& v : vars_)
      if (v.sort == Sort::boolean) k++;
    return k;
  }

  // -- node constructors (lightly simplifying) ------------------------------
  static NodePtr t() {
    static NodePtr n = mk(Node::Kind::btrue);
    return n;
  }
  static NodePtr f() {
    static NodePtr n = mk(Node::Kind::bfalse);
    return n;
  }
  NodePtr b(int var) const {
    auto n = mk(Node::Kind::bvar);
    const_cast<Node&>(*n).var = var;
    return n;
  }
  NodePtr bv(const std::string& name) { return b(bool_var(name)); }
  NodePtr iv(const std::string& name) {
    auto n = mk(Node::Kind::ivar);
    const_cast<Node&>(*n).var = int_var(name);
    return n;
  }
  static NodePtr ic(long v) {
    auto n = mk(Node::Kind::iconst);
    const_cast<Node&>(*n).value = v;
    return n;
  }

  static NodePtr land(std::vector<NodePtr> kids) {
    std::vector<NodePtr> out;
    for (auto& k : kids) {
      if (k->is_bool_const(false)) return f();
      if (k->is_bool_const(true)) continue;
      out.push_back(k);
    }
    if (out.empty()) return t();
    if (out.size() == 1) return out[0];
    auto n = mk(Node::Kind::band);
    const_cast<Node&>(*n).kids = std::move(out);
    return n;
  }
  static NodePtr lor(std::vector<NodePtr> kids) {
    std::vector<NodePtr> out;
    for (auto& k : kids) {
      if (k->is_bool_const(true)) return t();
      if (k->is_bool_const(false)) continue;
      out.push_back(k);
    }
    if (out.empty()) return f();
    if (out.size() == 1) return out[0];
    auto n = mk(Node::Kind::bor);
    const_cast<Node&>(*n).kids = std::move(out);
    return n;
  }
  static NodePtr lnot(NodePtr a) {
    if (a->is_bool_const(true)) return f();
    if (a->is_bool_const(false)) return t();
    if (a->kind == Node::Kind::bnot) return a->kids[0];
    auto n = mk(Node::Kind::bnot);
    const_cast<Node&>(*n).kids = {std::move(a)};
    return n;
  }
  static NodePtr implies(NodePtr a, NodePtr b) {
    if (a->is_bool_const(false) || b->is_bool_const(true)) return t();
    if (a->is_bool_const(true)) return b;
    if (b->is_bool_const(false)) return lnot(a);
    auto n = mk(Node::Kind::implies);
    const_cast<Node&>(*n).kids = {std::move(a), std::move(b)};
    return n;
  }
  static NodePtr iff(NodePtr a, NodePtr b) {
    if (a->is_bool_const(true)) return b;
    if (b->is_bool_const(true)) return a;
    if (a->is_bool_const(false)) return lnot(b);
    if (b->is_bool_const(false)) return lnot(a);
    auto n = mk(Node::Kind::iff);
    const_cast<Node&>(*n).kids = {std::move(a), std::move(b)};
    return n;
  }
  NodePtr lt(NodePtr a, NodePtr b) { return cmp(Node::Kind::int_lt, std::move(a), std::move(b)); }
  NodePtr le(NodePtr a, NodePtr b) { return cmp(Node::Kind::int_le, std::move(a), std::move(b)); }
  NodePtr eq(NodePtr a, NodePtr b) { return cmp(Node::Kind::int_eq, std::move(a), std::move(b)); }
  NodePtr add(NodePtr a, NodePtr b) {
    needs_lia_ = true;
    return mkbin(Node::Kind::iadd, std::move(a), std::move(b));
  }
  NodePtr sub(NodePtr a, NodePtr b) {
    needs_lia_ = true;
    return mkbin(Node::Kind::isub, std::move(a), std::move(b));
  }
  NodePtr mul(NodePtr a, NodePtr b) {
    needs_lia_ = true;
    return mkbin(Node::Kind::imul, std::move(a), std::move(b));
  }

  // -- assertions ------------------------------------------------------------
  void assert_(NodePtr n) {
    if (n->is_bool_const(true)) return;
    asserts_.push_back(std::move(n));
  }
  const std::vector<NodePtr>& asserts() const { return asserts_; }

  /// True when some assertion needs linear arithmetic beyond difference
  /// atoms (x ▷ y, x ▷ c); selects QF_LIA over QF_IDL at emission.
  bool needs_lia() const { return needs_lia_; }

private:
  static NodePtr mk(Node::Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
  }
  static NodePtr mkbin(Node::Kind k, NodePtr a, NodePtr b) {
    auto n = mk(k);
    const_cast<Node&>(*n).kids = {std::move(a), std::move(b)};
    return n;
  }
  NodePtr cmp(Node::Kind k, NodePtr a, NodePtr b) {
    // difference-logic shape: var ▷ var or var ▷ const
    auto simple = [](const NodePtr& x) {
      return x->kind == Node::Kind::ivar || x->kind == Node::Kind::iconst;
    };
    if (!simple(a) || !simple(b)) needs_lia_ = true;
    return mkbin(k, std::move(a), std::move(b));
  }

  std::vector<Var> vars_;
  std::map<std::string, int> index_;
  std::vector<NodePtr> asserts_;
  bool needs_lia_ = false;
};

} // namespace porthos::formula
