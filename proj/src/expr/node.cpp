#include <algorithm>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "expr/hash.hpp"
#include "expr/intern.hpp"
#include "uiobs/expr.hpp"

namespace uiobs {
namespace {

bool same_content(const Node& a, const Node& b) {
  if (a.op != b.op || a.var != b.var || a.exponent != b.exponent || a.canonical != b.canonical) {
    return false;
  }
  if (!(a.value == b.value)) return false;
  if (a.args.size() != b.args.size() || a.coeffs.size() != b.coeffs.size() ||
      a.exponents != b.exponents) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i].get() != b.args[i].get()) return false;
  }
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    if (!(a.coeffs[i] == b.coeffs[i])) return false;
  }
  return true;
}

std::uint64_t content_hash(const Node& n) {
  std::uint64_t h = detail::mix(static_cast<std::uint64_t>(n.op) + 1);
  h = detail::combine(h, n.value.hash());
  h = detail::combine(h, n.var);
  h = detail::combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(n.exponent)));
  h = detail::combine(h, n.canonical ? 1 : 0);
  for (const auto& a : n.args) h = detail::combine(h, a.node().hash);
  for (const auto& c : n.coeffs) h = detail::combine(h, c.hash());
  for (int e : n.exponents) h = detail::combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(e)));
  return h;
}

// Global hash-consing table. Entries are weak so unused nodes are freed; expired
// entries are swept when the table doubles past the last live count.
class InternTable {
 public:
  std::shared_ptr<const Node> find_or_insert(Node&& node) {
    std::lock_guard lock(mutex_);
    auto& bucket = table_[node.hash];
    for (auto it = bucket.begin(); it != bucket.end();) {
      if (auto existing = it->lock()) {
        if (same_content(*existing, node)) return existing;
        ++it;
      } else {
        it = bucket.erase(it);
      }
    }
    auto fresh = std::make_shared<const Node>(std::move(node));
    bucket.push_back(fresh);
    if (++inserted_ > sweep_at_) sweep();
    return fresh;
  }

 private:
  void sweep() {
    std::size_t live = 0;
    for (auto it = table_.begin(); it != table_.end();) {
      auto& bucket = it->second;
      std::erase_if(bucket, [](const std::weak_ptr<const Node>& w) { return w.expired(); });
      live += bucket.size();
      it = bucket.empty() ? table_.erase(it) : std::next(it);
    }
    inserted_ = live;
    sweep_at_ = std::max<std::size_t>(1U << 16U, 2 * live);
  }

  std::mutex mutex_;
  std::unordered_map<std::uint64_t, std::vector<std::weak_ptr<const Node>>> table_;
  std::size_t inserted_ = 0;
  std::size_t sweep_at_ = 1U << 16U;
};

InternTable& table() {
  static InternTable instance;
  return instance;
}

}  // namespace

Expr intern(Node&& node) {
  node.arity = node.op == Op::Var ? node.var + 1 : 0;
  node.var_mask = node.op == Op::Var ? (std::uint64_t{1} << (node.var % 64)) : 0;
  for (const auto& a : node.args) {
    node.arity = std::max(node.arity, a.node().arity);
    node.var_mask |= a.node().var_mask;
  }
  node.hash = content_hash(node);
  return Expr(table().find_or_insert(std::move(node)));
}

Expr::Expr() : Expr(uiobs::constant(0)) {}

Op Expr::op() const noexcept { return node_->op; }

const Number& Expr::constant() const { return node_->value; }

bool Expr::is_zero() const noexcept { return op() == Op::Const && node_->value.is_zero(); }
bool Expr::is_one() const noexcept { return op() == Op::Const && node_->value.is_one(); }

std::uint32_t Expr::arity() const noexcept { return node_->arity; }

bool Expr::may_depend_on(std::size_t var) const noexcept {
  return var < node_->arity && (node_->var_mask & (std::uint64_t{1} << (var % 64))) != 0;
}

std::size_t Expr::dag_size() const {
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& a : n->args) stack.push_back(a.get());
  }
  return seen.size();
}

bool is_function(Op op) noexcept { return op >= Op::Sin && op <= Op::Ln; }

std::string_view function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Atan: return "atan";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    default: return "";
  }
}

// --- VarSpace ---------------------------------------------------------------

VarSpace::VarSpace() : names_(std::make_shared<const std::vector<std::string>>()) {}

VarSpace::VarSpace(std::vector<std::string> names) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw SpecError("empty variable name");
    if (!seen.insert(n).second) throw SpecError("duplicate variable name \"" + n + "\"");
  }
  names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

std::optional<std::size_t> VarSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_->size(); ++i) {
    if ((*names_)[i] == name) return i;
  }
  return std::nullopt;
}

VarSpace VarSpace::appended(const std::vector<std::string>& extra) const {
  std::vector<std::string> all = *names_;
  all.insert(all.end(), extra.begin(), extra.end());
  return VarSpace(std::move(all));
}

bool operator==(const VarSpace& a, const VarSpace& b) noexcept {
  return a.names_ == b.names_ || *a.names_ == *b.names_;
}

}  // namespace uiobs
