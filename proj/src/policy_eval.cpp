#include <cmath>
#include <string>
#include <utility>

#include "greenlb/error.hpp"
#include "greenlb/policy.hpp"

namespace greenlb {

std::string_view to_string(NdResolution nd) noexcept {
  return nd == NdResolution::RandomFraction ? "random" : "fixed_order";
}

std::optional<NdResolution> parse_nd_resolution(std::string_view text) noexcept {
  if (text == "random") return NdResolution::RandomFraction;
  if (text == "fixed_order") return NdResolution::FixedOrder;
  return std::nullopt;
}

namespace policy {

Expr::Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

bool operator==(const Expr& a, const Expr& b) {
  return a.node_ == b.node_ || *a.node_ == *b.node_;
}

Expr term(Terminal t) { return Expr(Node{t}); }

Expr lit(std::int64_t value) {
  if (value < 0) throw ConfigError("integer literal must be non-negative; use unary minus");
  return Expr(Node{IntLit{value}});
}

Expr dspace(std::string name) {
  if (name.empty()) throw ConfigError("dspace name must be non-empty");
  return Expr(Node{DSpace{std::move(name)}});
}

Expr mod(Expr lhs, Expr rhs) { return Expr(Node{Binary{BinaryOp::Mod, std::move(lhs), std::move(rhs)}}); }
Expr operator-(Expr operand) { return Expr(Node{Neg{std::move(operand)}}); }
Expr operator+(Expr lhs, Expr rhs) { return Expr(Node{Binary{BinaryOp::Add, std::move(lhs), std::move(rhs)}}); }
Expr operator-(Expr lhs, Expr rhs) { return Expr(Node{Binary{BinaryOp::Sub, std::move(lhs), std::move(rhs)}}); }
Expr operator*(Expr lhs, Expr rhs) { return Expr(Node{Binary{BinaryOp::Mul, std::move(lhs), std::move(rhs)}}); }
Expr operator/(Expr lhs, Expr rhs) { return Expr(Node{Binary{BinaryOp::Div, std::move(lhs), std::move(rhs)}}); }

namespace {

double indicator(bool b) { return b ? 1.0 : 0.0; }

double terminal_value(Terminal t, const ServerSnapshot& s, UniformSource& rng) {
  switch (t) {
    case Terminal::Id: return s.id;
    case Terminal::NumServers: return s.num_servers;
    case Terminal::QueueSize: return static_cast<double>(s.queue_size);
    case Terminal::StateOn: return indicator(s.power_state == PowerState::On);
    case Terminal::StateSleep: return indicator(s.power_state == PowerState::Sleep);
    case Terminal::StateSuspend: return indicator(s.power_state == PowerState::Suspend);
    case Terminal::StateWakeup: return indicator(s.power_state == PowerState::Wakeup);
    case Terminal::PowerOn: return s.power.p_on;
    case Terminal::PowerSleep: return s.power.p_sleep;
    case Terminal::PowerSuspend: return s.power.p_suspend;
    case Terminal::PowerWakeup: return s.power.p_wakeup;
    case Terminal::TimeWakeup: return s.power.t_wakeup;
    case Terminal::TimeSuspend: return s.power.t_suspend;
    case Terminal::TimeOutTime: return s.power.timeout;
    case Terminal::Random: return rng.next_uniform();
  }
  return 0.0;
}

double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div:
      if (b == 0.0) throw EvalError("division by zero");
      return a / b;
    case BinaryOp::Mod:
      if (b == 0.0) throw EvalError("mod by zero");
      return std::fmod(a, b);
  }
  return 0.0;
}

}  // namespace

double evaluate(const Expr& e, const ServerSnapshot& snap, UniformSource& rng) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Terminal>) {
          return terminal_value(n, snap, rng);
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return static_cast<double>(n.value);
        } else if constexpr (std::is_same_v<T, DSpace>) {
          if (snap.design_params != nullptr) {
            if (auto it = snap.design_params->find(n.name); it != snap.design_params->end()) {
              return it->second;
            }
          }
          throw ConfigError("undefined dspace parameter '" + n.name + "'");
        } else if constexpr (std::is_same_v<T, Neg>) {
          return -evaluate(n.operand, snap, rng);
        } else {
          // Left operand first so Random draws follow reading order.
          const double a = evaluate(n.lhs, snap, rng);
          const double b = evaluate(n.rhs, snap, rng);
          return apply(n.op, a, b);
        }
      },
      e.node().value);
}

Selection select_server(const Expr& e, std::span<const ServerSnapshot> snaps, NdResolution nd,
                        UniformSource& rng) {
  if (snaps.empty()) throw LogicError("select_server called with no servers");
  Selection sel;
  sel.base.reserve(snaps.size());
  sel.resolved.reserve(snaps.size());
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const auto& s = snaps[i];
    if (s.id != static_cast<int>(i)) {
      throw LogicError("snapshot " + std::to_string(i) + " carries id " + std::to_string(s.id));
    }
    const double v = evaluate(e, s, rng);
    const double frac = nd == NdResolution::RandomFraction
                            ? rng.next_uniform()
                            : static_cast<double>(s.id) / static_cast<double>(s.num_servers);
    sel.base.push_back(v);
    sel.resolved.push_back(v + frac);
  }
  sel.server = 0;
  for (std::size_t i = 1; i < sel.resolved.size(); ++i) {
    if (sel.resolved[i] > sel.resolved[static_cast<std::size_t>(sel.server)]) {
      sel.server = static_cast<int>(i);
    }
  }
  return sel;
}

}  // namespace policy
}  // namespace greenlb
