#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "greenlb/power.hpp"
#include "greenlb/random.hpp"

namespace greenlb {

/// How ties between equally preferred servers are broken.
///  - RandomFraction adds a fresh U[0,1) draw to every server's score.
///  - FixedOrder adds id / numServers, so higher ids win ties.
enum class NdResolution : std::uint8_t { RandomFraction, FixedOrder };

std::string_view to_string(NdResolution nd) noexcept;
/// Accepts "random" / "fixed_order".
std::optional<NdResolution> parse_nd_resolution(std::string_view text) noexcept;

using DesignParams = std::map<std::string, double, std::less<>>;

/// What the load balancer can observe about one server when a request arrives.
struct ServerSnapshot {
  int id = 0;
  int num_servers = 1;
  /// Queued plus in service.
  std::int64_t queue_size = 0;
  PowerState power_state = PowerState::Sleep;
  PowerModel power;
  /// Non-owning; null means no design parameters are bound.
  const DesignParams* design_params = nullptr;
};

namespace policy {

/// Leaves that read server state, constants or the random stream.
enum class Terminal : std::uint8_t {
  Id,
  NumServers,
  QueueSize,
  StateOn,
  StateSleep,
  StateSuspend,
  StateWakeup,
  PowerOn,
  PowerSleep,
  PowerSuspend,
  PowerWakeup,
  TimeWakeup,
  TimeSuspend,
  TimeOutTime,
  Random,
};

enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Mod };

struct Node;

/// Immutable policy expression tree. Copies share nodes, so an expression can
/// be handed to many concurrent simulation runs.
class Expr {
 public:
  explicit Expr(Node node);

  const Node& node() const noexcept { return *node_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const Node> node_;
};

/// Non-negative integer literal; negation is a separate node.
struct IntLit {
  std::int64_t value = 0;
  friend bool operator==(const IntLit&, const IntLit&) = default;
};

struct DSpace {
  std::string name;
  friend bool operator==(const DSpace&, const DSpace&) = default;
};

struct Neg {
  Expr operand;
  friend bool operator==(const Neg&, const Neg&) = default;
};

struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
  friend bool operator==(const Binary&, const Binary&) = default;
};

struct Node {
  std::variant<Terminal, IntLit, DSpace, Neg, Binary> value;
  friend bool operator==(const Node&, const Node&) = default;
};

// Builders. Throw ConfigError on a negative literal or empty dspace name.
Expr term(Terminal t);
Expr lit(std::int64_t value);
Expr dspace(std::string name);
Expr mod(Expr lhs, Expr rhs);
Expr operator-(Expr operand);
Expr operator+(Expr lhs, Expr rhs);
Expr operator-(Expr lhs, Expr rhs);
Expr operator*(Expr lhs, Expr rhs);
Expr operator/(Expr lhs, Expr rhs);

/// Parses one policy expression. `#` starts a comment running to end of line.
/// Precedence: unary minus > (*, /, mod) > (+, -); binary operators are left
/// associative. Throws ParseError with 1-based line/column.
Expr parse_policy(std::string_view text);

/// Canonical policy text with minimal parentheses; parse(to_string(e)) == e.
std::string to_string(const Expr& e);

/// Tree dump, e.g. `Sub(Neg(QueueSize), Mul(DSpace("q"), Sub(1, StateOn)))`.
std::string to_sexpr(const Expr& e);

/// Distinct dspace names in first-occurrence order.
std::vector<std::string> dspace_names(const Expr& e);

std::string_view spelling(Terminal t) noexcept;

/// Evaluates `e` for one server. `Random` leaves draw from `rng` in
/// left-to-right order. Throws EvalError on division/mod by zero and
/// ConfigError on an unbound dspace name.
double evaluate(const Expr& e, const ServerSnapshot& snap, UniformSource& rng);

struct Selection {
  int server = 0;
  std::vector<double> base;
  std::vector<double> resolved;
};

/// Scores every server and picks the highest resolved score. Servers are
/// visited in id order; each evaluation is followed by that server's
/// resolution draw when `nd` is RandomFraction. Exact residual ties go to
/// the lowest id. `snaps[i].id` must equal i.
Selection select_server(const Expr& e, std::span<const ServerSnapshot> snaps, NdResolution nd,
                        UniformSource& rng);

}  // namespace policy
}  // namespace greenlb
