#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "hexq/board.hpp"
#include "hexq/error.hpp"

namespace hexq {

// ---------------------------------------------------------------------------
// Generic resistor networks
// ---------------------------------------------------------------------------

struct Resistor {
  int a = 0;
  int b = 0;
  double resistance = 1.0;
};

/// Source is held at potential 1, sink at potential 0.
struct ResistorNetwork {
  int node_count = 0;
  int source = 0;
  int sink = 1;
  std::vector<Resistor> resistors;
};

struct NetworkSolution {
  std::vector<double> potential;  // per node
  std::vector<double> current;    // per resistor, positive when flowing a -> b
  double total_current = 0.0;     // net current leaving the source
  double residual = 0.0;          // ||L v - b||_2 over the free nodes
  int iterations = 0;             // CG iterations, 0 for the dense path
};

namespace detail {

/// Compressed symmetric matrix over the free nodes.
struct SparseSpd {
  int n = 0;
  std::vector<int> row_start;
  std::vector<int> col;
  std::vector<double> val;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = row_start[static_cast<std::size_t>(i)]; k < row_start[static_cast<std::size_t>(i) + 1]; ++k) {
        s += val[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col[static_cast<std::size_t>(k)])];
      }
      y[static_cast<std::size_t>(i)] = s;
    }
  }
};

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

inline std::vector<double> dense_solve(const SparseSpd& m, std::vector<double> rhs) {
  const auto n = static_cast<std::size_t>(m.n);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = m.row_start[i]; k < m.row_start[i + 1]; ++k) {
      a[i * n + static_cast<std::size_t>(m.col[static_cast<std::size_t>(k)])] += m.val[static_cast<std::size_t>(k)];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      std::swap(rhs[k], rhs[p]);
    }
    const double pivot = a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / pivot;
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      rhs[i] -= f * rhs[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * x[j];
    x[k] = s / a[k * n + k];
  }
  return x;
}

/// Jacobi-preconditioned conjugate gradient.
inline std::vector<double> conjugate_gradient(const SparseSpd& m, const std::vector<double>& rhs,
                                              double tolerance, int& iterations) {
  const auto n = static_cast<std::size_t>(m.n);
  std::vector<double> inv_diag(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = m.row_start[i]; k < m.row_start[i + 1]; ++k) {
      if (static_cast<std::size_t>(m.col[static_cast<std::size_t>(k)]) == i) {
        inv_diag[i] = 1.0 / m.val[static_cast<std::size_t>(k)];
      }
    }
  }
  std::vector<double> x(n, 0.0), r = rhs, z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
  const double stop = tolerance * std::max(norm2(rhs), std::numeric_limits<double>::min());
  const int max_iter = 20 * static_cast<int>(n) + 100;
  iterations = 0;
  while (norm2(r) > stop && iterations < max_iter) {
    m.multiply(p, q);
    double pq = 0.0;
    for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    double rz_next = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz_next += r[i] * z[i];
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++iterations;
  }
  return x;
}

}  // namespace detail

/// Systems with at most this many free nodes are solved by dense elimination.
inline constexpr int kDenseSolveLimit = 48;

/// Solves for node potentials with the source at 1 and the sink at 0.
/// Nodes that cannot reach the source keep potential 0 and carry no current;
/// if the sink is unreachable the total current is 0.
inline NetworkSolution solve_network(const ResistorNetwork& net, double tolerance = 1e-10) {
  const int n = net.node_count;
  if (n < 2 || net.source < 0 || net.sink < 0 || net.source >= n || net.sink >= n ||
      net.source == net.sink) {
    throw ConfigError("resistor network needs distinct source and sink nodes");
  }
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < net.resistors.size(); ++k) {
    const Resistor& r = net.resistors[k];
    if (r.a < 0 || r.b < 0 || r.a >= n || r.b >= n || r.a == r.b) {
      throw ConfigError("resistor endpoints out of range");
    }
    if (!(r.resistance > 0.0) || !std::isfinite(r.resistance)) {
      throw ConfigError("resistances must be positive and finite");
    }
    incident[static_cast<std::size_t>(r.a)].push_back(static_cast<int>(k));
    incident[static_cast<std::size_t>(r.b)].push_back(static_cast<int>(k));
  }

  NetworkSolution sol;
  sol.potential.assign(static_cast<std::size_t>(n), 0.0);
  sol.current.assign(net.resistors.size(), 0.0);
  sol.potential[static_cast<std::size_t>(net.source)] = 1.0;

  std::vector<char> reached(static_cast<std::size_t>(n), 0);
  std::queue<int> frontier;
  frontier.push(net.source);
  reached[static_cast<std::size_t>(net.source)] = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    if (u == net.sink) continue;
    for (const int k : incident[static_cast<std::size_t>(u)]) {
      const Resistor& r = net.resistors[static_cast<std::size_t>(k)];
      const int v = r.a == u ? r.b : r.a;
      if (!reached[static_cast<std::size_t>(v)]) {
        reached[static_cast<std::size_t>(v)] = 1;
        frontier.push(v);
      }
    }
  }
  if (!reached[static_cast<std::size_t>(net.sink)]) {
    for (int v = 0; v < n; ++v) {
      if (reached[static_cast<std::size_t>(v)]) sol.potential[static_cast<std::size_t>(v)] = 1.0;
    }
    return sol;
  }

  // Free nodes: reached from the source without passing through the sink.
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  std::vector<int> nodes;
  for (int v = 0; v < n; ++v) {
    if (reached[static_cast<std::size_t>(v)] && v != net.source && v != net.sink) {
      slot[static_cast<std::size_t>(v)] = static_cast<int>(nodes.size());
      nodes.push_back(v);
    }
  }
  const int m = static_cast<int>(nodes.size());
  detail::SparseSpd lap;
  lap.n = m;
  lap.row_start.push_back(0);
  std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const int v = nodes[static_cast<std::size_t>(i)];
    double diag = 0.0;
    const auto diag_pos = lap.col.size();
    lap.col.push_back(i);
    lap.val.push_back(0.0);
    for (const int k : incident[static_cast<std::size_t>(v)]) {
      const Resistor& r = net.resistors[static_cast<std::size_t>(k)];
      const int w = r.a == v ? r.b : r.a;
      const double g = 1.0 / r.resistance;
      diag += g;
      if (w == net.source) {
        rhs[static_cast<std::size_t>(i)] += g;
      } else if (w != net.sink) {
        lap.col.push_back(slot[static_cast<std::size_t>(w)]);
        lap.val.push_back(-g);
      }
    }
    lap.val[diag_pos] = diag;
    lap.row_start.push_back(static_cast<int>(lap.col.size()));
  }

  std::vector<double> x;
  if (m > 0) {
    x = m <= kDenseSolveLimit ? detail::dense_solve(lap, rhs)
                              : detail::conjugate_gradient(lap, rhs, tolerance, sol.iterations);
  }
  for (int i = 0; i < m; ++i) {
    sol.potential[static_cast<std::size_t>(nodes[static_cast<std::size_t>(i)])] = x[static_cast<std::size_t>(i)];
  }
  if (m > 0) {
    std::vector<double> lx(static_cast<std::size_t>(m));
    lap.multiply(x, lx);
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = lx[static_cast<std::size_t>(i)] - rhs[static_cast<std::size_t>(i)];
      s += d * d;
    }
    sol.residual = std::sqrt(s);
  }

  for (std::size_t k = 0; k < net.resistors.size(); ++k) {
    const Resistor& r = net.resistors[k];
    if (!reached[static_cast<std::size_t>(r.a)] || !reached[static_cast<std::size_t>(r.b)]) continue;
    sol.current[k] = (sol.potential[static_cast<std::size_t>(r.a)] -
                      sol.potential[static_cast<std::size_t>(r.b)]) / r.resistance;
    if (r.a == net.source) sol.total_current += sol.current[k];
    if (r.b == net.source) sol.total_current -= sol.current[k];
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Board circuits
// ---------------------------------------------------------------------------

struct CircuitSolution {
  Color player = Color::White;
  int size = 0;
  std::vector<double> cell_current;  // row-major; zero on occupied cells
  double total_current = 0.0;        // +inf when the player already has a winning chain
  double residual = 0.0;
};

/// Network for `player`: every empty cell is a node, each own group is one
/// node (groups touching an own edge become that edge's terminal), opponent
/// cells are removed. Adjacent nodes are joined by r(a) + r(b) with r = 1 for
/// empty and 0 for own cells. Returns the network and the node of each cell
/// (-1 for opponent cells).
inline ResistorNetwork board_network(const Board& board, Color player, std::vector<int>& node_of) {
  const int n = board.size();
  const Edge near_edge = player == Color::White ? Edge::Left : Edge::Top;
  const Edge far_edge = player == Color::White ? Edge::Right : Edge::Bottom;
  const Stone own = stone_of(player);
  const int near_root = board.group_of(near_edge);
  const int far_root = board.group_of(far_edge);

  ResistorNetwork net;
  net.source = 0;
  net.sink = 1;
  int next = 2;
  std::vector<int> group_node(kMaxCells + 4, -1);
  node_of.assign(static_cast<std::size_t>(board.cell_count()), -1);
  for (int i = 0; i < board.cell_count(); ++i) {
    const Stone s = board.at(i);
    if (s == Stone::Empty) {
      node_of[static_cast<std::size_t>(i)] = next++;
    } else if (s == own) {
      const int root = board.group_of(i);
      if (root == near_root) {
        node_of[static_cast<std::size_t>(i)] = 0;
      } else if (root == far_root) {
        node_of[static_cast<std::size_t>(i)] = 1;
      } else {
        auto& g = group_node[static_cast<std::size_t>(root)];
        if (g < 0) g = next++;
        node_of[static_cast<std::size_t>(i)] = g;
      }
    }
  }
  net.node_count = next;

  auto r_of = [&](int idx) { return board.at(idx) == Stone::Empty ? 1.0 : 0.0; };
  // Forward half of the neighbour set visits each adjacent pair once.
  constexpr std::array<Cell, 3> forward{{{0, 1}, {1, -1}, {1, 0}}};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int i = r * n + c;
      const int ni = node_of[static_cast<std::size_t>(i)];
      if (ni < 0) continue;
      for (const Cell d : forward) {
        const Cell nb{r + d.row, c + d.col};
        if (!board.contains(nb)) continue;
        const int j = board.index(nb);
        const int nj = node_of[static_cast<std::size_t>(j)];
        if (nj < 0 || nj == ni) continue;
        const double res = r_of(i) + r_of(j);
        if (res > 0.0) net.resistors.push_back({ni, nj, res});
      }
      if (board.at(i) == Stone::Empty) {
        const bool on_near = player == Color::White ? c == 0 : r == 0;
        const bool on_far = player == Color::White ? c == n - 1 : r == n - 1;
        if (on_near) net.resistors.push_back({0, ni, 1.0});
        if (on_far) net.resistors.push_back({ni, 1, 1.0});
      }
    }
  }
  return net;
}

inline CircuitSolution solve_circuit(const Board& board, Color player) {
  CircuitSolution out;
  out.player = player;
  out.size = board.size();
  out.cell_current.assign(static_cast<std::size_t>(board.cell_count()), 0.0);
  if (board.winner() == player) {
    out.total_current = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<int> node_of;
  const ResistorNetwork net = board_network(board, player, node_of);
  const NetworkSolution sol = solve_network(net);
  out.total_current = sol.total_current;
  out.residual = sol.residual;

  std::vector<double> flow(static_cast<std::size_t>(net.node_count), 0.0);
  for (std::size_t k = 0; k < net.resistors.size(); ++k) {
    const double a = std::abs(sol.current[k]);
    flow[static_cast<std::size_t>(net.resistors[k].a)] += a;
    flow[static_cast<std::size_t>(net.resistors[k].b)] += a;
  }
  for (int i = 0; i < board.cell_count(); ++i) {
    if (board.at(i) == Stone::Empty) {
      out.cell_current[static_cast<std::size_t>(i)] =
          0.5 * flow[static_cast<std::size_t>(node_of[static_cast<std::size_t>(i)])];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Action values
// ---------------------------------------------------------------------------

enum class HeuristicMode { Estimate, Exact };

inline constexpr double kCurrentFloor = 1e-9;

struct HeuristicValues {
  int size = 0;
  HeuristicMode mode = HeuristicMode::Exact;
  std::vector<std::optional<double>> values;  // row-major; empty on occupied cells

  std::optional<double> at(Cell c) const { return values[static_cast<std::size_t>(c.row * size + c.col)]; }
};

/// Maps the post-move crossing currents of the mover and the opponent to [-1, 1].
inline double action_value(double mover_current, double opponent_current) {
  if (mover_current < kCurrentFloor && opponent_current < kCurrentFloor) return 0.0;
  double q = 0.0;
  if (mover_current > opponent_current) {
    q = 1.0 - opponent_current / mover_current;
  } else if (opponent_current > mover_current) {
    q = mover_current / opponent_current - 1.0;
  }
  return std::clamp(q, -1.0, 1.0);
}

/// Value of every legal move for the side to move. Exact mode plays each move
/// and re-solves both circuits; Estimate mode solves once per player and
/// shifts the crossing currents by the current through the cell.
inline HeuristicValues heuristic_action_values(const Board& board, HeuristicMode mode) {
  if (board.finished()) throw UsageError("heuristic values need a position with legal moves");
  const Color mover = board.to_move();
  const Color other = opponent(mover);
  HeuristicValues hv;
  hv.size = board.size();
  hv.mode = mode;
  hv.values.assign(static_cast<std::size_t>(board.cell_count()), std::nullopt);

  if (mode == HeuristicMode::Exact) {
    for (int i = 0; i < board.cell_count(); ++i) {
      if (board.at(i) != Stone::Empty) continue;
      const Board next = board.play(board.cell_at(i));
      if (next.winner() == mover) {
        hv.values[static_cast<std::size_t>(i)] = 1.0;
        continue;
      }
      const double c1 = solve_circuit(next, mover).total_current;
      const double c2 = solve_circuit(next, other).total_current;
      hv.values[static_cast<std::size_t>(i)] = action_value(c1, c2);
    }
  } else {
    const CircuitSolution own = solve_circuit(board, mover);
    const CircuitSolution opp = solve_circuit(board, other);
    for (int i = 0; i < board.cell_count(); ++i) {
      if (board.at(i) != Stone::Empty) continue;
      const double c1 = own.total_current + own.cell_current[static_cast<std::size_t>(i)];
      const double c2 = std::max(opp.total_current - opp.cell_current[static_cast<std::size_t>(i)],
                                 kCurrentFloor);
      hv.values[static_cast<std::size_t>(i)] = action_value(c1, c2);
    }
  }
  return hv;
}

}  // namespace hexq
