#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hexq/circuit.hpp"
#include "oracles/resistance.hpp"
#include "test_util.hpp"

using namespace hexq;

namespace {

// Board whose only open lane for White is row `lane`; every other cell is black
// except the listed white stones.
Board single_lane(int n, int lane, std::vector<int> white_cols = {}) {
  std::vector<std::pair<Cell, Color>> stones;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (r != lane) stones.push_back({{r, c}, Color::Black});
    }
  }
  for (const int c : white_cols) stones.push_back({{lane, c}, Color::White});
  return Board::setup(n, stones, Color::White);
}

}  // namespace

TEST(Network, SeriesAndParallel) {
  ResistorNetwork series{4, 0, 1, {{0, 2, 1.0}, {2, 3, 2.0}, {3, 1, 3.0}}};
  EXPECT_NEAR(solve_network(series).total_current, 1.0 / 6.0, 1e-12);

  ResistorNetwork parallel{2, 0, 1, {{0, 1, 2.0}, {0, 1, 3.0}}};
  EXPECT_NEAR(solve_network(parallel).total_current, 0.5 + 1.0 / 3.0, 1e-12);

  // (1 + 1) in parallel with 2, then 1 in series: R = 1 + 1 = 2
  ResistorNetwork mixed{4, 0, 1, {{0, 2, 1.0}, {2, 3, 1.0}, {3, 1, 1.0}, {2, 1, 2.0}}};
  EXPECT_NEAR(solve_network(mixed).total_current, 0.5, 1e-12);
}

TEST(Network, BalancedBridgeCarriesNoCurrent) {
  // Wheatstone bridge with equal ratios: the middle resistor is idle.
  ResistorNetwork bridge{4, 0, 1, {{0, 2, 1.0}, {0, 3, 2.0}, {2, 1, 2.0}, {3, 1, 4.0}, {2, 3, 5.0}}};
  const auto sol = solve_network(bridge);
  EXPECT_NEAR(sol.current[4], 0.0, 1e-12);
  EXPECT_NEAR(sol.total_current, 1.0 / 3.0 + 1.0 / 6.0, 1e-12);
}

TEST(Network, LongChainUsesIterativeSolver) {
  const int links = 200;  // well past the dense limit
  ResistorNetwork chain;
  chain.node_count = links + 1;
  chain.resistors.push_back({0, 2, 1.0});
  for (int k = 2; k < links; ++k) chain.resistors.push_back({k, k + 1, 1.0});
  chain.resistors.push_back({links, 1, 1.0});
  const auto sol = solve_network(chain);
  EXPECT_GT(sol.iterations, 0);
  EXPECT_NEAR(sol.total_current, 1.0 / links, 1e-9);
}

TEST(Network, DisconnectedSinkGivesZero) {
  ResistorNetwork cut{4, 0, 1, {{0, 2, 1.0}, {3, 1, 1.0}}};
  const auto sol = solve_network(cut);
  EXPECT_EQ(sol.total_current, 0.0);
  EXPECT_THROW(solve_network(ResistorNetwork{1, 0, 0, {}}), ConfigError);
}

TEST(Circuit, SingleLaneIsASeriesChain) {
  for (int n = 1; n <= 9; ++n) {
    // n empty cells: edge link 1, n - 1 inner links of 2, edge link 1
    EXPECT_NEAR(solve_circuit(single_lane(n, 0), Color::White).total_current, 1.0 / (2.0 * n), 1e-9) << n;
  }
  // own stones are conductors: lane a . O O . . on 5x5 -> 1 + 1 + 1 + 2 + 1
  EXPECT_NEAR(solve_circuit(single_lane(5, 0, {1, 2}), Color::White).total_current, 1.0 / 6.0, 1e-9);
}

TEST(Circuit, TwoSeparatedLanesAddInParallel) {
  std::vector<std::pair<Cell, Color>> stones;
  for (int c = 0; c < 5; ++c) {
    for (const int r : {1, 3, 4}) stones.push_back({{r, c}, Color::Black});
  }
  const Board b = Board::setup(5, stones, Color::White);
  EXPECT_NEAR(solve_circuit(b, Color::White).total_current, 2.0 / 10.0, 1e-9);
}

TEST(Circuit, OpponentChainCutsCurrent) {
  Board b = new_board(5);
  for (int r = 0; r < 5; ++r) {
    b = b.with_to_move(Color::Black).play({r, 2});
  }
  ASSERT_EQ(b.winner(), Color::Black);
  const auto sol = solve_circuit(b, Color::White);
  EXPECT_EQ(sol.total_current, 0.0);
  for (const double i : sol.cell_current) EXPECT_EQ(i, 0.0);
  EXPECT_TRUE(std::isinf(solve_circuit(b, Color::Black).total_current));
}

TEST(Circuit, EmptyBoardSymmetricUnderRotation) {
  const Board b = Board::setup(3, {}, Color::White);
  const auto sol = solve_circuit(b, Color::White);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(sol.cell_current[static_cast<std::size_t>(i)],
                                          sol.cell_current[static_cast<std::size_t>(8 - i)], 1e-9);
  // the Black circuit on the empty board is the transposed White circuit
  const auto black = solve_circuit(b, Color::Black);
  EXPECT_NEAR(black.total_current, sol.total_current, 1e-9);
}

TEST(Circuit, OccupiedCellsCarryNoReportedCurrent) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const Board b = testutil::random_open_position(7, 30, rng);
    const auto sol = solve_circuit(b, Color::White);
    for (int i = 0; i < b.cell_count(); ++i) {
      if (b.at(i) != Stone::Empty) {
        EXPECT_EQ(sol.cell_current[static_cast<std::size_t>(i)], 0.0);
      }
      EXPECT_GE(sol.cell_current[static_cast<std::size_t>(i)], 0.0);
    }
  }
}

TEST(Circuit, MatchesDenseReference) {
  std::mt19937_64 rng(23);
  for (const int n : {3, 5, 7, 9, 11}) {
    for (int k = 0; k < 40; ++k) {
      const Board b = testutil::random_open_position(n, n * n, rng);
      for (const Color p : {Color::White, Color::Black}) {
        const double want = oracle::crossing_current(b, p);
        const double got = solve_circuit(b, p).total_current;
        EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, want)) << diagram(b);
      }
    }
  }
}

TEST(Circuit, ResidualIsTinyRelativeToCurrent) {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 100; ++k) {
    const Board b = testutil::random_open_position(9, 40, rng);
    for (const Color p : {Color::White, Color::Black}) {
      const auto sol = solve_circuit(b, p);
      if (sol.total_current > 0) {
        EXPECT_LE(sol.residual, 1e-8 * sol.total_current);
      }
    }
  }
}

TEST(Heuristic, ActionValueFormula) {
  EXPECT_DOUBLE_EQ(action_value(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(action_value(1.0, 2.0), -0.5);
  EXPECT_DOUBLE_EQ(action_value(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(action_value(1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(action_value(0.0, 1.0), -1.0);
  EXPECT_DOUBLE_EQ(action_value(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(action_value(1e-12, 1e-13), 0.0);  // dead area
  EXPECT_DOUBLE_EQ(action_value(std::numeric_limits<double>::infinity(), 0.3), 1.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng);
    EXPECT_DOUBLE_EQ(action_value(a, b), -action_value(b, a));
  }
}

TEST(Heuristic, ImmediateWinScoresOne) {
  // White to move with four stones across row 2; (2, 4) wins.
  Board b = new_board(5);
  for (int c = 0; c < 4; ++c) {
    b.apply({2, c});
    b.apply({0, c});
  }
  for (const auto mode : {HeuristicMode::Exact}) {
    const auto hv = heuristic_action_values(b, mode);
    EXPECT_DOUBLE_EQ(*hv.at({2, 4}), 1.0);
    EXPECT_FALSE(hv.at({2, 0}).has_value());
  }
}

TEST(Heuristic, ValuesInRangeAndOnlyOnEmptyCells) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 40; ++k) {
    const Board b = testutil::random_open_position(6, 25, rng);
    for (const auto mode : {HeuristicMode::Exact, HeuristicMode::Estimate}) {
      const auto hv = heuristic_action_values(b, mode);
      for (int i = 0; i < b.cell_count(); ++i) {
        EXPECT_EQ(hv.values[static_cast<std::size_t>(i)].has_value(), b.at(i) == Stone::Empty);
        if (hv.values[static_cast<std::size_t>(i)]) {
          EXPECT_GE(*hv.values[static_cast<std::size_t>(i)], -1.0);
          EXPECT_LE(*hv.values[static_cast<std::size_t>(i)], 1.0);
        }
      }
    }
  }
}

TEST(Heuristic, ExactModeMatchesRecomputation) {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 10; ++k) {
    const Board b = testutil::random_open_position(5, 10, rng);
    const auto hv = heuristic_action_values(b, HeuristicMode::Exact);
    for (const Cell a : b.legal_moves()) {
      const Board after = b.play(a);
      const double c1 = oracle::crossing_current(after, b.to_move());
      const double c2 = oracle::crossing_current(after, opponent(b.to_move()));
      double q;
      if (std::isinf(c1)) q = 1.0;
      else if (c1 < 1e-9 && c2 < 1e-9) q = 0.0;
      else if (c1 > c2) q = 1.0 - c2 / c1;
      else if (c2 > c1) q = c1 / c2 - 1.0;
      else q = 0.0;
      EXPECT_NEAR(*hv.at(a), q, 1e-9);
    }
  }
}

TEST(Heuristic, SymmetricUnderTransposeSwap) {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 50; ++k) {
    const Board b = testutil::random_open_position(5, 15, rng);
    const auto hv = heuristic_action_values(b, HeuristicMode::Exact);
    const auto ht = heuristic_action_values(transpose_swap(b), HeuristicMode::Exact);
    for (const Cell a : b.legal_moves()) EXPECT_NEAR(*ht.at(transpose(a)), *hv.at(a), 1e-9);
  }
}

TEST(Heuristic, EstimateModeUsesOneSolvePerPlayer) {
  const Board b = replay(5, std::vector<Cell>{{2, 2}});
  const auto mine = solve_circuit(b, Color::Black);
  const auto theirs = solve_circuit(b, Color::White);
  const auto hv = heuristic_action_values(b, HeuristicMode::Estimate);
  for (const Cell a : b.legal_moves()) {
    const auto i = static_cast<std::size_t>(b.index(a));
    const double c1 = mine.total_current + mine.cell_current[i];
    const double c2 = std::max(theirs.total_current - theirs.cell_current[i], kCurrentFloor);
    EXPECT_NEAR(*hv.at(a), action_value(c1, c2), 1e-12);
  }
}

TEST(Heuristic, FinishedBoardIsAUsageError) {
  Board b = new_board(5);
  for (int r = 0; r < 5; ++r) b = b.with_to_move(Color::Black).play({r, 0});
  EXPECT_THROW(heuristic_action_values(b, HeuristicMode::Exact), UsageError);
}
