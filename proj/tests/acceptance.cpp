// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Criterion names may be given on the command line to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hexq/arena.hpp"
#include "hexq/board.hpp"
#include "hexq/circuit.hpp"
#include "hexq/config.hpp"
#include "hexq/net/hex_mask.hpp"
#include "hexq/net/qnetwork.hpp"
#include "hexq/net/rmsprop.hpp"
#include "hexq/net/weights_io.hpp"
#include "hexq/posdb.hpp"
#include "hexq/replay.hpp"
#include "hexq/trainer.hpp"
#include "oracles/bfs_winner.hpp"
#include "oracles/finite_diff.hpp"
#include "test_util.hpp"

using namespace hexq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome rules_oracle() {
  long checked = 0, mismatches = 0;
  auto compare = [&](const Board& b) {
    const bool w = oracle::has_chain(b, Color::White);
    const bool k = oracle::has_chain(b, Color::Black);
    const std::optional<Color> want = w && !k ? std::optional(Color::White)
                                     : k && !w ? std::optional(Color::Black)
                                               : std::nullopt;
    ++checked;
    if ((w && k) || b.winner() != want) ++mismatches;
  };

  // every assignment of {empty, white, black} to the 9 cells of 3x3
  long exhaustive = 0;
  for (int code = 0; code < 19683; ++code) {
    std::vector<std::pair<Cell, Color>> stones;
    for (int i = 0, x = code; i < 9; ++i, x /= 3) {
      if (x % 3 == 1) stones.push_back({{i / 3, i % 3}, Color::White});
      if (x % 3 == 2) stones.push_back({{i / 3, i % 3}, Color::Black});
    }
    compare(Board::setup(3, stones, Color::White));
    ++exhaustive;
  }

  std::mt19937_64 rng(101);
  const int per_size = 10000;
  for (int n = 5; n <= 13; ++n) {
    std::uniform_int_distribution<int> count(0, n * n);
    for (int k = 0; k < per_size; ++k) compare(testutil::random_fill(n, count(rng), rng));
  }
  return {mismatches == 0,
          fmt("%ld boards (%ld exhaustive 3x3, %d random per size 5-13), %ld mismatches", checked, exhaustive,
              per_size, mismatches)};
}

// ---------------------------------------------------------------------------

Board lanes_board(int n, std::vector<int> lanes, std::vector<Cell> white = {}) {
  std::vector<std::pair<Cell, Color>> stones;
  for (int r = 0; r < n; ++r) {
    if (std::find(lanes.begin(), lanes.end(), r) != lanes.end()) continue;
    for (int c = 0; c < n; ++c) stones.push_back({{r, c}, Color::Black});
  }
  for (const Cell c : white) stones.push_back({c, Color::White});
  return Board::setup(n, stones, Color::White);
}

Outcome circuit_golden() {
  double worst = 0.0;
  int cases = 0;
  auto check = [&](double got, double want) {
    worst = std::max(worst, std::abs(got - want));
    ++cases;
  };

  // Lone lane of n empty cells: edge links of 1 and n - 1 inner links of 2.
  for (int n = 1; n <= 13; ++n) check(solve_circuit(lanes_board(n, {0}), Color::White).total_current, 1.0 / (2 * n));
  // Own stones short their half of each link: . O O . . -> 1 + 1 + 1 + 2 + 1
  check(solve_circuit(lanes_board(5, {0}, {{0, 1}, {0, 2}}), Color::White).total_current, 1.0 / 6.0);
  // Separated lanes add as parallel conductances.
  check(solve_circuit(lanes_board(5, {0, 2}), Color::White).total_current, 2.0 / 10.0);
  check(solve_circuit(lanes_board(9, {0, 2, 4, 6, 8}), Color::White).total_current, 5.0 / 18.0);
  check(solve_circuit(lanes_board(7, {1, 5}, {{5, 3}}), Color::White).total_current, 1.0 / 14.0 + 1.0 / 12.0);
  // Black sees the transposed picture.
  check(solve_circuit(transpose_swap(lanes_board(6, {0, 3})), Color::Black).total_current, 2.0 / 12.0);
  // Abstract networks.
  check(solve_network({4, 0, 1, {{0, 2, 1.0}, {2, 3, 2.0}, {3, 1, 3.0}}}).total_current, 1.0 / 6.0);
  check(solve_network({2, 0, 1, {{0, 1, 2.0}, {0, 1, 3.0}}}).total_current, 0.5 + 1.0 / 3.0);
  check(solve_network({4, 0, 1, {{0, 2, 1.0}, {2, 3, 1.0}, {3, 1, 1.0}, {2, 1, 2.0}}}).total_current, 0.5);
  const bool analytic_ok = worst <= 1e-9;

  std::mt19937_64 rng(202);
  double worst_ratio = 0.0;
  int solved = 0;
  for (int k = 0; k < 500; ++k) {
    const Board b = testutil::random_open_position(9, 60, rng);
    for (const Color p : {Color::White, Color::Black}) {
      const auto sol = solve_circuit(b, p);
      if (!(sol.total_current > 0) || std::isinf(sol.total_current)) continue;
      worst_ratio = std::max(worst_ratio, sol.residual / sol.total_current);
      ++solved;
    }
  }
  const bool residual_ok = worst_ratio <= 1e-8 && solved > 0;
  return {analytic_ok && residual_ok,
          fmt("%d analytic circuits, max |error| %.2e (<= 1e-9); %d random 9x9 solves, max residual/C %.2e (<= 1e-8)",
              cases, worst, solved, worst_ratio)};
}

// ---------------------------------------------------------------------------

Outcome heuristic_formula() {
  std::mt19937_64 rng(303);
  int positions = 0, winning_moves = 0, bad_wins = 0, out_of_range = 0;
  double worst_sym = 0.0;
  std::uniform_int_distribution<int> size(5, 9);
  while (positions < 100) {
    // play a random game; the position before its last move has a winning move
    const int n = size(rng);
    Board b = new_board(n);
    Board before = b;
    while (!b.finished()) {
      before = b;
      const auto legal = b.legal_moves();
      b.apply(legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)]);
    }
    ++positions;
    const auto hv = heuristic_action_values(before, HeuristicMode::Exact);
    const auto ht = heuristic_action_values(transpose_swap(before), HeuristicMode::Exact);
    for (const Cell a : before.legal_moves()) {
      const double q = *hv.at(a);
      if (!(q >= -1.0 && q <= 1.0)) ++out_of_range;
      if (before.play(a).winner() == before.to_move()) {
        ++winning_moves;
        if (q != 1.0) ++bad_wins;
      }
      worst_sym = std::max(worst_sym, std::abs(*ht.at(transpose(a)) - q));
    }
  }
  // range and symmetry on open middle-game positions too
  for (int k = 0; k < 100; ++k) {
    const Board b = testutil::random_open_position(size(rng), 20, rng);
    const auto hv = heuristic_action_values(b, HeuristicMode::Exact);
    const auto ht = heuristic_action_values(transpose_swap(b), HeuristicMode::Exact);
    for (const Cell a : b.legal_moves()) {
      const double q = *hv.at(a);
      if (!(q >= -1.0 && q <= 1.0)) ++out_of_range;
      worst_sym = std::max(worst_sym, std::abs(*ht.at(transpose(a)) - q));
    }
  }
  const bool ok = bad_wins == 0 && winning_moves >= positions && out_of_range == 0 && worst_sym <= 1e-9;
  return {ok, fmt("%d one-move-to-win positions, %d winning moves, %d not scored 1; %d values outside [-1,1]; "
                  "max transpose_swap gap %.2e (<= 1e-9)",
                  positions, winning_moves, bad_wins, out_of_range, worst_sym)};
}

// ---------------------------------------------------------------------------

template <typename T>
InputTensor<T> random_input(int n, std::mt19937_64& rng, double scale = 1.0) {
  InputTensor<T> t;
  t.board_size = n;
  t.values.resize(static_cast<std::size_t>(kInputChannels * t.extent() * t.extent()));
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& v : t.values) v = static_cast<T>(u(rng));
  return t;
}

Outcome gradient_check() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  std::size_t checked = 0, kinks = 0;
  const int nets = 20;
  for (int trial = 0; trial < nets; ++trial) {
    NetConfig c;
    c.board_size = 2 + trial % 3;
    c.conv_layers = 1 + trial % 3;
    c.filters_d3 = (trial % 5 == 3) ? 0 : 1 + trial % 3;
    c.filters_d5 = (trial % 5 == 4) ? 0 : 1 + (trial / 3) % 3;
    c.precision = Precision::Double;
    c.init_seed = 1000 + static_cast<std::uint64_t>(trial);
    auto net = init_network<double>(c);
    std::normal_distribution<double> g(0.0, 0.1);
    for (auto& a : net.params.arrays) {
      for (auto& v : a.values) v += g(rng);
    }
    net.params.apply_masks();

    const int batch = 3;
    const int actions = c.actions();
    std::vector<InputTensor<double>> xs;
    for (int k = 0; k < batch; ++k) xs.push_back(random_input<double>(c.board_size, rng));
    std::vector<double> coef(static_cast<std::size_t>(batch * actions));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : coef) v = u(rng);

    ForwardCache<double> cache;
    auto loss = [&] {
      forward(net, std::span<const InputTensor<double>>(xs), cache);
      double s = 0.0;
      for (int b = 0; b < batch; ++b) {
        const auto v = cache.values(b);
        for (int a = 0; a < actions; ++a) s += coef[static_cast<std::size_t>(b * actions + a)] * v[static_cast<std::size_t>(a)];
      }
      return s;
    };
    auto pattern = [&] {
      std::vector<bool> p;
      for (const auto& z : cache.preact) {
        for (Eigen::Index i = 0; i < z.size(); ++i) p.push_back(z.data()[i] > 0);
      }
      return p;
    };
    loss();
    const Gradients<double> grads = backward(net, cache, std::span<const double>(coef));
    for (const auto& e : oracle::central_differences(net, loss, pattern)) {
      if (e.kink) {
        ++kinks;
        continue;
      }
      const double an = grads.arrays[e.array].values[e.index];
      worst = std::max(worst, std::abs(an - e.numeric) / std::max({std::abs(an), std::abs(e.numeric), 1e-4}));
      ++checked;
    }
  }

  // masked taps after 1000 optimizer steps on real gradients
  NetConfig c;
  c.board_size = 5;
  c.conv_layers = 3;
  c.filters_d3 = 3;
  c.filters_d5 = 3;
  c.precision = Precision::Double;
  auto net = init_network<double>(c);
  auto opt = make_optimizer(net, {1e-2, 0.9, 1e-8});
  ForwardCache<double> cache;
  std::vector<double> coef(static_cast<std::size_t>(4 * c.actions()));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int applied = 0;
  for (int step = 0; step < 1000; ++step) {
    std::vector<InputTensor<double>> xs;
    for (int k = 0; k < 4; ++k) xs.push_back(random_input<double>(5, rng));
    for (auto& v : coef) v = u(rng);
    forward(net, std::span<const InputTensor<double>>(xs), cache);
    applied += rmsprop_step(net, opt, backward(net, cache, std::span<const double>(coef))) ? 1 : 0;
  }
  long masked = 0, nonzero = 0;
  for (const auto& a : net.params.arrays) {
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (!a.masked(i)) continue;
      ++masked;
      if (a.values[i] != 0.0) ++nonzero;
    }
  }
  const bool ok = worst < 1e-6 && checked > 10000 && applied == 1000 && nonzero == 0 && masked > 0;
  return {ok, fmt("%d nets, %zu partials (%zu skipped at ReLU kinks), max relative error %.2e (< 1e-6); "
                  "%ld masked weights, %ld nonzero after %d steps",
                  nets, checked, kinks, worst, masked, nonzero, applied)};
}

// ---------------------------------------------------------------------------

Outcome output_contract() {
  NetConfig c;
  c.board_size = 5;
  c.conv_layers = 4;
  c.filters_d3 = 16;
  c.filters_d5 = 16;
  c.precision = Precision::Single;
  c.init_seed = 7;
  auto net = init_network<float>(c);
  std::mt19937_64 rng(505);
  long outside = 0, evaluated = 0;
  float lo = 1.f, hi = -1.f;
  ForwardCache<float> cache;
  const int total = 100000, batch = 500;
  for (int done = 0; done < total; done += batch) {
    // every tenth batch runs with the head pushed hard into saturation
    const int phase = (done / batch) % 10;
    if (phase == 0 || phase == 1) {
      auto& hb = net.params.head_b().values;
      for (auto& v : hb) v = phase == 0 ? 1e6f : -1e6f;
    } else if (phase == 2) {
      std::fill(net.params.head_b().values.begin(), net.params.head_b().values.end(), 0.f);
    }
    std::vector<InputTensor<float>> xs;
    for (int k = 0; k < batch; ++k) xs.push_back(random_input<float>(5, rng, phase == 3 ? 100.0 : 1.0));
    forward(net, std::span<const InputTensor<float>>(xs), cache);
    for (int b = 0; b < batch; ++b) {
      for (const float v : cache.values(b)) {
        ++evaluated;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (!(v > -1.f && v < 1.f)) ++outside;
      }
    }
  }
  const auto m3 = hex_mask(3);
  const auto m5 = hex_mask(5);
  const auto t3 = std::count(m3.begin(), m3.end(), 1);
  const auto t5 = std::count(m5.begin(), m5.end(), 1);
  const bool ok = outside == 0 && t3 == 7 && t5 == 19 && active_taps(3) == 7 && active_taps(5) == 19;
  return {ok, fmt("%d inputs, %ld action values, %ld outside (-1,1), range [%.9g, %.9g]; taps %ld and %ld",
                  total, evaluated, outside, static_cast<double>(lo), static_cast<double>(hi),
                  static_cast<long>(t3), static_cast<long>(t5))};
}

// ---------------------------------------------------------------------------

Outcome replay_memory() {
  const std::size_t cap = 1000;
  ReplayBuffer<long> m(cap);
  long fifo_errors = 0;
  for (long i = 0; i < 100000; ++i) {
    m.add(i);
    const long stored = std::min<long>(i + 1, static_cast<long>(cap));
    if (static_cast<long>(m.size()) != stored || m.at(0) != i + 1 - stored || m.at(m.size() - 1) != i) ++fifo_errors;
    if (i % 997 == 0 || i == 99999) {
      for (std::size_t k = 0; k < m.size(); ++k) {
        if (m.at(k) != i + 1 - stored + static_cast<long>(k)) ++fifo_errors;
      }
    }
  }

  ReplayBuffer<long> u(cap);
  for (long i = 0; i < 1500; ++i) u.add(i);  // wrapped once
  std::mt19937_64 rng(606);
  std::vector<long> counts(cap, 0);
  const long draws = 100000;
  long bad_draw = 0;
  for (long d = 0; d < draws; d += 100) {
    const auto batch = u.sample_batch(100, rng);
    for (const long v : *batch) {
      if (v < 500 || v >= 1500) {
        ++bad_draw;
        continue;
      }
      ++counts[static_cast<std::size_t>(v - 500)];
    }
  }
  const double expected = static_cast<double>(draws) / cap;
  double chi2 = 0.0;
  for (const long c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double dof = cap - 1.0;
  const double z = (chi2 - dof) / std::sqrt(2.0 * dof);
  const bool ok = fifo_errors == 0 && bad_draw == 0 && std::abs(z) < 5.0;
  return {ok, fmt("FIFO over 1e5 inserts into capacity %zu: %ld errors; chi-square %.1f on %.0f dof over %ld draws, "
                  "z = %.2f (|z| < 5)",
                  cap, fifo_errors, chi2, dof, draws, z)};
}

// ---------------------------------------------------------------------------

Outcome dql_fidelity() {
  NetConfig c;
  c.board_size = 5;
  c.conv_layers = 2;
  c.filters_d3 = 4;
  c.filters_d5 = 4;
  c.init_seed = 11;
  const PositionDatabase db = generate_db_positions(1000, 0.2, 5, 707);
  TrainConfig t;
  t.episodes = 4000;
  t.batch_size = 16;
  t.replay_capacity = 5000;
  t.seed = 708;

  long records = 0, rewards = 0, bad_terminal = 0, bad_episode = 0, bad_replay = 0;
  long episode_rewards = 0;
  TrainHooks<float> hooks;
  hooks.on_experience = [&](const Experience& e) {
    ++records;
    rewards += e.reward;
    episode_rewards += e.reward;
    // terminal <=> reward 1 <=> the action finished the game, judged independently
    const Board after = e.state.play(e.action);
    const bool ends = oracle::winner(after).has_value();
    if ((e.reward == 1) != e.terminal || e.terminal != ends || e.next_state.finished() != ends) ++bad_terminal;
    if (e.state.to_move() != Color::White || e.state.finished()) ++bad_replay;
  };
  long white_first = 0, flipped_start = 0, next_flips = 0, transitions = 0;
  hooks.on_episode = [&](const EpisodeRecord& r) {
    if (episode_rewards != 1 || r.rewards != 1) ++bad_episode;
    episode_rewards = 0;
    white_first += r.first_mover == Color::White ? 1 : 0;
    flipped_start += r.start_flipped ? 1 : 0;
    next_flips += r.next_state_flips;
    transitions += r.episode_len;
  };
  auto a = init_network<float>(c);
  const MetricsLog la = train_dql(a, db, t, hooks);

  auto b = init_network<float>(c);
  TrainConfig t2 = t;
  t2.episodes = 500;
  const MetricsLog lb = train_dql(b, db, t2);
  // the second run sees another heap layout, as a fresh process would
  std::vector<std::unique_ptr<char[]>> shift;
  for (int k = 1; k <= 9; ++k) shift.push_back(std::make_unique<char[]>(static_cast<std::size_t>(24 * k)));
  auto b2 = init_network<float>(c);
  const MetricsLog lb2 = train_dql(b2, db, t2);
  std::ostringstream cb, cb2;
  lb.write_csv(cb);
  lb2.write_csv(cb2);
  const bool reproducible = b.params == b2.params && cb.str() == cb2.str();

  auto z = [](long hits, long n) { return (hits - 0.5 * n) / std::sqrt(0.25 * n); };
  const long eps = static_cast<long>(la.episodes.size());
  const double z_first = z(white_first, eps);
  const double z_flip = z(flipped_start, eps);
  const double z_next = z(next_flips, transitions);
  const bool freq_ok = std::abs(z_first) < 5 && std::abs(z_flip) < 5 && std::abs(z_next) < 5;
  const bool ok = bad_terminal == 0 && bad_episode == 0 && bad_replay == 0 && rewards == eps &&
                  records == transitions && reproducible && freq_ok;
  return {ok, fmt("%ld episodes, %ld transitions, %ld rewards; %ld terminal/reward mismatches, %ld episodes without "
                  "exactly one reward; reproducible %s; z(first mover White) %.2f, z(start flip) %.2f, "
                  "z(next-state flip) %.2f (|z| < 5)",
                  eps, transitions, rewards, bad_terminal, bad_episode, reproducible ? "yes" : "NO", z_first,
                  z_flip, z_next)};
}

// ---------------------------------------------------------------------------

Outcome tournament_harness() {
  bool ok = true;
  std::string detail;
  for (const int n : {5, 9, 13}) {
    const auto rep = tournament_all_openings(random_agent(), random_agent(), n, 808);
    std::set<std::pair<bool, int>> openings;
    bool forced = true;
    for (std::size_t i = 0; i < rep.results.size(); ++i) {
      const auto& g = rep.results[i];
      forced = forced && g.forced_opening && g.moves.front() == *g.forced_opening;
      if (g.forced_opening) openings.insert({i < static_cast<std::size_t>(n * n), g.forced_opening->row * n + g.forced_opening->col});
    }
    const bool this_ok = rep.games == 2 * n * n && static_cast<int>(rep.results.size()) == 2 * n * n &&
                         rep.a_first_games == n * n && rep.a_second_games == n * n &&
                         static_cast<int>(openings.size()) == 2 * n * n && forced;
    ok = ok && this_ok;
    detail += fmt("%s%dx%d: %d games (%d + %d), %zu distinct (side, opening)", detail.empty() ? "" : "; ", n, n,
                  rep.games, rep.a_first_games, rep.a_second_games, openings.size());
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------

Outcome desk_scale_learning() {
  const auto t0 = std::chrono::steady_clock::now();
  std::istringstream cfg(
      "board_size = 5\n"
      "conv_layers = 4\n"
      "filters_d3 = 16\n"
      "filters_d5 = 16\n"
      "episodes = 20000\n"
      "db_positions = 1000\n"
      "mentor_passes = 20\n"
      "learning_rate = 0.00025\n");
  TrainingRun run = parse_training_config(cfg);
  run.net.precision = Precision::Single;

  const PositionDatabase db =
      generate_db_positions(run.db_positions, run.db_temperature, run.net.board_size, run.train.seed);
  auto net = std::make_shared<QNetwork<float>>(init_network<float>(run.net));
  const MentorResult m = mentor(*net, db, run.mentor);
  const double t_mentor = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "  mentored on " << db.position_count() << " positions, loss " << m.trailing_loss.front() << " -> "
            << m.trailing_loss.back() << " (" << t_mentor << " s)\n";

  TrainHooks<float> hooks;
  hooks.on_checkpoint = [&](int episodes, const QNetwork<float>&) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "  episode " << episodes << " at " << static_cast<long>(s) << " s\n";
  };
  run.train.checkpoint_interval = 2000;
  const MetricsLog log = train_dql(*net, db, run.train, hooks);
  const double t_train = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::filesystem::path out = "acceptance_out";
  std::filesystem::create_directories(out);
  save_weights(*net, out / "desk_scale.nhx");
  std::ofstream csv(out / "desk_scale_metrics.csv");
  log.write_csv(csv);

  const Agent agent = net_agent(net, "dql");
  const auto vs_random = tournament_unrestricted(agent, random_agent(), 5, 500, 909);
  const auto vs_heuristic = tournament_unrestricted(agent, heuristic_agent(HeuristicMode::Exact), 5, 200, 910);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::size_t n = log.episodes.size();
  const auto q = log.running_mean(&EpisodeRecord::mean_abs_max_q);
  const auto cost = log.running_mean(&EpisodeRecord::mean_cost);
  const double q_first = mean_over(q, 0, 1000), q_last = mean_over(q, n - 1000, n);
  const double c_first = mean_over(cost, 0, 1000), c_last = mean_over(cost, n - 1000, n);

  const bool ok = n >= 20000 && vs_random.a_win_rate() >= 0.90 && vs_heuristic.a_win_rate() >= 0.55 &&
                  q_last > q_first && c_last < c_first;
  return {ok, fmt("%zu episodes; vs random %d/500 (%.1f%%, >= 90%%); vs heuristic-exact %d/200 (%.1f%%, >= 55%%); "
                  "trailing |maxQ| %.4f -> %.4f; trailing cost %.5f -> %.5f; wall clock %.0f s (training %.0f s)",
                  n, vs_random.a_wins(), 100 * vs_random.a_win_rate(), vs_heuristic.a_wins(),
                  100 * vs_heuristic.a_win_rate(), q_first, q_last, c_first, c_last, wall, t_train)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"rules-oracle", rules_oracle},
      {"circuit-golden", circuit_golden},
      {"heuristic-formula", heuristic_formula},
      {"gradient-check", gradient_check},
      {"output-contract", output_contract},
      {"replay", replay_memory},
      {"dql-fidelity", dql_fidelity},
      {"tournament-harness", tournament_harness},
      {"desk-scale-learning", desk_scale_learning},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  for (const auto& name : only) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == name; })) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
  }
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << fmt(" [%.1f s]", secs) << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
