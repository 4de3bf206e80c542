// Command-line front end: database generation, training, matches, the
// engine loop and the HTTP game server.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hexq/arena.hpp"
#include "hexq/board.hpp"
#include "hexq/circuit.hpp"
#include "hexq/config.hpp"
#include "hexq/net/qnetwork.hpp"
#include "hexq/net/weights_io.hpp"
#include "hexq/posdb.hpp"
#include "hexq/protocol/engine.hpp"
#include "hexq/protocol/http_server.hpp"
#include "hexq/trainer.hpp"

namespace fs = std::filesystem;
using namespace hexq;

namespace {

int cmd_gen_db(int games, int size, double tau, std::uint64_t seed, const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const PositionDatabase db = generate_db(games, tau, size, seed);
  save_db(db, out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "wrote " << db.games.size() << " games, " << db.position_count() << " positions to " << out
            << " in " << std::fixed << std::setprecision(1) << secs << " s\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
  TrainingRun run = load_training_config(config_path);
  run.net.precision = Precision::Single;
  fs::create_directories(out_dir);

  PositionDatabase db;
  if (run.db_path.empty()) {
    std::cout << "generating " << run.db_positions << " start positions\n";
    db = generate_db_positions(run.db_positions, run.db_temperature, run.net.board_size, run.train.seed);
    save_db(db, fs::path(out_dir) / "positions.db");
  } else {
    db = load_db(run.db_path);
  }
  if (db.size != run.net.board_size) throw ConfigError("database board size differs from board_size");

  QNetwork<float> net = run.init_weights.empty() ? init_network<float>(run.net)
                                                 : load_weights<float>(run.init_weights, run.net);
  if (run.run_mentor && run.mentor.passes > 0) {
    std::cout << "mentoring on " << db.position_count() << " positions, " << run.mentor.passes << " passes\n";
    const MentorResult m = mentor(net, db, run.mentor);
    if (!m.trailing_loss.empty()) {
      std::cout << "mentor loss " << m.trailing_loss.front() << " -> " << m.trailing_loss.back() << '\n';
    }
    save_weights(net, fs::path(out_dir) / "mentored.nhx");
  }

  TrainHooks<float> hooks;
  const auto t0 = std::chrono::steady_clock::now();
  MetricsLog so_far;
  so_far.window = run.train.metrics_window;
  hooks.on_episode = [&](const EpisodeRecord& r) { so_far.episodes.push_back(r); };
  hooks.on_checkpoint = [&](int episodes, const QNetwork<float>& n) {
    save_weights(n, fs::path(out_dir) / ("checkpoint_" + std::to_string(episodes) + ".nhx"));
    std::ofstream partial(fs::path(out_dir) / "metrics.csv");
    so_far.write_csv(partial);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "episode " << episodes << "  " << std::fixed << std::setprecision(0) << secs << " s\n"
              << std::defaultfloat << std::flush;
  };
  const MetricsLog log = train_dql(net, db, run.train, hooks);
  std::ofstream csv(fs::path(out_dir) / "metrics.csv");
  log.write_csv(csv);
  save_weights(net, fs::path(out_dir) / "final.nhx");
  std::cout << "wrote " << (fs::path(out_dir) / "final.nhx").string() << '\n';
  return 0;
}

int cmd_arena(const std::string& a_spec, const std::string& b_spec, const std::string& mode, int games, int size,
              std::uint64_t seed, const std::string& csv_path) {
  const Agent a = parse_agent(a_spec);
  const Agent b = parse_agent(b_spec);
  const MatchReport rep = mode == "all-openings" ? tournament_all_openings(a, b, size, seed)
                                                 : tournament_unrestricted(a, b, size, games, seed);
  write_summary(rep, std::cout);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw Error("cannot open " + csv_path);
    write_report_csv(rep, out);
  }
  return 0;
}

int cmd_heuristic(int size, const std::string& moves, const std::string& mode) {
  std::vector<Cell> seq;
  std::istringstream in(moves);
  for (std::string tok; in >> tok;) seq.push_back(parse_cell(tok, size));
  const Board b = replay(size, seq);
  std::cout << diagram(b);
  if (b.finished()) {
    std::cout << "game over, " << to_string(*b.winner()) << " wins\n";
    return 0;
  }
  const HeuristicValues hv =
      heuristic_action_values(b, mode == "estimate" ? HeuristicMode::Estimate : HeuristicMode::Exact);
  std::vector<std::pair<double, Cell>> ranked;
  for (const Cell c : b.legal_moves()) ranked.push_back({*hv.at(c), c});
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  std::cout << to_string(b.to_move()) << " to move\n";
  for (const auto& [q, c] : ranked) std::cout << std::setw(4) << to_string(c) << "  " << std::showpos << q << '\n';
  return 0;
}

Agent engine_agent(const std::string& weights) {
  if (weights.empty()) return heuristic_agent();
  return net_agent(std::make_shared<const QNetwork<float>>(load_weights<float>(weights)), "net");
}

int cmd_serve(const std::string& weights, int port, const std::string& host, std::uint64_t seed) {
  GameServer api(engine_agent(weights), seed);
  httplib::Server server;
  mount_game_api(server, api);
  std::cout << "listening on " << host << ':' << port << std::endl;
  if (!server.listen(host, port)) throw Error("cannot listen on port " + std::to_string(port));
  return 0;
}

int cmd_engine(const std::string& weights, int size, std::uint64_t seed) {
  const Agent agent = engine_agent(weights);
  EngineSession session(agent, weights.empty() ? size : load_weights<float>(weights).config.board_size, seed);
  engine_loop(session, std::cin, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hex deep Q-learning engine"};
  app.require_subcommand(1);

  int games = 1000, size = 13;
  double tau = 0.2;
  std::uint64_t seed = 1;
  std::string out;
  auto* gen = app.add_subcommand("gen-db", "generate a start-position database");
  gen->add_option("--games", games, "number of noisy self-play games")->check(CLI::PositiveNumber);
  gen->add_option("--size", size, "board size")->check(CLI::Range(kMinBoardSize, kMaxBoardSize));
  gen->add_option("--tau", tau, "softmax temperature")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "root seed");
  gen->add_option("--out", out, "output file")->required();

  std::string config, out_dir;
  auto* train = app.add_subcommand("train", "mentor and then train by deep Q-learning");
  train->add_option("--config", config, "key=value config file")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out_dir, "output directory")->required();

  std::string a_spec, b_spec, mode = "open", csv;
  int arena_games = 200, arena_size = 13;
  std::uint64_t arena_seed = 1;
  auto* arena = app.add_subcommand("arena", "play a match between two agents");
  arena->add_option("--a", a_spec, "agent: random | heuristic | heuristic-estimate | net:<file>")->required();
  arena->add_option("--b", b_spec, "agent")->required();
  arena->add_option("--mode", mode, "open or all-openings")->check(CLI::IsMember({"open", "all-openings"}));
  arena->add_option("--games", arena_games, "games in open mode")->check(CLI::PositiveNumber);
  arena->add_option("--size", arena_size, "board size")->check(CLI::Range(kMinBoardSize, kMaxBoardSize));
  arena->add_option("--seed", arena_seed, "root seed");
  arena->add_option("--csv", csv, "per-game report file");

  int h_size = 13;
  std::string h_moves, h_mode = "exact";
  auto* heur = app.add_subcommand("heuristic", "rank moves by the resistance heuristic");
  heur->add_option("--size", h_size, "board size")->check(CLI::Range(kMinBoardSize, kMaxBoardSize));
  heur->add_option("--moves", h_moves, "moves so far, e.g. \"c3 b4\"");
  heur->add_option("--mode", h_mode, "exact or estimate")->check(CLI::IsMember({"exact", "estimate"}));

  std::string weights, host = "127.0.0.1";
  int port = 8080, e_size = 13;
  std::uint64_t s_seed = 1;
  auto* serve = app.add_subcommand("serve", "HTTP JSON game server");
  serve->add_option("--weights", weights, "network weights (default: heuristic engine)");
  serve->add_option("--port", port, "port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "bind address");
  serve->add_option("--seed", s_seed, "engine seed");

  auto* engine = app.add_subcommand("engine", "GTP-style engine on stdin/stdout");
  engine->add_option("--weights", weights, "network weights (default: heuristic engine)");
  engine->add_option("--size", e_size, "initial board size without weights")
      ->check(CLI::Range(kMinBoardSize, kMaxBoardSize));
  engine->add_option("--seed", s_seed, "engine seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_db(games, size, tau, seed, out);
    if (*train) return cmd_train(config, out_dir);
    if (*arena) return cmd_arena(a_spec, b_spec, mode, arena_games, arena_size, arena_seed, csv);
    if (*heur) return cmd_heuristic(h_size, h_moves, h_mode);
    if (*serve) return cmd_serve(weights, port, host, s_seed);
    if (*engine) return cmd_engine(weights, e_size, s_seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
