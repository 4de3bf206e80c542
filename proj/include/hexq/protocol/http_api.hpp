#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hexq/arena.hpp"
#include "hexq/board.hpp"
#include "hexq/error.hpp"
#include "hexq/parallel.hpp"
#include "hexq/protocol/engine.hpp"

namespace hexq {

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// JSON game API behind the web UI. Sessions are independent; requests on
/// one session are serialised by its own mutex, and the engine agent is
/// shared read-only.
///
///   POST /game            {"size": N, "human_color": "white"|"black"}
///   POST /game/{id}/move  {"cell": "a1"}
///   GET  /game/{id}
///
/// Every success body is the full game state; POST /game also carries it as
/// "board", and a reply by the engine is reported as "engine_move".
class GameServer {
 public:
  explicit GameServer(Agent engine, std::uint64_t seed = 0) : engine_(std::move(engine)), seed_(seed) {}

  HttpResponse handle_request(std::string_view method, std::string_view path, std::string_view body) {
    const std::vector<std::string_view> parts = split_path(path);
    if (parts.empty() || parts[0] != "game") return error(404, "not found");
    if (parts.size() == 1) {
      if (method != "POST") return error(405, "method not allowed");
      return create(body);
    }
    const auto session = find(parts[1]);
    if (parts.size() == 2) {
      if (method != "GET") return error(405, "method not allowed");
      if (!session) return error(404, "unknown game");
      std::lock_guard lock(session->mutex);
      return {200, state_json(*session)};
    }
    if (parts.size() == 3 && parts[2] == "move") {
      if (method != "POST") return error(405, "method not allowed");
      if (!session) return error(404, "unknown game");
      return move(*session, body);
    }
    return error(404, "not found");
  }

 private:
  struct Session {
    std::string id;
    Board board;
    Color human = Color::Black;
    std::vector<Cell> history;
    std::mt19937_64 rng;
    std::mutex mutex;
  };

  static HttpResponse error(int status, const std::string& message) {
    return {status, nlohmann::json{{"error", message}}};
  }

  static std::vector<std::string_view> split_path(std::string_view path) {
    if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
    std::vector<std::string_view> parts;
    while (!path.empty()) {
      const auto slash = path.find('/');
      const auto part = path.substr(0, slash);
      if (!part.empty()) parts.push_back(part);
      if (slash == std::string_view::npos) break;
      path.remove_prefix(slash + 1);
    }
    return parts;
  }

  std::shared_ptr<Session> find(std::string_view id) {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(std::string(id));
    return it == sessions_.end() ? nullptr : it->second;
  }

  static nlohmann::json state_json(const Session& s) {
    nlohmann::json cells = nlohmann::json::array();
    for (int i = 0; i < s.board.cell_count(); ++i) {
      const Stone st = s.board.at(i);
      cells.push_back(st == Stone::White ? "white" : st == Stone::Black ? "black" : "empty");
    }
    nlohmann::json history = nlohmann::json::array();
    for (const Cell c : s.history) history.push_back(to_string(c));
    const auto w = s.board.winner();
    return {
        {"id", s.id},
        {"size", s.board.size()},
        {"cells", cells},
        {"to_move", std::string(to_string(s.board.to_move()))},
        {"status", w ? "finished" : "in_progress"},
        {"winner", w ? nlohmann::json(std::string(to_string(*w))) : nlohmann::json(nullptr)},
        {"history", history},
        {"human_color", std::string(to_string(s.human))},
    };
  }

  /// Lets the engine move while it is the engine's turn in an unfinished game.
  std::optional<Cell> engine_reply(Session& s) {
    if (s.board.finished() || s.board.to_move() == s.human) return std::nullopt;
    const Cell c = choose_move(engine_, s.board, s.rng);
    s.board.apply(c);
    s.history.push_back(c);
    return c;
  }

  HttpResponse create(std::string_view body) {
    const auto req = nlohmann::json::parse(body.empty() ? std::string_view("{}") : body, nullptr, false);
    if (req.is_discarded() || !req.is_object()) return error(400, "malformed body");
    int size = 13;
    Color human = Color::Black;
    if (req.contains("size")) {
      if (!req["size"].is_number_integer()) return error(400, "size must be an integer");
      size = req["size"].get<int>();
      if (size < kMinBoardSize || size > kMaxBoardSize) return error(400, "size must be in [5, 13]");
    }
    if (req.contains("human_color")) {
      if (!req["human_color"].is_string()) return error(400, "human_color must be a string");
      const auto c = parse_color(req["human_color"].get<std::string>());
      if (!c) return error(400, "human_color must be white or black");
      human = *c;
    }
    auto session = std::make_shared<Session>();
    {
      std::lock_guard lock(sessions_mutex_);
      const std::uint64_t n = next_id_++;
      session->id = "g" + std::to_string(n);
      session->rng.seed(derive_seed(seed_, n));
      sessions_[session->id] = session;
    }
    std::lock_guard lock(session->mutex);
    session->board = new_board(size);
    session->human = human;
    const auto reply = engine_reply(*session);
    nlohmann::json out = state_json(*session);
    out["board"] = out["cells"];
    if (reply) out["engine_move"] = to_string(*reply);
    return {200, out};
  }

  HttpResponse move(Session& s, std::string_view body) {
    const auto req = nlohmann::json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.is_object() || !req.contains("cell") || !req["cell"].is_string()) {
      return error(400, "malformed body");
    }
    std::lock_guard lock(s.mutex);
    Cell cell;
    try {
      cell = parse_cell(req["cell"].get<std::string>(), s.board.size());
    } catch (const ParseError&) {
      return error(400, "malformed cell");
    }
    if (s.board.finished()) return error(409, "game over");
    if (s.board.to_move() != s.human) return error(409, "not your turn");
    if (s.board.at(cell) != Stone::Empty) return error(409, "illegal move");
    s.board.apply(cell);
    s.history.push_back(cell);
    const auto reply = engine_reply(s);
    nlohmann::json out = state_json(s);
    if (reply) out["engine_move"] = to_string(*reply);
    return {200, out};
  }

  Agent engine_;
  std::uint64_t seed_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace hexq
