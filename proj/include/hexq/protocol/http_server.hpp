#pragma once

#include <string>

#include "httplib.h"

#include "hexq/protocol/http_api.hpp"

namespace hexq {

/// Routes every /game request of an httplib server into `api`.
inline void mount_game_api(httplib::Server& server, GameServer& api) {
  const auto route = [&api](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = api.handle_request(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Get(R"(/game/.*)", route);
  server.Post(R"(/game(/.*)?)", route);
  server.Options(R"(/game(/.*)?)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

}  // namespace hexq
