#include "specforge/http.hpp"

#include <httplib.h>

#include "specforge/error.hpp"

namespace specforge::service {

void serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  auto bridge = [&service](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    r.body = req.body;
    const auto out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, "application/json; charset=utf-8");
  };
  server.Get(".*", bridge);
  server.Post(".*", bridge);
  server.Put(".*", bridge);
  server.Delete(".*", bridge);
  if (!server.bind_to_port(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  server.listen_after_bind();
}

}  // namespace specforge::service
