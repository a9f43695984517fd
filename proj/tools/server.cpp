#include <cstdio>

#include "ratiodelay/server.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"HTTP JSON service for the ratio-dependent predator-prey model"};
  std::string host = "127.0.0.1";
  int port = 8080;
  int budget_ms = 10000;
  std::string origin = "*";
  app.add_option("--host", host, "bind address")->capture_default_str();
  app.add_option("--port", port, "TCP port")->capture_default_str()->check(CLI::Range(1, 65535));
  app.add_option("--budget-ms", budget_ms, "per-request compute budget")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--cors-origin", origin, "value of Access-Control-Allow-Origin")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  httplib::Server svr;
  ratiodelay::server::install_routes(svr, {std::chrono::milliseconds(budget_ms), origin});
  std::printf("listening on http://%s:%d\n", host.c_str(), port);
  std::fflush(stdout);
  if (!svr.listen(host, port)) {
    std::fprintf(stderr, "could not bind %s:%d\n", host.c_str(), port);
    return 1;
  }
  return 0;
}
