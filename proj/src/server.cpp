#include "llweave/server.hpp"

#include <sys/socket.h>

#include <thread>

#include <httplib.h>

#include "llweave/error.hpp"

namespace llweave::sim {

nlohmann::json error_document(ErrorCode code, const std::string& detail) {
  return {{"error", std::string(to_string(code))}, {"detail", detail}};
}

StepSession::StepSession(pi::Process initial) : initial_(std::move(initial)), state_(initial_state(initial_)) {}

nlohmann::json StepSession::state() const {
  std::lock_guard lock(mutex_);
  return state_to_json(state_);
}

nlohmann::json StepSession::step(const std::string& body) {
  std::lock_guard lock(mutex_);
  nlohmann::json request = nlohmann::json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object() || !request.contains("id") ||
      !request["id"].is_number_integer()) {
    return error_document(ErrorCode::InvalidArgument, "expected a body of the form {\"id\": <integer>}");
  }
  auto id = request["id"].get<long long>();
  if (id < 0) return error_document(ErrorCode::InvalidRedexId, "redex id must be non-negative");
  try {
    state_ = sim::step(state_, static_cast<std::size_t>(id));
  } catch (const Error& e) {
    return error_document(e.code(), e.what());
  }
  return state_to_json(state_);
}

nlohmann::json StepSession::reset() {
  std::lock_guard lock(mutex_);
  state_ = initial_state(initial_);
  return state_to_json(state_);
}

struct StepServer::Impl {
  httplib::Server http;
  std::thread worker;
};

namespace {

void reply(httplib::Response& res, const nlohmann::json& doc) {
  res.status = doc.contains("error") ? 400 : 200;
  res.set_content(doc.dump(), "application/json");
}

}  // namespace

StepServer::StepServer(pi::Process initial) : session_(std::move(initial)), impl_(std::make_unique<Impl>()) {
  auto& http = impl_->http;
  // Plain SO_REUSEADDR so a second server on a live port fails to bind.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  http.Get("/state", [this](const httplib::Request&, httplib::Response& res) { reply(res, session_.state()); });
  http.Post("/step", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, session_.step(req.body));
  });
  http.Post("/reset", [this](const httplib::Request&, httplib::Response& res) { reply(res, session_.reset()); });
}

StepServer::~StepServer() { stop(); }

int StepServer::bind(int port) {
  auto& http = impl_->http;
  if (port == 0) {
    int bound = http.bind_to_any_port("127.0.0.1");
    if (bound < 0) throw Error(ErrorCode::PortInUse, "could not bind any local port");
    return bound;
  }
  if (!http.bind_to_port("127.0.0.1", port)) {
    throw Error(ErrorCode::PortInUse, "port " + std::to_string(port) + " is already in use");
  }
  return port;
}

void StepServer::listen() { impl_->http.listen_after_bind(); }

int StepServer::start(int port) {
  int bound = bind(port);
  impl_->worker = std::thread([this] { listen(); });
  impl_->http.wait_until_ready();
  return bound;
}

void StepServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace llweave::sim
