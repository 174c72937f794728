#pragma once

// Step protocol over local HTTP:
//   GET  /state          -> state document
//   POST /step {"id": n} -> state document after firing redex n
//   POST /reset          -> initial state document
// Failures answer {"error": code, "detail": text} and leave the state alone.

#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "llweave/error.hpp"
#include "llweave/sim.hpp"

namespace llweave::sim {

// One session over a fixed initial term; requests are handled serially.
class StepSession {
 public:
  explicit StepSession(pi::Process initial);

  nlohmann::json state() const;
  // Body of POST /step. Errors come back as error documents.
  nlohmann::json step(const std::string& body);
  nlohmann::json reset();
  const SimState& current() const { return state_; }

 private:
  pi::Process initial_;
  SimState state_;
  mutable std::mutex mutex_;
};

nlohmann::json error_document(ErrorCode code, const std::string& detail);

class StepServer {
 public:
  explicit StepServer(pi::Process initial);
  ~StepServer();
  StepServer(const StepServer&) = delete;
  StepServer& operator=(const StepServer&) = delete;

  // Binds 127.0.0.1; port 0 picks a free one. Returns the bound port or
  // throws PortInUse.
  int bind(int port);
  // Serves until stop(); blocks.
  void listen();
  // bind + listen on a background thread.
  int start(int port);
  void stop();

  StepSession& session() { return session_; }

 private:
  struct Impl;
  StepSession session_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace llweave::sim
