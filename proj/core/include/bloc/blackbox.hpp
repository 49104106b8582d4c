#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "bloc/objective.hpp"

namespace bloc {

/// Evaluates a user loss through a long-lived child process.
///
/// The command runs under /bin/sh. For every evaluation the engine writes the
/// d x d matrix to the child's stdin as d CSV lines (17 significant digits)
/// and reads back one line holding a single floating-point value. The child
/// must flush after each answer. Calls are serialized with a mutex.
class ChildProcessLoss {
 public:
  explicit ChildProcessLoss(std::string command);
  ~ChildProcessLoss();

  ChildProcessLoss(const ChildProcessLoss&) = delete;
  ChildProcessLoss& operator=(const ChildProcessLoss&) = delete;

  /// Throws std::runtime_error if the child exits or answers garbage.
  double operator()(const CorrelationMatrix& c);

  const std::string& command() const noexcept { return command_; }

 private:
  std::string command_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
  std::mutex mutex_;
};

/// LossSpec::black_box wired to a ChildProcessLoss (not concurrency safe).
LossSpec child_process_loss(std::size_t dim, const std::string& command);

}  // namespace bloc
