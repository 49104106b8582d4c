#include "bloc/blackbox.hpp"

#include <cerrno>
#include <charconv>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string_view>
#include <system_error>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace bloc {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::system_error(errno, std::generic_category(), what);
}

void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("black-box loss: write to child failed");
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

ChildProcessLoss::ChildProcessLoss(std::string command) : command_(std::move(command)) {
  // A child that dies mid-protocol must surface as an error, not kill us.
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw_errno("black-box loss: pipe");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw_errno("black-box loss: pipe");
  }
  pid_ = ::fork();
  if (pid_ < 0) throw_errno("black-box loss: fork");
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ChildProcessLoss::~ChildProcessLoss() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

double ChildProcessLoss::operator()(const CorrelationMatrix& c) {
  std::lock_guard lock(mutex_);
  std::string message;
  char buf[32];
  const std::size_t d = c.dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g", c(i, j));
      message.append(buf, static_cast<std::size_t>(len));
      message.push_back(j + 1 < d ? ',' : '\n');
    }
  }
  write_all(to_child_, message);

  std::size_t newline;
  while ((newline = pending_.find('\n')) == std::string::npos) {
    char chunk[256];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("black-box loss: read from child failed");
    }
    if (n == 0) {
      throw std::runtime_error("black-box loss: child process '" + command_ +
                               "' closed its output");
    }
    pending_.append(chunk, static_cast<std::size_t>(n));
  }
  std::string line = pending_.substr(0, newline);
  pending_.erase(0, newline + 1);

  const auto first = line.find_first_not_of(" \t\r");
  const auto last = line.find_last_not_of(" \t\r");
  if (first == std::string::npos) {
    throw std::runtime_error("black-box loss: empty answer from child");
  }
  const std::string_view token(line.data() + first, last - first + 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::runtime_error("black-box loss: cannot parse answer '" + std::string(token) + "'");
  }
  return value;
}

LossSpec child_process_loss(std::size_t dim, const std::string& command) {
  auto child = std::make_shared<ChildProcessLoss>(command);
  return LossSpec::black_box(
      dim, [child](const CorrelationMatrix& c) { return (*child)(c); },
      /*concurrency_safe=*/false);
}

}  // namespace bloc
