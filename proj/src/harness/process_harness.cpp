// Copyright 2026 The patternfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "pfuzz/common/error.hpp"
#include "pfuzz/harness/harness.hpp"

namespace pfuzz::harness {

namespace {

// Slack on top of a test's own timeout for process startup and reporting.
constexpr double kReplySlackSeconds = 30;
constexpr double kCatalogDeadlineSeconds = 600;

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

struct ProcessHarness::Impl {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;  // bytes read past the last newline
  std::mutex mu;

  ~Impl() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    if (pid > 0) {
      // Closing stdin asks the loop to exit; give it a moment, then insist.
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid, nullptr, WNOHANG) == pid) return;
        ::usleep(10'000);
      }
      ::kill(pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
    }
  }

  void write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(to_child, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw HarnessError(errno_text("write to harness"));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(double deadline_seconds) {
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::duration<double>(deadline_seconds);
    for (;;) {
      if (auto nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) throw HarnessError("harness did not answer in time");
      pollfd p{from_child, POLLIN, 0};
      int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1'000'000)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw HarnessError(errno_text("poll harness"));
      }
      if (rc == 0) continue;
      char chunk[65536];
      ssize_t n = ::read(from_child, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw HarnessError(errno_text("read from harness"));
      }
      if (n == 0) throw HarnessError("harness closed its output");
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

ProcessHarness::ProcessHarness(std::vector<std::string> argv) : impl_(new Impl) {
  if (argv.empty()) {
    delete impl_;
    throw InvariantError("empty harness command");
  }
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
    delete impl_;
    throw HarnessError(errno_text("pipe"));
  }
  std::vector<char*> args;
  for (auto& a : argv) args.push_back(a.data());
  args.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0) {
    delete impl_;
    throw HarnessError(errno_text("fork"));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  impl_->pid = pid;
  impl_->to_child = in_pipe[1];
  impl_->from_child = out_pipe[0];
  // A dead harness must surface as an error, not a SIGPIPE.
  ::signal(SIGPIPE, SIG_IGN);
}

ProcessHarness::~ProcessHarness() { delete impl_; }

Json ProcessHarness::roundtrip(const Json& request, double deadline_seconds) {
  std::lock_guard lock(impl_->mu);
  impl_->write_all(request.dump() + "\n");
  std::string line = impl_->read_line(deadline_seconds);
  try {
    Json reply = Json::parse(line);
    if (!reply.is_object()) throw HarnessError("harness reply is not an object");
    return reply;
  } catch (const Json::parse_error& e) {
    throw HarnessError(std::string("malformed harness reply: ") + e.what());
  }
}

namespace {

void require_ok(const Json& reply) {
  if (reply.value("status", "") != "ok")
    throw HarnessError("harness error: " + reply.value("error", reply.dump()));
}

}  // namespace

std::vector<Json> ProcessHarness::catalog(const std::string& library_ref) {
  Json reply = roundtrip({{"action", "catalog"}, {"library_ref", library_ref}},
                         kCatalogDeadlineSeconds);
  require_ok(reply);
  if (!reply.contains("apis") || !reply["apis"].is_array())
    throw HarnessError("catalog reply without an apis array");
  return reply["apis"].get<std::vector<Json>>();
}

std::string ProcessHarness::instrument(const std::string& program) {
  Json reply = roundtrip({{"action", "instrument"}, {"program", program}}, kReplySlackSeconds);
  require_ok(reply);
  if (!reply.contains("program") || !reply["program"].is_string())
    throw HarnessError("instrument reply without a program");
  return reply["program"].get<std::string>();
}

ExecutionResult ProcessHarness::execute(const std::string& program, double timeout_seconds) {
  Json reply = roundtrip(
      {{"action", "execute"}, {"program", program}, {"timeout_seconds", timeout_seconds}},
      timeout_seconds + kReplySlackSeconds);
  if (reply.value("status", "") == "error")
    throw HarnessError("harness error: " + reply.value("error", std::string("unspecified")));
  ExecutionResult r;
  try {
    r = ExecutionResult::from_json(reply);
  } catch (const ParseError& e) {
    throw HarnessError(std::string("bad execute reply: ") + e.what());
  }
  r.normalize();
  return r;
}

}  // namespace pfuzz::harness
