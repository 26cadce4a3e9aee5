#include "qnnv/solver/process.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace qnnv {

namespace {

struct Pipe {
  int fds[2] = {-1, -1};

  bool open(int flags) { return ::pipe2(fds, flags) == 0; }
  void close_read() { close_fd(fds[0]); }
  void close_write() { close_fd(fds[1]); }
  ~Pipe() {
    close_read();
    close_write();
  }

  static void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv, double timeout_secs,
                          const std::filesystem::path& cwd) {
  ProcessResult result;
  if (argv.empty()) {
    result.err = "empty command line";
    return result;
  }
  Pipe out, err, exec_status;
  if (!out.open(O_CLOEXEC) || !err.open(O_CLOEXEC) || !exec_status.open(O_CLOEXEC)) {
    result.err = std::string("pipe: ") + std::strerror(errno);
    return result;
  }

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const std::string dir = cwd.string();

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    result.err = std::string("fork: ") + std::strerror(errno);
    return result;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out.fds[1], STDOUT_FILENO);
    ::dup2(err.fds[1], STDERR_FILENO);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    if (!dir.empty() && ::chdir(dir.c_str()) != 0) {
      const int e = errno;
      [[maybe_unused]] auto n = ::write(exec_status.fds[1], &e, sizeof e);
      ::_exit(127);
    }
    ::execvp(args[0], args.data());
    const int e = errno;
    [[maybe_unused]] auto n = ::write(exec_status.fds[1], &e, sizeof e);
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  out.close_write();
  err.close_write();
  exec_status.close_write();

  int exec_errno = 0;
  if (::read(exec_status.fds[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    ::waitpid(pid, nullptr, 0);
    result.err = "cannot start '" + argv[0] + "': " + std::strerror(exec_errno);
    return result;
  }
  result.spawned = true;

  const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(timeout_secs));
  pollfd fds[2] = {{out.fds[0], POLLIN, 0}, {err.fds[0], POLLIN, 0}};
  std::string* sinks[2] = {&result.out, &result.err};
  int open_streams = 2;
  char buffer[8192];
  while (open_streams > 0) {
    const auto now = std::chrono::steady_clock::now();
    if (!result.timed_out && now >= deadline) {
      ::kill(-pid, SIGKILL);
      result.timed_out = true;
    }
    int wait_ms = 100;
    if (!result.timed_out)
      wait_ms = static_cast<int>(
          std::max<long long>(1, std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()));
    const int ready = ::poll(fds, 2, wait_ms);
    if (ready < 0 && errno != EINTR) break;
    for (int s = 0; s < 2; ++s) {
      if (fds[s].fd < 0 || !(fds[s].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t n = ::read(fds[s].fd, buffer, sizeof buffer);
      if (n > 0) {
        sinks[s]->append(buffer, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        fds[s].fd = -1;
        --open_streams;
      }
    }
  }

  int status = 0;
  ::waitpid(pid, &status, 0);
  // Reap anything the solver left behind in its group.
  ::kill(-pid, SIGKILL);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

} // namespace qnnv
