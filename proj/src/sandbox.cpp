// SPDX-License-Identifier: Apache-2.0
#include "agentic/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sched.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "agentic/errors.hpp"

namespace agentic {

void to_json(nlohmann::json& j, const ExecutionResult& r) {
    j = nlohmann::json{{"stdout", r.stdout_text},
                       {"stderr", r.stderr_text},
                       {"exit_status", r.exit_status},
                       {"duration", r.duration_seconds},
                       {"timed_out", r.timed_out}};
}

void from_json(const nlohmann::json& j, ExecutionResult& r) {
    r.stdout_text = j.value("stdout", std::string());
    r.stderr_text = j.value("stderr", std::string());
    r.exit_status = j.value("exit_status", 0);
    r.duration_seconds = j.value("duration", 0.0);
    r.timed_out = j.value("timed_out", false);
}

namespace {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        auto pattern = (fs::temp_directory_path() / "agentic-sandbox-XXXXXX").string();
        if (::mkdtemp(pattern.data()) == nullptr) {
            throw ConfigError(std::string("cannot create sandbox directory: ") + std::strerror(errno));
        }
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

class Pipe {
public:
    Pipe() {
        if (::pipe2(fds_, O_CLOEXEC) != 0) throw ConfigError("pipe2 failed");
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    Pipe(const Pipe&) = delete;
    Pipe& operator=(const Pipe&) = delete;

    int read_end() const { return fds_[0]; }
    int write_end() const { return fds_[1]; }
    void close_read() { close_fd(fds_[0]); }
    void close_write() { close_fd(fds_[1]); }

private:
    static void close_fd(int& fd) {
        if (fd >= 0) ::close(fd);
        fd = -1;
    }
    int fds_[2] = {-1, -1};
};

void try_deny_network() {
    // Unprivileged user+net namespace: the child sees only a down loopback.
#ifdef CLONE_NEWNET
    ::unshare(CLONE_NEWUSER | CLONE_NEWNET);
#endif
}

}  // namespace

SubprocessExecutor::SubprocessExecutor(SandboxOptions options) : options_(std::move(options)) {
    if (options_.interpreter.empty()) throw ConfigError("sandbox interpreter command is empty");
    if (options_.timeout_seconds <= 0) throw ConfigError("sandbox timeout must be positive");
}

ExecutionResult SubprocessExecutor::execute(std::string_view code) {
    TempDir dir;
    auto script = dir.path() / options_.script_name;
    {
        std::ofstream out(script, std::ios::binary);
        out.write(code.data(), static_cast<std::streamsize>(code.size()));
        if (!out) throw ConfigError("cannot write sandbox script");
    }

    std::vector<std::string> args = options_.interpreter;
    args.push_back(script.string());
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    auto workdir = dir.path().string();

    Pipe out_pipe;
    Pipe err_pipe;
    Pipe exec_status;  // child writes errno here if exec fails

    auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) throw ConfigError(std::string("fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        if (options_.deny_network) try_deny_network();
        ::dup2(out_pipe.write_end(), STDOUT_FILENO);
        ::dup2(err_pipe.write_end(), STDERR_FILENO);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        if (::chdir(workdir.c_str()) != 0) ::_exit(126);
        ::execvp(argv[0], argv.data());
        int err = errno;
        [[maybe_unused]] auto n = ::write(exec_status.write_end(), &err, sizeof err);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out_pipe.close_write();
    err_pipe.close_write();
    exec_status.close_write();

    int exec_errno = 0;
    if (::read(exec_status.read_end(), &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
        ::waitpid(pid, nullptr, 0);
        throw ConfigError("cannot execute interpreter '" + options_.interpreter.front() +
                          "': " + std::strerror(exec_errno));
    }

    ExecutionResult result;
    auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(options_.timeout_seconds));
    pollfd fds[2] = {{out_pipe.read_end(), POLLIN, 0}, {err_pipe.read_end(), POLLIN, 0}};
    std::string* sinks[2] = {&result.stdout_text, &result.stderr_text};
    int open_streams = 2;
    char buf[8192];
    while (open_streams > 0) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            ::kill(-pid, SIGKILL);
            result.timed_out = true;
            break;
        }
        auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        int rc = ::poll(fds, 2, static_cast<int>(std::min<long long>(wait_ms + 1, 1000)));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || fds[i].revents == 0) continue;
            ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
            if (n <= 0) {
                fds[i].fd = -1;
                --open_streams;
                continue;
            }
            auto room = options_.output_cap_bytes - std::min(options_.output_cap_bytes, sinks[i]->size());
            sinks[i]->append(buf, std::min<std::size_t>(room, static_cast<std::size_t>(n)));
        }
    }

    int status = 0;
    if (result.timed_out) {
        ::waitpid(pid, &status, 0);
    } else {
        // Streams closed; the process may still be running (closed its fds).
        while (true) {
            pid_t r = ::waitpid(pid, &status, WNOHANG);
            if (r == pid) break;
            if (std::chrono::steady_clock::now() >= deadline) {
                ::kill(-pid, SIGKILL);
                ::waitpid(pid, &status, 0);
                result.timed_out = true;
                break;
            }
            ::usleep(2000);
        }
    }
    ::kill(-pid, SIGKILL);  // stray grandchildren

    if (result.timed_out) {
        result.exit_status = 128 + SIGKILL;
    } else if (WIFEXITED(status)) {
        result.exit_status = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_status = 128 + WTERMSIG(status);
    }
    result.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace agentic
