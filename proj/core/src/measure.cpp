#include "paragraph/measure.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "paragraph/errors.hpp"

namespace paragraph {

ExecutorConfig executor_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("compile") || !doc.contains("run"))
        throw SchemaError("executor config requires 'compile' and 'run' templates");
    ExecutorConfig cfg;
    cfg.compile_template = doc["compile"].get<std::string>();
    cfg.run_template = doc["run"].get<std::string>();
    cfg.timeout_s = doc.value("timeout_s", 60);
    cfg.retries = doc.value("retries", 0);
    if (cfg.timeout_s < 1) throw SchemaError("timeout_s must be >= 1");
    if (cfg.retries < 0) throw SchemaError("retries must be >= 0");
    return cfg;
}

ExecutorConfig load_executor_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open executor config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return executor_config_from_json(doc);
}

namespace {

std::string substitute(std::string tpl, const std::string& key, const std::string& value) {
    std::string pat = "{" + key + "}";
    for (size_t pos = tpl.find(pat); pos != std::string::npos; pos = tpl.find(pat, pos))
        tpl.replace(pos, pat.size(), value), pos += value.size();
    return tpl;
}

void drain(int fd, std::string& sink) {
    char buf[4096];
    for (;;) {
        ssize_t n = read(fd, buf, sizeof(buf));
        if (n <= 0) return;
        sink.append(buf, static_cast<size_t>(n));
    }
}

}  // namespace

CommandResult run_command(const std::string& command, int timeout_s) {
    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw MeasureError(MeasureError::Kind::Run, std::string("pipe: ") + std::strerror(errno));

    pid_t pid = fork();
    if (pid < 0)
        throw MeasureError(MeasureError::Kind::Run, std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        setpgid(0, 0);  // own process group so the whole pipeline can be killed
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    CommandResult res;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_s);
    bool out_open = true, err_open = true;

    while (out_open || err_open) {
        if (std::chrono::steady_clock::now() > deadline) {
            res.timed_out = true;
            kill(-pid, SIGKILL);
            break;
        }
        struct pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
        int rc = poll(fds, nfds, 200);
        if (rc < 0 && errno != EINTR) break;
        for (nfds_t i = 0; i < nfds; i++) {
            if (!(fds[i].revents & (POLLIN | POLLHUP))) continue;
            char buf[4096];
            ssize_t n = read(fds[i].fd, buf, sizeof(buf));
            bool is_out = fds[i].fd == out_pipe[0];
            if (n > 0) {
                (is_out ? res.out : res.err).append(buf, static_cast<size_t>(n));
            } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
                (is_out ? out_open : err_open) = false;
            }
        }
    }
    drain(out_pipe[0], res.out);
    drain(err_pipe[0], res.err);
    close(out_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (res.timed_out)
        res.exit_code = -1;
    else if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else
        res.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    return res;
}

namespace {

double parse_marker(const std::string& stdout_text) {
    static const std::string marker = "KERNEL_TIME_US=";
    std::istringstream in(stdout_text);
    for (std::string line; std::getline(in, line);) {
        size_t pos = line.find(marker);
        if (pos == std::string::npos) continue;
        const char* digits = line.c_str() + pos + marker.size();
        char* end = nullptr;
        double value = std::strtod(digits, &end);
        if (end == digits)
            throw MeasureError(MeasureError::Kind::Parse, "malformed marker line: " + line);
        if (!(value > 0.0))
            throw MeasureError(MeasureError::Kind::Parse,
                               "runtime must be positive, got: " + line);
        return value;
    }
    throw MeasureError(MeasureError::Kind::Parse, "no KERNEL_TIME_US= marker in run output");
}

}  // namespace

double measure_runtime(const std::string& harness_file, const ExecutorConfig& config,
                       const std::function<void(const std::string&)>& diag) {
    std::string exe = harness_file + ".exe";
    std::string compile_cmd = substitute(substitute(config.compile_template, "file", harness_file), "exe", exe);
    std::string run_cmd = substitute(substitute(config.run_template, "file", harness_file), "exe", exe);

    int attempts = config.retries + 1;
    for (int attempt = 1;; attempt++) {
        try {
            if (!compile_cmd.empty()) {
                CommandResult c = run_command(compile_cmd, config.timeout_s);
                if (c.timed_out)
                    throw MeasureError(MeasureError::Kind::Timeout, "compile timed out: " + compile_cmd, c.err);
                if (c.exit_code != 0)
                    throw MeasureError(MeasureError::Kind::Compile,
                                       "compile exited " + std::to_string(c.exit_code), c.err);
            }
            CommandResult r = run_command(run_cmd, config.timeout_s);
            if (r.timed_out)
                throw MeasureError(MeasureError::Kind::Timeout, "run timed out: " + run_cmd, r.err);
            if (r.exit_code != 0)
                throw MeasureError(MeasureError::Kind::Run, "run exited " + std::to_string(r.exit_code), r.err);
            return parse_marker(r.out);
        } catch (const MeasureError& e) {
            if (diag)
                diag("measure attempt " + std::to_string(attempt) + "/" + std::to_string(attempts) +
                     " failed for " + harness_file + ": " + e.what());
            if (attempt >= attempts) throw;
        }
    }
}

}  // namespace paragraph
