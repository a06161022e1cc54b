#pragma once

#include <functional>
#include <string>

#include <json.hpp>

namespace paragraph {

/// Compile/run command templates for collecting real runtimes. Templates
/// may use {file} (the harness source) and {exe} (a scratch executable
/// path derived from it).
struct ExecutorConfig {
    std::string compile_template;
    std::string run_template;
    int timeout_s = 60;
    int retries = 0;
};

ExecutorConfig executor_config_from_json(const nlohmann::json& doc);
ExecutorConfig load_executor_config(const std::string& path);

struct CommandResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string out;
    std::string err;
};

/// Runs `command` under /bin/sh with a wall-clock timeout, capturing both
/// streams.
CommandResult run_command(const std::string& command, int timeout_s);

/// Compiles and runs one variant harness, parses "KERNEL_TIME_US=<n>"
/// from run stdout, and returns the (positive) microsecond value.
/// Retries per config; throws MeasureError(compile|run|parse|timeout)
/// with captured stderr after the last attempt. Never fabricates a value:
/// a missing or non-positive marker is always an error.
double measure_runtime(const std::string& harness_file, const ExecutorConfig& config,
                       const std::function<void(const std::string&)>& diag = nullptr);

}  // namespace paragraph
