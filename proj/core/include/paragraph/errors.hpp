#pragma once

#include <stdexcept>
#include <string>

namespace paragraph {

// Exit classification used by the CLI: input errors map to exit code 2,
// stage failures to exit code 3.
enum class ErrorClass { Input, Stage };

class Error : public std::runtime_error {
public:
    Error(std::string kind, std::string message, ErrorClass cls = ErrorClass::Input)
        : std::runtime_error(kind + ": " + message),
          kind_(std::move(kind)),
          message_(std::move(message)),
          class_(cls) {}

    const std::string& kind() const { return kind_; }
    const std::string& message() const { return message_; }
    ErrorClass error_class() const { return class_; }

private:
    std::string kind_;
    std::string message_;
    ErrorClass class_;
};

struct SourceLocation {
    int line = 0;    // 1-based
    int column = 0;  // 1-based
};

inline std::string to_string(SourceLocation loc) {
    return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

class LexError : public Error {
public:
    LexError(SourceLocation loc, const std::string& message)
        : Error("LexError", to_string(loc) + ": " + message), loc_(loc) {}
    SourceLocation location() const { return loc_; }

private:
    SourceLocation loc_;
};

class ParseError : public Error {
public:
    ParseError(SourceLocation loc, const std::string& message)
        : Error("ParseError", to_string(loc) + ": " + message), loc_(loc) {}
    SourceLocation location() const { return loc_; }

private:
    SourceLocation loc_;
};

class UnresolvedRefError : public Error {
public:
    UnresolvedRefError(SourceLocation loc, const std::string& name)
        : Error("UnresolvedRefError",
                to_string(loc) + ": no visible declaration for '" + name + "'"),
          loc_(loc) {}
    SourceLocation location() const { return loc_; }

private:
    SourceLocation loc_;
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& message) : Error("SchemaError", message) {}
};

class WeightError : public Error {
public:
    explicit WeightError(const std::string& message) : Error("WeightError", message) {}
};

class VariantError : public Error {
public:
    explicit VariantError(const std::string& message) : Error("VariantError", message) {}
};

// what(): MeasureError(compile|run|parse|timeout)
class MeasureError : public Error {
public:
    enum class Kind { Compile, Run, Parse, Timeout };

    MeasureError(Kind kind, const std::string& message, std::string stderr_text = {})
        : Error("MeasureError(" + kind_name(kind) + ")", message, ErrorClass::Stage),
          measure_kind_(kind),
          stderr_(std::move(stderr_text)) {}

    Kind measure_kind() const { return measure_kind_; }
    const std::string& captured_stderr() const { return stderr_; }

    static std::string kind_name(Kind k) {
        switch (k) {
            case Kind::Compile: return "compile";
            case Kind::Run: return "run";
            case Kind::Parse: return "parse";
            case Kind::Timeout: return "timeout";
        }
        return "?";
    }

private:
    Kind measure_kind_;
    std::string stderr_;
};

class DatasetError : public Error {
public:
    explicit DatasetError(const std::string& message) : Error("DatasetError", message) {}
};

class MetricError : public Error {
public:
    explicit MetricError(const std::string& message) : Error("MetricError", message) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message)
        : Error("ShapeError", message, ErrorClass::Stage) {}
};

class ChecksumError : public Error {
public:
    explicit ChecksumError(const std::string& message) : Error("ChecksumError", message) {}
};

class VersionError : public Error {
public:
    explicit VersionError(const std::string& message) : Error("VersionError", message) {}
};

}  // namespace paragraph
