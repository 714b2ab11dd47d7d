#pragma once

#include <stdexcept>
#include <string>

namespace squidqed {

// Base of every error thrown by the library. `kind()` is a stable
// machine-readable tag used by the CLI error objects.
class error : public std::runtime_error {
public:
    error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class argument_error : public error {
public:
    explicit argument_error(const std::string& what) : error("argument", what) {}
};

class normalization_error : public error {
public:
    explicit normalization_error(const std::string& what) : error("normalization", what) {}
};

class numerical_error : public error {
public:
    explicit numerical_error(const std::string& what) : error("numerical", what) {}
};

class integration_error : public error {
public:
    explicit integration_error(const std::string& what) : error("integration", what) {}
};

class stability_error : public error {
public:
    stability_error(double time, const std::string& what)
        : error("stability", what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class scenario_incomplete : public error {
public:
    explicit scenario_incomplete(const std::string& what) : error("scenario_incomplete", what) {}
};

class config_error : public error {
public:
    config_error(const std::string& what, int line = 0)
        : error("config", line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace squidqed
