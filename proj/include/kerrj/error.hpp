#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kerrj {

// Coarse error classes; the CLI maps them onto exit codes 2, 3 and 4.
enum class ErrorKind { Config, Numerical, Io };

struct Issue {
    std::string code;
    std::string message;
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

    Error(ErrorKind kind, std::vector<Issue> issues);

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }
    const std::vector<Issue>& issues() const { return issues_; }

private:
    ErrorKind kind_;
    std::string code_;
    std::vector<Issue> issues_;
};

inline std::string join_issues(const std::vector<Issue>& issues) {
    std::string s;
    for (const auto& i : issues) {
        if (!s.empty()) s += "; ";
        s += i.code + ": " + i.message;
    }
    return s;
}

inline Error::Error(ErrorKind kind, std::vector<Issue> issues)
    : std::runtime_error(join_issues(issues)),
      kind_(kind),
      code_(issues.empty() ? std::string("Invalid") : issues.front().code),
      issues_(std::move(issues)) {}

} // namespace kerrj
