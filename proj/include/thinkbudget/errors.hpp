// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thinkbudget {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid value object (bad letters, nonpositive sizes, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Configuration could not be loaded or failed validation. Carries every
/// violation found so callers can report them all at once.
class ConfigError : public Error {
public:
    explicit ConfigError(std::string message)
        : Error(message), violations_{std::move(message)} {}
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& item : items) {
            if (!out.empty()) out += "; ";
            out += item;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

/// Transport-level failure that survived every retry.
class GatewayError : public Error {
public:
    GatewayError(const std::string& message, int attempts)
        : Error(message), attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

/// The endpoint answered, but not with something we can use.
class ProtocolError : public Error {
public:
    ProtocolError(const std::string& message, int status, std::string body_excerpt)
        : Error(message), status_(status), body_excerpt_(std::move(body_excerpt)) {}
    int status() const noexcept { return status_; }
    const std::string& body_excerpt() const noexcept { return body_excerpt_; }

private:
    int status_;
    std::string body_excerpt_;
};

/// Run plan cannot be executed as given.
class PlanError : public Error {
public:
    using Error::Error;
};

/// Least-squares design is rank deficient.
class DegenerateFitError : public Error {
public:
    DegenerateFitError(const std::string& message, std::string regressor)
        : Error(message), regressor_(std::move(regressor)) {}
    const std::string& regressor() const noexcept { return regressor_; }

private:
    std::string regressor_;
};

class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& message, double cheapest_cost)
        : Error(message), cheapest_cost_(cheapest_cost) {}
    double cheapest_cost() const noexcept { return cheapest_cost_; }

private:
    double cheapest_cost_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class StoreError : public Error {
public:
    StoreError(const std::string& message, std::size_t line)
        : Error(message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace thinkbudget
