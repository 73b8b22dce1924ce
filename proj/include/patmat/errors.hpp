#pragma once

#include <stdexcept>
#include <string>

namespace patmat {

/// Base class for all library errors. `code()` is a stable slug suitable
/// for machine parsing on the CLI diagnostic stream.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct InvalidDimensionError : Error {
    explicit InvalidDimensionError(const std::string& msg) : Error("invalid-dimension", msg) {}
};

struct IndexError : Error {
    explicit IndexError(const std::string& msg) : Error("index-error", msg) {}
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error("shape-error", msg) {}
};

struct ResourceError : Error {
    explicit ResourceError(const std::string& msg) : Error("resource-error", msg) {}
};

struct InvalidArgumentError : Error {
    explicit InvalidArgumentError(const std::string& msg) : Error("invalid-argument", msg) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error("numeric-error", msg) {}
};

struct UnsupportedLimitError : Error {
    explicit UnsupportedLimitError(const std::string& msg) : Error("unsupported-limit", msg) {}
};

struct DegenerateStatisticsError : Error {
    explicit DegenerateStatisticsError(const std::string& msg) : Error("degenerate-statistics", msg) {}
};

/// Iterative eigenvalue estimation ran out of iterations. The best estimate
/// reached so far is carried along so callers can decide what to do with it.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, double best)
        : Error("convergence-error", msg), best_estimate(best) {}

    double best_estimate;
};

} // namespace patmat
