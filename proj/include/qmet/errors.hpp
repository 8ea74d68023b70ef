#pragma once

#include <stdexcept>
#include <string>

namespace qmet {

struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SpaceMismatch : std::invalid_argument {
    explicit SpaceMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

struct OutOfRange : std::out_of_range {
    explicit OutOfRange(const std::string& msg) : std::out_of_range(msg) {}
};

struct NotPathSymmetric : std::runtime_error {
    explicit NotPathSymmetric(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotPositive : std::runtime_error {
    explicit NotPositive(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateState : std::runtime_error {
    explicit DegenerateState(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroInformation : std::runtime_error {
    explicit ZeroInformation(const std::string& msg) : std::runtime_error(msg) {}
};

struct DerivativeInconsistent : std::runtime_error {
    explicit DerivativeInconsistent(const std::string& msg) : std::runtime_error(msg) {}
};

struct Unachievable : std::runtime_error {
    explicit Unachievable(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroLikelihood : std::runtime_error {
    explicit ZeroLikelihood(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridTooSmall : std::runtime_error {
    explicit GridTooSmall(const std::string& msg) : std::runtime_error(msg) {}
};

struct GridMismatch : std::invalid_argument {
    explicit GridMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace qmet
