#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

// Error taxonomy shared across modules. Everything derives from
// std::runtime_error so callers can catch coarsely or finely.

struct ZeroVector : std::runtime_error {
    explicit ZeroVector(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidNorm : std::runtime_error {
    explicit InvalidNorm(const std::string& what) : std::runtime_error(what) {}
};

struct NegativeInput : std::runtime_error {
    explicit NegativeInput(const std::string& what) : std::runtime_error(what) {}
};

struct NonpositiveInput : std::runtime_error {
    explicit NonpositiveInput(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct Inconclusive : std::runtime_error {
    explicit Inconclusive(const std::string& what) : std::runtime_error(what) {}
};

struct DivergentIntegral : std::runtime_error {
    explicit DivergentIntegral(const std::string& what) : std::runtime_error(what) {}
};

struct NoRoot : std::runtime_error {
    explicit NoRoot(const std::string& what) : std::runtime_error(what) {}
};

struct BracketFail : std::runtime_error {
    explicit BracketFail(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct OutsideBall : std::runtime_error {
    explicit OutsideBall(const std::string& what) : std::runtime_error(what) {}
};

struct OutsideDomain : std::runtime_error {
    explicit OutsideDomain(const std::string& what) : std::runtime_error(what) {}
};

struct BallViolation : std::runtime_error {
    explicit BallViolation(const std::string& what) : std::runtime_error(what) {}
};

struct NotStabilized : std::runtime_error {
    explicit NotStabilized(const std::string& what) : std::runtime_error(what) {}
};

struct NonconvexDetected : std::runtime_error {
    explicit NonconvexDetected(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace finsler
