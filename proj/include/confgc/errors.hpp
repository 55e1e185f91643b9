#pragma once

#include <stdexcept>
#include <vector>
#include <string>

namespace confgc {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

struct CompositionNotZero : Error {
    int degree;
    explicit CompositionNotZero(int deg)
        : Error("d o d != 0 at degree " + std::to_string(deg) + " (sign/convention bug upstream)"), degree(deg) {}
};

struct ParseError : Error {
    int line;
    ParseError(int ln, const std::string& reason)
        : Error("parse error at line " + std::to_string(ln) + ": " + reason), line(ln) {}
};

struct ValidationError : Error {
    std::vector<std::string> violations;
    explicit ValidationError(std::vector<std::string> v)
        : Error("algebra validation failed: " + (v.empty() ? std::string("?") : v.front())),
          violations(std::move(v)) {}
};

struct UnknownBuiltin : Error {
    explicit UnknownBuiltin(const std::string& name) : Error("unknown builtin manifold: " + name) {}
};

struct SingularPairing : Error {
    explicit SingularPairing(const std::string& what) : Error("singular pairing: " + what) {}
};

struct FlavorViolation : Error {
    explicit FlavorViolation(const std::string& what) : Error("flavor violation: " + what) {}
};

struct AlgebraMismatch : Error {
    explicit AlgebraMismatch(const std::string& what) : Error("algebra mismatch: " + what) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& what) : Error("shape mismatch: " + what) {}
};

struct NotATree : Error {
    explicit NotATree(const std::string& what) : Error("not a tree: " + what) {}
};

struct NotStabilized : Error {
    explicit NotStabilized(const std::string& what) : Error("not stabilized: " + what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& what) : Error("internal error: " + what) {}
};

} // namespace confgc
