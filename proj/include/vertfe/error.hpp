#pragma once

#include <stdexcept>
#include <string>

namespace vertfe {

/// Coarse error class, used by the CLI to pick an exit code.
enum class ErrorClass {
    Usage,     ///< bad arguments / malformed request      (exit 2)
    Data,      ///< bad input data, schema violations      (exit 3)
    Numerical  ///< solver or criterion failure            (exit 4)
};

/// Exception carrying a stable machine-readable code ("EmptyMask",
/// "NewtonDiverged", ...) alongside the human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string code, const std::string& message)
        : std::runtime_error(message), cls_(cls), code_(std::move(code)) {}

    ErrorClass cls() const { return cls_; }
    const std::string& code() const { return code_; }

private:
    ErrorClass cls_;
    std::string code_;
};

[[noreturn]] inline void fail_usage(const std::string& code, const std::string& msg) {
    throw Error(ErrorClass::Usage, code, msg);
}
[[noreturn]] inline void fail_data(const std::string& code, const std::string& msg) {
    throw Error(ErrorClass::Data, code, msg);
}
[[noreturn]] inline void fail_numerical(const std::string& code, const std::string& msg) {
    throw Error(ErrorClass::Numerical, code, msg);
}

} // namespace vertfe
