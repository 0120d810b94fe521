#ifndef TOBRA_ERROR_HPP
#define TOBRA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tobra {

enum class ErrorCode {
    invalid_input,
    parse_error,
    degenerate,
    domain_error,
    no_solution,
    unsupported,
    io_error,
    internal
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace tobra

#endif
