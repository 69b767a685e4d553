#pragma once

#include <stdexcept>
#include <string>

namespace trackpp {

// Usage errors map to exit status 1, data/format errors to exit status 2.
enum class ErrorKind { usage, data };

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, ErrorKind kind = ErrorKind::data)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace trackpp
