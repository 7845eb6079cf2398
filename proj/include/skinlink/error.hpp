#pragma once

#include <stdexcept>
#include <string>

namespace skinlink {

enum class ErrorKind {
    domain,
    singular_geometry,
    degenerate_aperture,
    inconsistency,
    config,
    synthesis_domain,
    validity,
};

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace skinlink
