#include "skinlink/error.hpp"

namespace skinlink {

const char* error_kind_name(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::singular_geometry: return "singular geometry";
    case ErrorKind::degenerate_aperture: return "degenerate aperture";
    case ErrorKind::inconsistency: return "inconsistency";
    case ErrorKind::config: return "config error";
    case ErrorKind::synthesis_domain: return "synthesis domain error";
    case ErrorKind::validity: return "validity error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind)
{
}

} // namespace skinlink
