#include "geosolve/errors.hpp"

namespace geosolve {

std::string_view to_string(ErrorClass klass) {
    switch (klass) {
        case ErrorClass::MathDomain: return "MathDomain";
        case ErrorClass::NameError: return "NameError";
        case ErrorClass::SyntaxError: return "SyntaxError";
        case ErrorClass::ZeroDivision: return "ZeroDivision";
        case ErrorClass::Other: return "Other";
    }
    return "Other";
}

}  // namespace geosolve
