#pragma once

#include <stdexcept>
#include <string>

namespace locmat {

enum class Errc {
    FieldMismatch,
    ShapeMismatch,
    IndexOutOfRange,
    NotInvertible,
    NotInCentralizer,
    NotIdempotent,
    CharacteristicDividesSize,
    ShiftOutOfRange,
    ShapeMismatchAtShiftedSite,
    NotADerivation,
    SupportExceedsSource,
    NoConjugatorFound,
    InvalidRestriction,
    WrongSupport,
    NotFinitaryResult,
    SyntaxError,
    InternalCheck,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

} // namespace locmat
