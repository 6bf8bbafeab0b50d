#pragma once

#include <stdexcept>
#include <string>

namespace bosonic {

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define BOSONIC_ERROR(Name)                                                    \
    struct Name : Error {                                                      \
        explicit Name(const std::string& w) : Error(#Name, w) {}               \
    }

BOSONIC_ERROR(CutoffTooSmall);
BOSONIC_ERROR(InvalidParameter);
BOSONIC_ERROR(DimMismatch);
BOSONIC_ERROR(Overflow);
BOSONIC_ERROR(UnsupportedFamily);
BOSONIC_ERROR(DefectTooLarge);
BOSONIC_ERROR(GridTooCoarse);
BOSONIC_ERROR(NotPositiveDefinite);
BOSONIC_ERROR(OrderTooLarge);
BOSONIC_ERROR(UnsupportedShape);
BOSONIC_ERROR(NotCompletelyPositive);
BOSONIC_ERROR(Unclassifiable);
BOSONIC_ERROR(UnsupportedPair);
BOSONIC_ERROR(TailTooLarge);
BOSONIC_ERROR(StencilFailure);

#undef BOSONIC_ERROR

}  // namespace bosonic
