#pragma once

#include <stdexcept>
#include <string>

namespace aqe {

// Base for every error the library reports. Callers that only care about
// "bad input" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class DegreeExceeded : public Error {
public:
    DegreeExceeded(long element, long degree, long bound)
        : Error("element " + std::to_string(element) + " has degree " + std::to_string(degree) +
                " > " + std::to_string(bound)),
          element_(element), degree_(degree) {}
    long element() const { return element_; }
    long degree() const { return degree_; }

private:
    long element_;
    long degree_;
};

#define AQE_SIMPLE_ERROR(Name) \
    class Name : public Error { \
    public: \
        using Error::Error; \
    };

AQE_SIMPLE_ERROR(ArityMismatch)
AQE_SIMPLE_ERROR(ElementOutOfRange)
AQE_SIMPLE_ERROR(IndexOutOfRange)
AQE_SIMPLE_ERROR(TypeMismatch)
AQE_SIMPLE_ERROR(BudgetExceeded)
AQE_SIMPLE_ERROR(NotLocal)
AQE_SIMPLE_ERROR(SchemaMismatch)
AQE_SIMPLE_ERROR(MissingTester)
AQE_SIMPLE_ERROR(RadiusMismatch)
AQE_SIMPLE_ERROR(CentreCountMismatch)

#undef AQE_SIMPLE_ERROR

}  // namespace aqe
