#ifndef QINDEX_ERRORS_HPP
#define QINDEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qindex {

// Exit-code taxonomy used by the CLI:
//   2 usage, 3 input, 4 numeric divergence, 5 verification failure.
// Library code signals categories 3 and 4 with these exception types;
// the CLI maps them to exit codes.

struct MalformedInput : std::runtime_error {
    explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

struct InconsistentData : std::runtime_error {
    explicit InconsistentData(const std::string& what) : std::runtime_error(what) {}
};

// Numeric-divergence family (exit code 4).
struct NumericDivergence : std::runtime_error {
    explicit NumericDivergence(const std::string& what) : std::runtime_error(what) {}
};

struct PoleProximity : NumericDivergence {
    explicit PoleProximity(const std::string& what) : NumericDivergence(what) {}
};

struct NonConvergent : NumericDivergence {
    explicit NonConvergent(const std::string& what) : NumericDivergence(what) {}
};

struct NoStrictAngles : NumericDivergence {
    explicit NoStrictAngles(const std::string& what) : NumericDivergence(what) {}
};

struct PinchDetected : NumericDivergence {
    explicit PinchDetected(const std::string& what) : NumericDivergence(what) {}
};

struct NoConvergence : NumericDivergence {
    explicit NoConvergence(const std::string& what) : NumericDivergence(what) {}
};

struct AmbiguousConvention : NumericDivergence {
    explicit AmbiguousConvention(const std::string& what) : NumericDivergence(what) {}
};

struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qindex

#endif
