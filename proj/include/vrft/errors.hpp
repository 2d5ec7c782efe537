#pragma once

#include <stdexcept>
#include <string>

namespace vrft {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define VRFT_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(what) {}   \
    }

VRFT_DEFINE_ERROR(PoleOnUnitCircle);
VRFT_DEFINE_ERROR(DegenerateLoop);
VRFT_DEFINE_ERROR(NotInvertible);
VRFT_DEFINE_ERROR(Integrator);
VRFT_DEFINE_ERROR(Unstable);
VRFT_DEFINE_ERROR(ZeroPower);
VRFT_DEFINE_ERROR(EstimationFailed);
VRFT_DEFINE_ERROR(DegenerateIR);
VRFT_DEFINE_ERROR(NotProper);
VRFT_DEFINE_ERROR(SingularRegressor);
VRFT_DEFINE_ERROR(AlternationDiverged);
VRFT_DEFINE_ERROR(NotSettled);
VRFT_DEFINE_ERROR(UnstableExperiment);
VRFT_DEFINE_ERROR(IOError);

#undef VRFT_DEFINE_ERROR

} // namespace vrft
