#pragma once

#include <stdexcept>
#include <string>

namespace fieldsim {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FIELDSIM_ERROR_CLASS(Name)                                            \
    class Name : public Error {                                               \
    public:                                                                   \
        using Error::Error;                                                   \
    }

// quantities
FIELDSIM_ERROR_CLASS(UnknownUnit);
FIELDSIM_ERROR_CLASS(ParseError);
FIELDSIM_ERROR_CLASS(DimensionMismatch);
FIELDSIM_ERROR_CLASS(DivisionByZero);
FIELDSIM_ERROR_CLASS(NonFiniteValue);

// mesh / fields
FIELDSIM_ERROR_CLASS(DuplicateName);
FIELDSIM_ERROR_CLASS(ShapeMismatch);
FIELDSIM_ERROR_CLASS(MeshMismatch);
FIELDSIM_ERROR_CLASS(AliasedOutput);

// equation language
FIELDSIM_ERROR_CLASS(SyntaxError);
FIELDSIM_ERROR_CLASS(ArityError);
FIELDSIM_ERROR_CLASS(UnusedFreeIndex);

// kernels
FIELDSIM_ERROR_CLASS(UnknownConstant);
FIELDSIM_ERROR_CLASS(UnknownField);
FIELDSIM_ERROR_CLASS(UnitMismatch);
FIELDSIM_ERROR_CLASS(ComponentOutOfRange);

// dependency graph
FIELDSIM_ERROR_CLASS(CycleDetected);
FIELDSIM_ERROR_CLASS(DuplicateOutputRule);
FIELDSIM_ERROR_CLASS(WriteToDerivedField);

// time integration
FIELDSIM_ERROR_CLASS(StepSizeUnderflow);
FIELDSIM_ERROR_CLASS(NonFiniteRhs);

// configuration
FIELDSIM_ERROR_CLASS(UnknownKey);

#undef FIELDSIM_ERROR_CLASS

} // namespace fieldsim
