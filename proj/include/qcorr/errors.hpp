#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

// Base type for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_dimension_error : error { using error::error; };
struct invalid_subsystem_error : error { using error::error; };

// State validation failures, one type per violated invariant.
struct validation_error : error { using error::error; };
struct hermiticity_error : validation_error { using validation_error::validation_error; };
struct trace_error : validation_error { using validation_error::validation_error; };
struct positivity_error : validation_error { using validation_error::validation_error; };

struct parameter_domain_error : error { using error::error; };
struct permutation_limit_error : error { using error::error; };
struct parse_error : error { using error::error; };
struct no_peak_error : error { using error::error; };

} // namespace qcorr
