#pragma once

#include <stdexcept>

namespace entlab {

/// Base class for all library failures.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid sizes or parameters outside the supported branch of a family.
struct domain_error : error {
  using error::error;
};

/// A complexity-parameter log term sits on (or numerically at) a singularity.
struct singular_term_error : error {
  using error::error;
};

/// Linear-algebra or iteration failure: SVD non-convergence, fit divergence.
struct numerical_error : error {
  using error::error;
};

/// Malformed or internally inconsistent run configuration.
struct config_error : error {
  using error::error;
};

/// Filesystem problems: lock conflicts, unwritable output directories.
struct io_error : error {
  using error::error;
};

}  // namespace entlab
