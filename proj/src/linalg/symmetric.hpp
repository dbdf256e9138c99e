#pragma once

#include "clusterlab/matrix.hpp"

namespace clab::linalg::detail {

/// Checks squareness and symmetry (1e-10 relative to max |a_ij|) and returns
/// the exactly symmetrized copy (A + A^T) / 2.
Matrix checked_symmetric(const Matrix& a, const char* context);

}  // namespace clab::linalg::detail
