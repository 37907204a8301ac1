#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdncg {

using Index = std::ptrdiff_t;
using Complex = std::complex<double>;
using Vector = std::vector<double>;
using CVector = std::vector<Complex>;

/// Raised when a solver cannot continue (non-finite values, negative
/// curvature, ...). Carries a human-readable diagnostic.
class SolverAbort : public std::runtime_error {
 public:
  explicit SolverAbort(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pdncg
