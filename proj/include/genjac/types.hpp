#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace genjac {

using cplx = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kTwoPiI{0.0, 2.0 * kPi};

enum class ErrorCode {
  SingularCurve,
  BadDegree,
  AtBranchPoint,
  SheetAmbiguity,
  DegenerateGeometry,
  QuadratureFailure,
  NonCanonicalBasis,
  IllConditioned,
  PoleAtBranch,
  CoincidentPoles,
  PathBlocked,
  DivisorTouchesPole,
  CycleTouchesPole,
  ContourThroughZero,
  IllConditionedLattice,
  BoundaryTooClose,
  NonIntegerWinding,
  IdenticallyZero,
  CountMismatch,
  NewtonStall,
  NotOnThetaDivisor,
  BasePointZeroMissing,
  InvalidInput,
  Io,
};

const char* to_string(ErrorCode code);

// Process exit code the CLI reports for an error of this kind.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Counter-based generator: the i-th draw depends only on (seed, i), so a fixed
// seed reproduces every randomized suite bit for bit on any platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() { return mix(seed_ ^ mix(stream_ + 0x9e3779b97f4a7c15ULL * ++counter_)); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  CounterRng fork(std::uint64_t substream) const { return CounterRng(seed_, mix(stream_ + 0x632be59bd9b4e019ULL * (substream + 1))); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace genjac
