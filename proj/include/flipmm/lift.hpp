#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flipmm/scheme.hpp"
#include "flipmm/search.hpp"

namespace flipmm {

/// The linearized Brent system had no solution when lifting from 2^k.
class LiftObstructed : public std::runtime_error {
 public:
  explicit LiftObstructed(int k);
  int k() const { return k_; }

 private:
  int k_;
};

/// One Newton step: a scheme satisfying the Brent equations modulo 2^k
/// becomes one satisfying them modulo 2^(k+1). Coefficients keep their
/// residues mod 2^k and term order is unchanged. Corrections are first
/// sought among coefficients that are odd, so zero entries stay zero when
/// possible; free unknowns are drawn from `rng`. A scheme whose residuals
/// already vanish is returned unchanged (in the larger ring).
///
/// Throws SchemeError if `s` is not over Z/2^k or does not satisfy the
/// equations there, LiftObstructed if the system is inconsistent.
IntScheme hensel_step(const IntScheme& s, Rng& rng);
/// Same, starting from GF(2) (k = 1).
IntScheme hensel_step(const GF2Scheme& s, Rng& rng);

/// Balanced representatives read over Z, if that verifies exactly.
/// Throws std::invalid_argument unless the ring is Z/2^k.
std::optional<IntScheme> reconstruct_integers(const IntScheme& s);

struct LiftAttempt {
  /// Largest k for which the attempt had a scheme valid modulo 2^k.
  int max_k = 1;
  bool success = false;
  /// "obstructed at 2^K" or "coefficients not stabilized"; empty on success.
  std::string failure;
};

struct LiftResult {
  std::optional<IntScheme> scheme;
  std::vector<LiftAttempt> attempts;
};

/// Up to `attempts` independent Hensel chains from GF(2) towards 2^k_max.
/// An attempt checks for an integer scheme whenever two consecutive steps
/// leave all balanced representatives unchanged, and once more at k_max.
/// Throws SchemeError unless `s` verifies, std::invalid_argument for
/// attempts < 1 or k_max outside [2, 62].
LiftResult lift(const GF2Scheme& s, int attempts, int k_max, Rng& rng);

}  // namespace flipmm
