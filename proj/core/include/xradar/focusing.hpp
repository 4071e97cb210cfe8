#pragma once

#include <vector>

#include "xradar/recovery.hpp"
#include "xradar/synth.hpp"
#include "xradar/waveforms.hpp"

namespace xradar {

/// g(nu | nu_l) = sum_p e^{j (nu - nu_l) m_p pri}, one value per offset (rad/s).
CVector sum_of_exponents(const RVector& nu_offsets_rad_s, const PulseSchedule& schedule, double pri_s);

/// Psi_nu[k] = sum_p c_p[k] e^{j nu m_p pri} on the Doppler grid nu_r = 2 pi r / (P pri),
/// r = 0..P-1, where P is the CPI length in PRIs.
struct FocusedCoeffs {
  CMatrix psi;
  std::vector<int> kappa;
  /// Number of pulses summed: the mainlobe gain of an aligned target.
  int pulses = 0;
};

/// Uniform and non-uniform trains only.
FocusedCoeffs doppler_focus(const XampleSet& x, int channel = 0);

enum class FocusBackend { matching_pursuit, matrix_omp };

struct FocusOptions {
  FocusBackend backend = FocusBackend::matching_pursuit;
  /// Joint least-squares refit after each subtraction. Off gives plain
  /// matching pursuit with single-atom subtraction.
  bool refit = true;
  /// Single-atom exchange passes after the greedy stage (matching pursuit only).
  bool polish = true;
  /// Local golden-section search within +-0.5 bin in delay and Doppler.
  bool refine = false;
  /// Divide by H[k] when min |H[k]| over kappa exceeds this floor.
  double whiten_floor = 1e-6;
  /// Residual-norm stop; negative selects 1e-9 * ||data||.
  double tol = -1.0;
  /// When the greedy stage leaves a residual above tol, search for the
  /// sparsest exact fit with at most num_targets atoms. Intended for
  /// noiseless data; the search decouples per Doppler (or delay) bin when
  /// that axis is orthogonal and is otherwise joint over the full grid.
  bool exact_search = false;
  /// Prefixes the exact search may visit before giving up.
  long long search_budget = 200000;
};

/// Delay-Doppler recovery of up to num_targets targets from one channel of
/// compressed samples (uniform or non-uniform train). Detections are sorted
/// by decreasing magnitude.
RecoveryResult recover_focused(const XampleSet& x, const PulseSpectrum& spectrum, int num_targets,
                               const FocusOptions& options = {});

/// Recovery over (delay, Doppler, ambiguity order) for a phase-coded train;
/// the receiver uses the phases stored in the schedule.
RecoveryResult recover_phase_coded(const XampleSet& x, const PulseSpectrum& spectrum, int num_targets,
                                   const FocusOptions& options = {});

/// Residual energy left after subtracting the detections from the data.
double residual_energy(const XampleSet& x, const PulseSpectrum& spectrum, const RecoveryResult& result);

enum class MprfMode { velocity, range };

/// One folded estimate and the unambiguous interval of its train
/// (lambda / (2 pri) for velocity, c pri / 2 for range).
struct PrfEstimate {
  double folded = 0.0;
  double interval = 0.0;
};

inline double velocity_interval(double wavelength_m, double pri_s) { return wavelength_m / (2.0 * pri_s); }
inline double range_interval(double pri_s) { return kSpeedOfLight * pri_s / 2.0; }

/// Unfold estimates from several PRFs.
///  velocity: exhaustive search over k_i in [-max_unfold, max_unfold]; the
///            unfolding with the smallest spread wins (ties: smallest sum |k_i|),
///            the mean of the unfolded values is returned.
///  range:    train 0 is unfolded k = 0..max_unfold, the others to their nearest
///            copy; k* minimizes sum_i |r_ik - median_k|^2 and the median is returned.
/// Throws AmbiguityUnresolved when the best spread exceeds bin_width.
double mprf_resolve(const std::vector<PrfEstimate>& estimates, int max_unfold, MprfMode mode, double bin_width);

}  // namespace xradar
