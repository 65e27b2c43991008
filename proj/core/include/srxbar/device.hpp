#pragma once

#include <cstdint>
#include <vector>

#include "srxbar/levels.hpp"
#include "srxbar/rng.hpp"

// Single-memristor behavior: stable level derivation from the R_ON/R_OFF
// window, aging transforms of the window, programming variability, and
// iterative SET/RESET program-and-verify.

namespace srxbar {

/// Where the L stable levels sit inside [1/R_OFF, 1/R_ON].
enum class LevelPlacement {
    linear_in_conductance,  // equal conductance spacing
    linear_in_resistance,   // equal resistance spacing
    log_in_conductance,     // equal conductance ratios
    explicit_list,          // caller-provided values
};

struct DeviceSpec {
    double r_on_ohm = 1e3;
    double r_off_ohm = 100e3;
    unsigned level_count = 2;
    LevelPlacement placement = LevelPlacement::linear_in_conductance;
    std::vector<double> explicit_levels;  // siemens; used by explicit_list
};

enum class AgingType { type1, type2, type3 };

/// ratio is the fractional boundary shift; type 3 with ratio r maps
/// R_ON -> (1+r) R_ON and R_OFF -> (1-r) R_OFF.
struct AgingState {
    AgingType type = AgingType::type3;
    double ratio = 0.0;
};

struct ProgramPulse {
    enum class Polarity { set_pulse, reset_pulse };
    Polarity polarity;
    double conductance_after;  // siemens
};

struct ProgramPulseTrace {
    std::vector<ProgramPulse> pulses;
    bool converged = false;
    double final_error = 0.0;  // |final - target|, siemens
};

/// L strictly increasing conductances spanning [1/r_off, 1/r_on].
/// Endpoints are exact for L >= 2; L == 1 yields the single value 1/r_on.
LevelSet derive_levels(const DeviceSpec& spec);

/// Level value at `index` when the device window has shifted to
/// [r_on_ohm, r_off_ohm] (boundary drift, aging). Parametric placements
/// re-derive from the placement rule; explicit lists transplant affinely.
double level_in_shifted_window(const DeviceSpec& spec, unsigned index,
                               double r_on_ohm, double r_off_ohm);

/// Boundary-resistance transform followed by reprogramming: the returned
/// spec re-derives its levels inside the shifted window. Explicit level
/// lists are rescaled affinely into the new window.
/// Throws aging_collapse_error when type 3 would close the window.
DeviceSpec apply_aging(const DeviceSpec& spec, const AgingState& state);

/// Gaussian draw around the target with std var_frac * target, truncated to
/// stay strictly positive. var_frac == 0 returns the target exactly.
double perturb_level(double target_siemens, double var_frac, rng::Substream& stream);

/// Iterative SET/RESET pulsing toward the target. Each pulse moves the
/// conductance toward the target by step_frac of the remaining gap, with
/// +/-20% multiplicative step noise. Stops inside the tolerance or at
/// max_pulses (converged flag reports which).
ProgramPulseTrace program_and_verify(double current_siemens, double target_siemens,
                                     double step_frac, double tolerance_siemens,
                                     unsigned max_pulses, rng::Substream& stream);

}  // namespace srxbar
