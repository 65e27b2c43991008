#include "srxbar/device.hpp"

#include <cmath>
#include <stdexcept>

#include "srxbar/errors.hpp"

namespace srxbar {

namespace {

void validate_window(const DeviceSpec& spec) {
    if (!(spec.r_on_ohm > 0.0) || !(spec.r_off_ohm > spec.r_on_ohm)) {
        throw std::domain_error("DeviceSpec: requires 0 < r_on < r_off");
    }
    if (spec.level_count == 0) {
        throw std::domain_error("DeviceSpec: level_count must be >= 1");
    }
}

/// Level value at `index` (ascending conductance) for a window
/// [1/r_off, 1/r_on]. Endpoints are exact. Used both for nominal level
/// derivation and for re-deriving levels inside a drifted window.
double level_in_window(LevelPlacement placement, unsigned index, unsigned L,
                       double r_on, double r_off) {
    const double g_min = 1.0 / r_off;
    const double g_max = 1.0 / r_on;
    if (L == 1) return g_max;
    if (index == 0) return g_min;
    if (index == L - 1) return g_max;
    const double t = static_cast<double>(index) / static_cast<double>(L - 1);
    switch (placement) {
        case LevelPlacement::linear_in_conductance:
            return g_min + t * (g_max - g_min);
        case LevelPlacement::linear_in_resistance:
            return 1.0 / (r_off + t * (r_on - r_off));
        case LevelPlacement::log_in_conductance:
            return g_min * std::pow(g_max / g_min, t);
        case LevelPlacement::explicit_list:
            break;
    }
    throw std::logic_error("level_in_window: explicit placement has no formula");
}

}  // namespace

double level_in_shifted_window(const DeviceSpec& spec, unsigned index,
                               double r_on_ohm, double r_off_ohm) {
    const unsigned L = spec.level_count;
    if (index >= L) {
        throw std::out_of_range("level_in_shifted_window: level index out of range");
    }
    if (spec.placement == LevelPlacement::explicit_list) {
        const double g_min = 1.0 / spec.r_off_ohm;
        const double g_max = 1.0 / spec.r_on_ohm;
        const double t = (spec.explicit_levels[index] - g_min) / (g_max - g_min);
        const double g_min_new = 1.0 / r_off_ohm;
        const double g_max_new = 1.0 / r_on_ohm;
        return g_min_new + t * (g_max_new - g_min_new);
    }
    return level_in_window(spec.placement, index, L, r_on_ohm, r_off_ohm);
}

LevelSet derive_levels(const DeviceSpec& spec) {
    validate_window(spec);
    const double g_min = 1.0 / spec.r_off_ohm;
    const double g_max = 1.0 / spec.r_on_ohm;

    if (spec.placement == LevelPlacement::explicit_list) {
        if (spec.explicit_levels.size() != spec.level_count) {
            throw std::domain_error("DeviceSpec: explicit level list size != level_count");
        }
        // A whisker of slack so unit conversions landing one ulp outside
        // the window still count as the boundary value.
        constexpr double kSlack = 1e-9;
        for (const double g : spec.explicit_levels) {
            if (g < g_min * (1.0 - kSlack) || g > g_max * (1.0 + kSlack)) {
                throw std::domain_error(
                    "DeviceSpec: explicit level outside the [1/r_off, 1/r_on] window");
            }
        }
        return LevelSet::from_values(spec.explicit_levels);
    }

    const unsigned L = spec.level_count;
    std::vector<double> values(L);
    for (unsigned i = 0; i < L; ++i) {
        values[i] = level_in_window(spec.placement, i, L, spec.r_on_ohm, spec.r_off_ohm);
    }
    return LevelSet::from_values(std::move(values));
}

DeviceSpec apply_aging(const DeviceSpec& spec, const AgingState& state) {
    validate_window(spec);
    if (state.ratio < 0.0 || state.ratio >= 1.0) {
        throw std::domain_error("AgingState: ratio must lie in [0, 1)");
    }
    DeviceSpec aged = spec;
    switch (state.type) {
        case AgingType::type1:
            aged.r_on_ohm = (1.0 - state.ratio) * spec.r_on_ohm;
            aged.r_off_ohm = (1.0 - state.ratio) * spec.r_off_ohm;
            break;
        case AgingType::type2:
            aged.r_on_ohm = (1.0 + state.ratio) * spec.r_on_ohm;
            aged.r_off_ohm = (1.0 + state.ratio) * spec.r_off_ohm;
            break;
        case AgingType::type3:
            aged.r_on_ohm = (1.0 + state.ratio) * spec.r_on_ohm;
            aged.r_off_ohm = (1.0 - state.ratio) * spec.r_off_ohm;
            break;
    }
    if (!(aged.r_on_ohm < aged.r_off_ohm)) {
        throw aging_collapse_error("apply_aging: conductance window collapsed at ratio " +
                                   std::to_string(state.ratio));
    }
    if (spec.placement == LevelPlacement::explicit_list) {
        // Reprogramming an explicit set: transplant each level affinely
        // into the shifted window.
        const double g_min = 1.0 / spec.r_off_ohm;
        const double g_max = 1.0 / spec.r_on_ohm;
        const double g_min_new = 1.0 / aged.r_off_ohm;
        const double g_max_new = 1.0 / aged.r_on_ohm;
        for (double& g : aged.explicit_levels) {
            const double t = (g - g_min) / (g_max - g_min);
            g = g_min_new + t * (g_max_new - g_min_new);
        }
    }
    return aged;
}

double perturb_level(double target_siemens, double var_frac, rng::Substream& stream) {
    if (var_frac < 0.0) {
        throw std::domain_error("perturb_level: var_frac must be >= 0");
    }
    if (var_frac == 0.0) return target_siemens;
    return stream.positive_normal(target_siemens, var_frac * target_siemens);
}

ProgramPulseTrace program_and_verify(double current_siemens, double target_siemens,
                                     double step_frac, double tolerance_siemens,
                                     unsigned max_pulses, rng::Substream& stream) {
    if (!(step_frac > 0.0)) {
        throw std::domain_error("program_and_verify: step_frac must be > 0");
    }
    ProgramPulseTrace trace;
    double g = current_siemens;
    for (unsigned pulse = 0; pulse < max_pulses; ++pulse) {
        const double gap = target_siemens - g;
        if (std::abs(gap) <= tolerance_siemens) {
            trace.converged = true;
            trace.final_error = std::abs(gap);
            return trace;
        }
        // Step toward the target with +/-20% multiplicative step noise.
        const double step = step_frac * gap * (1.0 + 0.2 * stream.uniform(-1.0, 1.0));
        g += step;
        trace.pulses.push_back({gap > 0.0 ? ProgramPulse::Polarity::set_pulse
                                          : ProgramPulse::Polarity::reset_pulse,
                                g});
    }
    trace.converged = std::abs(target_siemens - g) <= tolerance_siemens;
    trace.final_error = std::abs(target_siemens - g);
    return trace;
}

}  // namespace srxbar
