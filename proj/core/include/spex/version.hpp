#pragma once

namespace spex {

inline constexpr const char* version_string = "0.1.0";

// Identifies the noise pipeline (generator, stream layout, normal transform).
// Recorded in manifests; any change to the pipeline must bump this string.
inline constexpr const char* rng_scheme_id = "philox4x64-10/unit53/box-muller/v1";

}  // namespace spex
