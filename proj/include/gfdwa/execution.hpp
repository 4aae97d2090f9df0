#pragma once

namespace gfdwa {

/// Selects between the OpenMP kernels and their serial reference versions.
/// Both paths produce bitwise-identical results.
enum class Execution { Serial, Parallel };

/// True when the library was built with OpenMP.
bool parallel_available();

}  // namespace gfdwa
