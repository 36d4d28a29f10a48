#pragma once

namespace mfd {

// Selects the serial reference loop or the OpenMP kernel for data-parallel work.
enum class ExecPolicy { serial, parallel };

bool openmp_enabled();
int max_threads();

}  // namespace mfd
