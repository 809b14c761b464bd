#pragma once

namespace uiou {

/// Execution mode for the data-parallel kernels. Results are bitwise
/// identical across modes: parallel regions only fill independent
/// per-item slots and every reduction runs single-threaded.
enum class ExecMode { serial, parallel };

}  // namespace uiou
