#pragma once

namespace qta {
inline constexpr const char* version = "0.1.0";
}
