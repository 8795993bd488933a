#ifndef FRAGAREA_TEXTIO_HPP_
#define FRAGAREA_TEXTIO_HPP_

#include <cstdio>
#include <string>

namespace fragarea {

/// Locale-independent decimal rendering with 17 significant digits, the
/// form used by every CSV writer.
inline std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace fragarea

#endif  // FRAGAREA_TEXTIO_HPP_
