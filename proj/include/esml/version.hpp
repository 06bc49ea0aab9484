#ifndef ESML_VERSION_HPP
#define ESML_VERSION_HPP

namespace esml {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // ESML_VERSION_HPP
