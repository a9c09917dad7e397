#ifndef SPDC_VERSION_HPP
#define SPDC_VERSION_HPP

namespace spdc {

inline constexpr const char* kVersion = "1.0.0";

// Crystal data schema version accepted by the loader.
inline constexpr int kCrystalSchemaVersion = 1;
inline constexpr int kLinkSchemaVersion = 1;

}  // namespace spdc

#endif
