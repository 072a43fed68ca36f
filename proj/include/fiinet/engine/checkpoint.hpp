#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "fiinet/engine/parameters.hpp"

namespace fiinet::engine {

// Binary layout (all integers little-endian):
//   8 bytes   magic "FIINETCK"
//   u32       format version
//   u32       scalar width in bytes (4 or 8)
//   u32       metadata length, then that many bytes of "key=value\n" text
//   u32       record count
//   per record:
//     u32 name length, name bytes, u32 rank, u64 dims[rank],
//     u8 decay flag, raw little-endian values
inline constexpr char kCheckpointMagic[8] = {'F', 'I', 'I', 'N', 'E', 'T', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

using Metadata = std::map<std::string, std::string>;

template <typename Real>
struct Checkpoint {
    Metadata metadata;
    ParameterStore<Real> params;
};

template <typename Real>
void write_checkpoint(std::ostream& os, const ParameterStore<Real>& params, const Metadata& metadata);
template <typename Real>
void save_checkpoint(const std::filesystem::path& path, const ParameterStore<Real>& params,
                     const Metadata& metadata);

/// Reads a checkpoint of either scalar width, converting to Real.
template <typename Real>
Checkpoint<Real> read_checkpoint(std::istream& is);
template <typename Real>
Checkpoint<Real> load_checkpoint(const std::filesystem::path& path);

}  // namespace fiinet::engine
