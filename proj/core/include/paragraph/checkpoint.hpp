#pragma once

#include <string>

#include "paragraph/dataset.hpp"
#include "paragraph/model.hpp"

namespace paragraph {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelParams model;
    MinMaxScaler scaler;
    GraphMode mode = GraphMode::Paragraph;
};

/// Binary checkpoint: "PGCK" magic, version, JSON manifest (dimensions,
/// scaler, tensor shapes), raw little-endian doubles, trailing CRC32.
/// load(save(m)) reproduces predictions bit for bit.
void checkpoint_save(const Checkpoint& ckpt, const std::string& path);

/// Throws ChecksumError on truncation or corruption, VersionError on a
/// version other than kCheckpointVersion, SchemaError on non-checkpoints.
Checkpoint checkpoint_load(const std::string& path);

}  // namespace paragraph
