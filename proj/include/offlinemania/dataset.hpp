#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "offlinemania/env.hpp"
#include "offlinemania/policy.hpp"
#include "offlinemania/sensing.hpp"

namespace omania {

/// One stored transition. Observations, action and reward are rounded to
/// 32-bit floats once, when the transition is recorded.
struct Transition {
    std::array<float, kObsDim> obs{};
    std::array<float, kActDim> action{};
    float reward = 0.0f;
    std::array<float, kObsDim> next_obs{};
    bool terminal = false;
    bool timeout = false;

    bool operator==(const Transition&) const = default;
};

// .omd container, all integers and floats little-endian:
//
//   offset 0   4 bytes   magic "OMD1"
//   offset 4   u32       header length H in bytes
//   offset 8   H bytes   UTF-8 JSON header (DatasetHeader)
//   offset 8+H count * 278-byte records:
//              f32 x 33  obs
//              f32 x 2   action (steer, throttle)
//              f32       reward
//              f32 x 33  next_obs
//              u8        terminal (always 0)
//              u8        timeout (1 on the step that hit the episode length)
inline constexpr std::array<char, 4> kDatasetMagic = {'O', 'M', 'D', '1'};
inline constexpr int kDatasetFormatVersion = 1;
inline constexpr std::size_t kRecordBytes = 4 * (kObsDim + kActDim + 1 + kObsDim) + 2;
static_assert(kRecordBytes == 278);

struct ProvenanceEntry {
    std::string policy;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;

    bool operator==(const ProvenanceEntry&) const = default;
};

struct DatasetHeader {
    int format_version = kDatasetFormatVersion;
    int obs_dim = static_cast<int>(kObsDim);
    int act_dim = static_cast<int>(kActDim);
    std::uint64_t count = 0;
    std::string env_version;
    std::vector<ProvenanceEntry> provenance;
    std::string created_at;

    bool operator==(const DatasetHeader&) const = default;
};

void to_json(nlohmann::json& j, const DatasetHeader& h);
void from_json(const nlohmann::json& j, DatasetHeader& h);

struct Dataset {
    DatasetHeader header;
    std::vector<Transition> records;
};

void encode_record(const Transition& t, std::span<std::byte, kRecordBytes> out);
Transition decode_record(std::span<const std::byte, kRecordBytes> in);

/// Writes header and records; header.count must equal records.size().
/// Throws IOError.
void write_dataset(const std::filesystem::path& path, const DatasetHeader& header, std::span<const Transition> records);
inline void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
    write_dataset(path, ds.header, ds.records);
}

/// Streams records from an .omd file. The header and the total size are
/// validated on open (FormatError, DimensionError, TruncationError).
class DatasetReader {
public:
    explicit DatasetReader(const std::filesystem::path& path);

    const DatasetHeader& header() const { return header_; }
    std::uint64_t remaining() const { return header_.count - read_; }
    std::optional<Transition> next();

private:
    std::ifstream in_;
    DatasetHeader header_;
    std::uint64_t read_ = 0;
};

Dataset read_dataset(const std::filesystem::path& path);

/// Runs whole episodes (episode k uses seed + k) until n transitions are
/// recorded, then drops the tail beyond n. Episodes may run in parallel;
/// record order is always episode order.
std::vector<Transition> collect(const Policy& policy, const EnvConfig& env, std::uint64_t n, std::uint64_t seed);

Dataset generate(const Policy& policy, const EnvConfig& env, std::uint64_t n, std::uint64_t seed,
                 std::string created_at);

/// Largest-remainder quotas: floor(ratio * total) per input, with the
/// leftover units going to the largest fractional parts (earlier inputs win
/// ties). Throws RatioError unless ratios are non-negative and sum to 1
/// within 1e-9.
std::vector<std::uint64_t> mix_quotas(std::span<const double> ratios, std::uint64_t total);

/// Samples each input's quota uniformly without replacement, concatenates
/// the blocks and shuffles the result. Throws RatioError, InsufficientData,
/// or FormatError when inputs come from different env versions.
Dataset mix(std::span<const Dataset* const> inputs, std::span<const double> ratios, std::uint64_t total,
            std::uint64_t seed, std::string created_at);

struct FieldStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct DatasetStats {
    DatasetHeader header;
    std::array<FieldStats, kObsDim> obs{};
    std::array<FieldStats, kActDim> action{};
    FieldStats reward;
    double total_reward = 0.0;
    std::uint64_t terminals = 0;
    std::uint64_t episodes = 0;  // timeout flags seen
    // sums of rewards between timeout flags; only meaningful for unmixed data
    std::vector<double> episode_returns;
};

DatasetStats dataset_stats(const std::filesystem::path& path);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace omania
