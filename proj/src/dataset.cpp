#include "offlinemania/dataset.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <limits>
#include <numeric>

#include <tbb/parallel_for.h>

#include "offlinemania/errors.hpp"

namespace omania {

namespace {

void put_u32(std::byte* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

std::uint32_t get_u32(const std::byte* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

void put_f32(std::byte*& p, float f) {
    put_u32(p, std::bit_cast<std::uint32_t>(f));
    p += 4;
}

float get_f32(const std::byte*& p) {
    const float f = std::bit_cast<float>(get_u32(p));
    p += 4;
    return f;
}

Transition make_transition(const Observation& obs, Action action, const StepResult& r) {
    Transition t;
    for (std::size_t i = 0; i < kObsDim; ++i) {
        t.obs[i] = static_cast<float>(obs.values[i]);
        t.next_obs[i] = static_cast<float>(r.observation.values[i]);
    }
    t.action = {static_cast<float>(action.steer), static_cast<float>(action.throttle)};
    t.reward = static_cast<float>(r.reward);
    t.terminal = r.terminated;
    t.timeout = r.truncated;
    return t;
}

}  // namespace

void to_json(nlohmann::json& j, const DatasetHeader& h) {
    nlohmann::json prov = nlohmann::json::array();
    for (const auto& p : h.provenance) prov.push_back({{"policy", p.policy}, {"count", p.count}, {"seed", p.seed}});
    j = {{"format_version", h.format_version},
         {"obs_dim", h.obs_dim},
         {"act_dim", h.act_dim},
         {"count", h.count},
         {"env_version", h.env_version},
         {"provenance", std::move(prov)},
         {"created_at", h.created_at},
         {"record_layout", "obs f32x33, action f32x2, reward f32, next_obs f32x33, terminal u8, timeout u8"}};
}

void from_json(const nlohmann::json& j, DatasetHeader& h) {
    h.format_version = j.at("format_version").get<int>();
    h.obs_dim = j.at("obs_dim").get<int>();
    h.act_dim = j.at("act_dim").get<int>();
    h.count = j.at("count").get<std::uint64_t>();
    h.env_version = j.at("env_version").get<std::string>();
    h.created_at = j.value("created_at", "");
    h.provenance.clear();
    for (const auto& p : j.at("provenance"))
        h.provenance.push_back({p.at("policy").get<std::string>(), p.at("count").get<std::uint64_t>(),
                                p.at("seed").get<std::uint64_t>()});
}

void encode_record(const Transition& t, std::span<std::byte, kRecordBytes> out) {
    std::byte* p = out.data();
    for (float f : t.obs) put_f32(p, f);
    for (float f : t.action) put_f32(p, f);
    put_f32(p, t.reward);
    for (float f : t.next_obs) put_f32(p, f);
    *p++ = static_cast<std::byte>(t.terminal ? 1 : 0);
    *p++ = static_cast<std::byte>(t.timeout ? 1 : 0);
}

Transition decode_record(std::span<const std::byte, kRecordBytes> in) {
    Transition t;
    const std::byte* p = in.data();
    for (float& f : t.obs) f = get_f32(p);
    for (float& f : t.action) f = get_f32(p);
    t.reward = get_f32(p);
    for (float& f : t.next_obs) f = get_f32(p);
    t.terminal = *p++ != std::byte{0};
    t.timeout = *p++ != std::byte{0};
    return t;
}

void write_dataset(const std::filesystem::path& path, const DatasetHeader& header, std::span<const Transition> records) {
    if (header.count != records.size())
        throw FormatError("header count " + std::to_string(header.count) + " does not match " +
                          std::to_string(records.size()) + " records");
    const std::string blob = nlohmann::json(header).dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot open " + path.string() + " for writing");

    std::array<std::byte, 8> prefix{};
    std::memcpy(prefix.data(), kDatasetMagic.data(), 4);
    put_u32(prefix.data() + 4, static_cast<std::uint32_t>(blob.size()));
    out.write(reinterpret_cast<const char*>(prefix.data()), prefix.size());
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));

    constexpr std::size_t kChunk = 4096;
    std::vector<std::byte> buf(kChunk * kRecordBytes);
    for (std::size_t start = 0; start < records.size(); start += kChunk) {
        const std::size_t n = std::min(kChunk, records.size() - start);
        for (std::size_t i = 0; i < n; ++i)
            encode_record(records[start + i], std::span<std::byte, kRecordBytes>(buf.data() + i * kRecordBytes, kRecordBytes));
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * kRecordBytes));
    }
    if (!out) throw IOError("write failed for " + path.string());
}

DatasetReader::DatasetReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw IOError("cannot open dataset " + path.string());
    std::error_code ec;
    const std::uint64_t size = std::filesystem::file_size(path, ec);
    if (ec) throw IOError("cannot stat dataset " + path.string());

    std::array<std::byte, 8> prefix{};
    if (!in_.read(reinterpret_cast<char*>(prefix.data()), prefix.size()))
        throw FormatError(path.string() + ": too short for an .omd header");
    if (std::memcmp(prefix.data(), kDatasetMagic.data(), 4) != 0) throw FormatError(path.string() + ": bad magic");
    const std::uint32_t header_len = get_u32(prefix.data() + 4);
    if (8ull + header_len > size) throw TruncationError(path.string() + ": header runs past end of file");
    std::string blob(header_len, '\0');
    in_.read(blob.data(), header_len);
    try {
        header_ = nlohmann::json::parse(blob).get<DatasetHeader>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": malformed header: " + e.what());
    }
    if (header_.format_version != kDatasetFormatVersion)
        throw FormatError(path.string() + ": unsupported format version " + std::to_string(header_.format_version));
    if (header_.obs_dim != static_cast<int>(kObsDim) || header_.act_dim != static_cast<int>(kActDim))
        throw DimensionError(path.string() + ": expected obs_dim 33 and act_dim 2, got " +
                             std::to_string(header_.obs_dim) + " and " + std::to_string(header_.act_dim));
    const std::uint64_t expected = 8ull + header_len + header_.count * kRecordBytes;
    if (size != expected)
        throw TruncationError(path.string() + ": header declares " + std::to_string(header_.count) + " records (" +
                              std::to_string(expected) + " bytes) but the file has " + std::to_string(size) + " bytes");
}

std::optional<Transition> DatasetReader::next() {
    if (read_ == header_.count) return std::nullopt;
    std::array<std::byte, kRecordBytes> buf{};
    if (!in_.read(reinterpret_cast<char*>(buf.data()), buf.size()))
        throw TruncationError("dataset ended after " + std::to_string(read_) + " records");
    ++read_;
    return decode_record(buf);
}

Dataset read_dataset(const std::filesystem::path& path) {
    DatasetReader reader(path);
    Dataset ds;
    ds.header = reader.header();
    ds.records.reserve(ds.header.count);
    while (auto t = reader.next()) ds.records.push_back(*t);
    return ds;
}

std::vector<Transition> collect(const Policy& policy, const EnvConfig& env_cfg, std::uint64_t n, std::uint64_t seed) {
    const auto len = static_cast<std::uint64_t>(env_cfg.episode_len);
    const std::uint64_t episodes = (n + len - 1) / len;
    std::vector<Transition> out(n);
    tbb::parallel_for(std::uint64_t{0}, episodes, [&](std::uint64_t k) {
        Env env(env_cfg);
        const std::uint64_t episode_seed = seed + k;
        Rng rng(derive_seed(episode_seed, kPolicyStream));
        Observation obs = env.reset(episode_seed);
        const std::uint64_t begin = k * len;
        const std::uint64_t end = std::min(n, begin + len);
        for (std::uint64_t i = begin; i < end; ++i) {
            const Action action = policy.act(env.policy_input(), rng);
            const StepResult r = env.step(action);
            out[i] = make_transition(obs, action, r);
            obs = r.observation;
        }
    });
    return out;
}

Dataset generate(const Policy& policy, const EnvConfig& env, std::uint64_t n, std::uint64_t seed,
                 std::string created_at) {
    if (n == 0) throw std::invalid_argument("generate: n must be positive");
    Dataset ds;
    ds.records = collect(policy, env, n, seed);
    ds.header.count = n;
    ds.header.env_version = env_version(env);
    ds.header.provenance = {{std::string(policy.name()), n, seed}};
    ds.header.created_at = std::move(created_at);
    return ds;
}

std::vector<std::uint64_t> mix_quotas(std::span<const double> ratios, std::uint64_t total) {
    if (ratios.empty()) throw RatioError("no ratios given");
    double sum = 0.0;
    for (double r : ratios) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw RatioError("ratios must be finite and non-negative");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw RatioError("ratios sum to " + std::to_string(sum) + ", expected 1");

    std::vector<std::uint64_t> quotas(ratios.size());
    std::vector<double> remainder(ratios.size());
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double exact = ratios[i] * static_cast<double>(total);
        // snap values within rounding noise of an integer (0.07 * 200000)
        const double nearest = std::round(exact);
        const double base = std::abs(exact - nearest) < 1e-6 ? nearest : std::floor(exact);
        quotas[i] = static_cast<std::uint64_t>(base);
        remainder[i] = exact - base;
        assigned += quotas[i];
    }
    std::vector<std::size_t> order(ratios.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    while (assigned < total) {
        for (std::size_t i : order) {
            if (assigned == total) break;
            ++quotas[i];
            ++assigned;
        }
    }
    while (assigned > total) {
        for (auto it = order.rbegin(); it != order.rend() && assigned > total; ++it) {
            if (quotas[*it] > 0) {
                --quotas[*it];
                --assigned;
            }
        }
    }
    return quotas;
}

Dataset mix(std::span<const Dataset* const> inputs, std::span<const double> ratios, std::uint64_t total,
            std::uint64_t seed, std::string created_at) {
    if (inputs.size() != ratios.size())
        throw RatioError(std::to_string(ratios.size()) + " ratios for " + std::to_string(inputs.size()) + " inputs");
    const auto quotas = mix_quotas(ratios, total);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i]->records.size() < quotas[i])
            throw InsufficientData("input " + std::to_string(i) + " has " + std::to_string(inputs[i]->records.size()) +
                                   " transitions, quota is " + std::to_string(quotas[i]));
        if (inputs[i]->header.env_version != inputs[0]->header.env_version)
            throw FormatError("inputs come from different env versions");
    }

    Rng rng(seed);
    Dataset out;
    out.records.reserve(total);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& src = inputs[i]->records;
        // partial Fisher-Yates: the first quota slots become a uniform sample
        std::vector<std::uint32_t> idx(src.size());
        std::iota(idx.begin(), idx.end(), 0u);
        for (std::uint64_t k = 0; k < quotas[i]; ++k) std::swap(idx[k], idx[k + rng.below(idx.size() - k)]);
        std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quotas[i]));
        for (std::uint64_t k = 0; k < quotas[i]; ++k) out.records.push_back(src[idx[k]]);

        std::string label;
        for (const auto& p : inputs[i]->header.provenance) label += (label.empty() ? "" : "+") + p.policy;
        out.header.provenance.push_back({label, quotas[i], seed});
    }
    for (std::size_t k = out.records.size(); k > 1; --k) std::swap(out.records[k - 1], out.records[rng.below(k)]);

    out.header.count = total;
    out.header.env_version = inputs.empty() ? "" : inputs[0]->header.env_version;
    out.header.created_at = std::move(created_at);
    return out;
}

DatasetStats dataset_stats(const std::filesystem::path& path) {
    DatasetReader reader(path);
    DatasetStats st;
    st.header = reader.header();
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto init = [](FieldStats& f) { f = {inf, -inf, 0.0}; };
    auto fold = [](FieldStats& f, double v) {
        f.min = std::min(f.min, v);
        f.max = std::max(f.max, v);
        f.mean += v;
    };
    for (auto& f : st.obs) init(f);
    for (auto& f : st.action) init(f);
    init(st.reward);

    double episode = 0.0;
    while (auto t = reader.next()) {
        for (std::size_t i = 0; i < kObsDim; ++i) fold(st.obs[i], t->obs[i]);
        for (std::size_t i = 0; i < kActDim; ++i) fold(st.action[i], t->action[i]);
        fold(st.reward, t->reward);
        st.total_reward += t->reward;
        episode += t->reward;
        if (t->terminal) ++st.terminals;
        if (t->timeout) {
            ++st.episodes;
            st.episode_returns.push_back(episode);
            episode = 0.0;
        }
    }
    const double n = static_cast<double>(st.header.count);
    auto finish = [&](FieldStats& f) {
        if (n == 0) f = {};
        else f.mean /= n;
    };
    for (auto& f : st.obs) finish(f);
    for (auto& f : st.action) finish(f);
    finish(st.reward);
    return st;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace omania
