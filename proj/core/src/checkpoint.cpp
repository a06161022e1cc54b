#include "paragraph/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "paragraph/errors.hpp"

namespace paragraph {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'C', 'K'};

std::uint32_t crc32(const std::string& bytes) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; i++) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; k++) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xffffffffu;
    for (unsigned char b : bytes) crc = table[(crc ^ b) & 0xffu] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

template <typename T>
void append_pod(std::string& out, T value) {
    out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw ChecksumError("checkpoint truncated");
    T value;
    std::memcpy(&value, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return value;
}

nlohmann::json range_to_json(const MinMaxRange& r) { return {{"min", r.min}, {"max", r.max}}; }

MinMaxRange range_from_json(const nlohmann::json& j) {
    return {j.at("min").get<double>(), j.at("max").get<double>()};
}

}  // namespace

void checkpoint_save(const Checkpoint& ckpt, const std::string& path) {
    nlohmann::json manifest;
    manifest["config"] = model_config_to_json(ckpt.model.cfg);
    manifest["mode"] = graph_mode_name(ckpt.mode);
    manifest["scaler"] = {{"weights", range_to_json(ckpt.scaler.weights)},
                          {"teams", range_to_json(ckpt.scaler.teams)},
                          {"threads", range_to_json(ckpt.scaler.threads)},
                          {"target", range_to_json(ckpt.scaler.target)}};
    nlohmann::json tensors = nlohmann::json::array();
    ckpt.model.for_each([&](const std::string& name, const Tensor& t) {
        tensors.push_back({{"name", name}, {"shape", t.shape}});
    });
    manifest["tensors"] = std::move(tensors);
    std::string header = manifest.dump();

    std::string bytes;
    bytes.append(kMagic, sizeof(kMagic));
    append_pod<std::uint32_t>(bytes, kCheckpointVersion);
    append_pod<std::uint64_t>(bytes, header.size());
    bytes += header;
    ckpt.model.for_each([&](const std::string&, const Tensor& t) {
        bytes.append(reinterpret_cast<const char*>(t.data.data()), t.data.size() * sizeof(double));
    });
    append_pod<std::uint32_t>(bytes, crc32(bytes));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DatasetError("cannot open checkpoint for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DatasetError("checkpoint write failed: " + path);
}

Checkpoint checkpoint_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open checkpoint: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < sizeof(kMagic) + sizeof(std::uint32_t) * 2)
        throw ChecksumError("checkpoint truncated: " + path);
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw SchemaError("not a checkpoint file: " + path);

    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, bytes.data() + bytes.size() - sizeof(std::uint32_t), sizeof(std::uint32_t));
    std::string payload = bytes.substr(0, bytes.size() - sizeof(std::uint32_t));
    if (crc32(payload) != stored_crc) throw ChecksumError("checkpoint checksum mismatch: " + path);

    std::size_t pos = sizeof(kMagic);
    std::uint32_t version = read_pod<std::uint32_t>(payload, pos);
    if (version != kCheckpointVersion)
        throw VersionError("checkpoint has version " + std::to_string(version) +
                           "; this build reads version " + std::to_string(kCheckpointVersion));

    std::uint64_t header_len = read_pod<std::uint64_t>(payload, pos);
    if (pos + header_len > payload.size()) throw ChecksumError("checkpoint truncated: " + path);
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(payload.substr(pos, header_len));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("checkpoint manifest: ") + e.what());
    }
    pos += header_len;

    Checkpoint ckpt;
    ckpt.model = ModelParams::zeros(model_config_from_json(manifest.at("config")));
    auto mode = graph_mode_from_name(manifest.value("mode", "paragraph"));
    if (!mode) throw SchemaError("checkpoint has unknown mode");
    ckpt.mode = *mode;
    const auto& js = manifest.at("scaler");
    ckpt.scaler.weights = range_from_json(js.at("weights"));
    ckpt.scaler.teams = range_from_json(js.at("teams"));
    ckpt.scaler.threads = range_from_json(js.at("threads"));
    ckpt.scaler.target = range_from_json(js.at("target"));

    const auto& tensors = manifest.at("tensors");
    std::size_t t_idx = 0;
    ckpt.model.for_each([&](const std::string& name, Tensor& t) {
        if (t_idx >= tensors.size()) throw SchemaError("checkpoint manifest is missing tensors");
        const auto& jt = tensors[t_idx++];
        if (jt.at("name").get<std::string>() != name ||
            jt.at("shape").get<std::vector<int>>() != t.shape)
            throw SchemaError("checkpoint tensor mismatch at '" + name + "'");
        std::size_t nbytes = t.data.size() * sizeof(double);
        if (pos + nbytes > payload.size()) throw ChecksumError("checkpoint truncated: " + path);
        std::memcpy(t.data.data(), payload.data() + pos, nbytes);
        pos += nbytes;
    });
    if (t_idx != tensors.size() || pos != payload.size())
        throw SchemaError("checkpoint has trailing or missing data");
    return ckpt;
}

}  // namespace paragraph
