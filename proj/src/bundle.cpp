#include "rmtcorr/bundle.hpp"

#include <openssl/evp.h>

#include <json.hpp>

#include "rmtcorr/io.hpp"

namespace rmtcorr {

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

BundleWriter::BundleWriter(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

void BundleWriter::add(const std::string& name, const std::string& contents)
{
    io::write_file(dir_ / name, contents);
    files_[name] = {contents.size(), sha256_hex(contents)};
}

void BundleWriter::finish()
{
    nlohmann::ordered_json manifest;
    manifest["format"] = "rmtcorr-bundle/1";
    auto files = nlohmann::ordered_json::array();
    for (const auto& [name, info] : files_)
        files.push_back({{"path", name}, {"bytes", info.first}, {"sha256", info.second}});
    manifest["files"] = files;
    io::write_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<ManifestIssue> verify_manifest(const std::filesystem::path& dir)
{
    std::vector<ManifestIssue> issues;
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(io::read_file(dir / "manifest.json"));
    } catch (const std::exception& e) {
        issues.push_back({"manifest.json", e.what()});
        return issues;
    }
    for (const auto& entry : manifest.at("files")) {
        const auto path = entry.at("path").get<std::string>();
        std::string contents;
        try {
            contents = io::read_file(dir / path);
        } catch (const Error&) {
            issues.push_back({path, "missing"});
            continue;
        }
        if (sha256_hex(contents) != entry.at("sha256").get<std::string>())
            issues.push_back({path, "hash mismatch"});
    }
    return issues;
}

} // namespace rmtcorr
