#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rmtcorr {

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/**
 * Output directory whose files are listed, with content hashes, in
 * `manifest.json`:
 *
 *   {"format": "rmtcorr-bundle/1",
 *    "files": [{"path": ..., "bytes": ..., "sha256": ...}, ...]}
 *
 * Files are sorted by path so the manifest itself is deterministic.
 */
class BundleWriter {
public:
    explicit BundleWriter(std::filesystem::path dir);

    void add(const std::string& name, const std::string& contents);
    bool contains(const std::string& name) const { return files_.count(name) != 0; }
    /// Writes manifest.json; call once after every add().
    void finish();

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::pair<std::size_t, std::string>> files_;
};

struct ManifestIssue {
    std::string path;
    std::string problem;
};

/// Re-hashes every listed file; an empty result means the bundle is intact.
std::vector<ManifestIssue> verify_manifest(const std::filesystem::path& dir);

} // namespace rmtcorr
