#pragma once

// Bracket manifest: JSON sidecar tying frame files to their exposures and the
// CRF/seed that produced them. Exposure entries are normalized to ascending
// order on write, with the path lists permuted alongside.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bracketforge/crf.hpp"

namespace bracketforge {

struct BracketManifest {
    std::vector<double> exposures;                    // one per exposure level, ascending
    std::vector<std::vector<std::string>> paths;      // paths[k] = frame files of exposure k
    double ev_spacing = 4.0;
    std::optional<CrfParams> crf;                     // set when frames are CRF-encoded
    std::optional<std::uint64_t> seed;
    std::vector<double> frame_exposures;              // optional, auto-protocol per-frame values

    void validate() const {
        if (exposures.empty())
            throw std::invalid_argument("manifest: no exposures");
        if (paths.size() != exposures.size())
            throw std::invalid_argument("manifest: paths/exposures length mismatch");
        for (double e : exposures)
            if (!(e > 0.0)) throw std::invalid_argument("manifest: exposures must be positive");
        for (const auto& list : paths)
            if (list.size() != paths.front().size())
                throw std::invalid_argument("manifest: unequal frame counts across exposures");
    }

    void normalize() {
        validate();
        std::vector<std::size_t> order(exposures.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return exposures[a] < exposures[b]; });
        std::vector<double> e2;
        std::vector<std::vector<std::string>> p2;
        for (std::size_t i : order) {
            e2.push_back(exposures[i]);
            p2.push_back(paths[i]);
        }
        exposures = std::move(e2);
        paths = std::move(p2);
    }
};

inline void write_manifest(BracketManifest m, const std::filesystem::path& path) {
    m.normalize();
    nlohmann::json j;  // nlohmann::json orders keys alphabetically: stable output
    j["exposures"] = m.exposures;
    j["ev_spacing"] = m.ev_spacing;
    j["paths"] = m.paths;
    if (m.crf) j["crf"] = {{"n", m.crf->n}, {"sigma", m.crf->sigma}};
    if (m.seed) j["seed"] = *m.seed;
    if (!m.frame_exposures.empty()) j["frame_exposures"] = m.frame_exposures;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

inline BracketManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_manifest: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("read_manifest: bad JSON in " + path.string() + ": " + e.what());
    }
    for (const char* key : {"exposures", "ev_spacing", "paths"})
        if (!j.contains(key))
            throw std::runtime_error("read_manifest: missing key '" + std::string(key) + "'");

    BracketManifest m;
    m.exposures = j.at("exposures").get<std::vector<double>>();
    m.ev_spacing = j.at("ev_spacing").get<double>();
    m.paths = j.at("paths").get<std::vector<std::vector<std::string>>>();
    if (j.contains("crf")) {
        CrfParams p;
        p.n = j.at("crf").at("n").get<double>();
        p.sigma = j.at("crf").at("sigma").get<double>();
        m.crf = p;
    }
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("frame_exposures"))
        m.frame_exposures = j.at("frame_exposures").get<std::vector<double>>();
    m.validate();
    return m;
}

}  // namespace bracketforge
