#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "xlosh/common.hpp"

namespace xlosh {

inline std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open file for hashing: " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw eval_error("sha256: context allocation failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[65536];
    while (in.good()) {
        in.read(buf, sizeof buf);
        const std::streamsize got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf, std::size_t(got));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int mdlen = 0;
    EVP_DigestFinal_ex(ctx, md, &mdlen);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * mdlen);
    for (unsigned int i = 0; i < mdlen; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

// Reproduction record written next to every output: the exact command line,
// content hashes of all input files, the seed, and the resolved numeric
// budgets are enough to rerun the command bit-for-bit.
struct RunManifest {
    std::vector<std::string> argv;
    std::map<std::string, std::string> input_hashes; // path -> sha256
    std::uint64_t seed = 0;
    std::map<std::string, double> budgets; // points, replicates, trials, order, height, ...
    std::string version = version_string;
    double wall_seconds = 0.0;

    void add_input(const std::string& path) { input_hashes[path] = sha256_file(path); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = argv;
        j["inputs"] = input_hashes;
        j["seed"] = seed;
        j["budgets"] = budgets;
        j["version"] = version;
        j["wall_seconds"] = wall_seconds;
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw eval_error("cannot write manifest: " + path);
        out << to_json().dump(2) << "\n";
    }
};

} // namespace xlosh
