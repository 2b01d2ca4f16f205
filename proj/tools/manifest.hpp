// Run manifest written next to every command's outputs.

#pragma once

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include <json.hpp>

#include "coordnet/io.hpp"

namespace coordnet::cli {

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

class Manifest {
public:
    Manifest(std::string command, std::string command_line)
        : start_(std::chrono::steady_clock::now()) {
        doc_["command"] = std::move(command);
        doc_["command_line"] = std::move(command_line);
        doc_["settings"] = nlohmann::ordered_json::object();
        doc_["config_hashes"] = nlohmann::ordered_json::object();
        doc_["inputs"] = nlohmann::ordered_json::object();
        doc_["counts"] = nlohmann::ordered_json::object();
    }

    template <typename T>
    void setting(const std::string& key, T&& value) { doc_["settings"][key] = std::forward<T>(value); }

    template <typename T>
    void count(const std::string& key, T value) { doc_["counts"][key] = value; }

    void input(const std::string& path, std::string_view content) { doc_["inputs"][path] = sha256_hex(content); }
    void config(const std::string& path, std::string_view content) {
        doc_["config_hashes"][path] = sha256_hex(content);
    }

    void write(const std::filesystem::path& file) {
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        doc_["wall_time_seconds"] = elapsed;
        io::write_file_atomic(file, doc_.dump(2) + "\n");
    }

private:
    nlohmann::ordered_json doc_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace coordnet::cli
