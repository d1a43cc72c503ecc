// Copyright 2026 The eevconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eevconv/spectra.hpp"

// On-disk spectrum cache: one JSON-lines file per (model hash, N). The first
// line is a header naming the model, the size and the cached observable
// columns (ids plus definition hashes, so reusing an id for a different
// operator cannot alias); each following line is one eigenstate record.

namespace eevconv {

/// Advisory exclusive lock on a cache directory. Other well-behaved
/// processes see the flock and back off; nothing is enforced beyond that.
class CacheDirLock {
  public:
    explicit CacheDirLock(const std::filesystem::path& dir) {
        std::filesystem::create_directories(dir);
        fd_ = ::open((dir / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ >= 0 && ::flock(fd_, LOCK_EX | LOCK_NB) == 0) held_ = true;
    }
    CacheDirLock(const CacheDirLock&) = delete;
    CacheDirLock& operator=(const CacheDirLock&) = delete;
    ~CacheDirLock() {
        if (fd_ >= 0) ::close(fd_);  // releases the flock
    }
    bool held() const { return held_; }

  private:
    int fd_ = -1;
    bool held_ = false;
};

struct CacheLoadResult {
    std::optional<SpectrumTable> table;
    bool corrupt = false;  // file existed but could not be used as-is
};

namespace detail {

inline std::filesystem::path cache_file(const std::filesystem::path& dir,
                                        const std::string& model_hash, int sites) {
    return dir / (model_hash + "_N" + std::to_string(sites) + ".jsonl");
}

}  // namespace detail

/// Loads a cached table if it covers every requested observable (matched by
/// id and definition hash). Requested column order is preserved.
inline CacheLoadResult cache_load(const std::filesystem::path& dir, const std::string& model_hash,
                                  int sites,
                                  const std::vector<std::pair<std::string, std::string>>& want) {
    CacheLoadResult res;
    const auto path = detail::cache_file(dir, model_hash, sites);
    std::ifstream in(path);
    if (!in) return res;

    try {
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty file");
        const nlohmann::json header = nlohmann::json::parse(line);
        if (header.at("schema").get<std::string>() != "eevconv.spectrum.v1" ||
            header.at("model").get<std::string>() != model_hash ||
            header.at("sites").get<int>() != sites)
            throw std::runtime_error("header mismatch");

        std::map<std::string, std::pair<std::string, std::size_t>> cached;  // id -> (hash, col)
        std::size_t col = 0;
        for (const auto& jo : header.at("observables"))
            cached[jo.at("id").get<std::string>()] = {jo.at("hash").get<std::string>(), col++};

        std::vector<std::size_t> pick;
        for (const auto& [id, hash] : want) {
            auto it = cached.find(id);
            if (it == cached.end() || it->second.first != hash) return res;  // miss, not corrupt
            pick.push_back(it->second.second);
        }

        SpectrumTable table;
        table.sites = sites;
        for (const auto& [id, hash] : want) table.observable_ids.push_back(id);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const nlohmann::json jr = nlohmann::json::parse(line);
            SpectrumRecord rec;
            rec.energy = jr.at("e").get<double>();
            rec.momentum = jr.at("p").get<int>();
            const auto& vals = jr.at("v");
            rec.eev.reserve(pick.size());
            for (std::size_t idx : pick)
                rec.eev.emplace_back(vals.at(idx).at(0).get<double>(),
                                     vals.at(idx).at(1).get<double>());
            table.records.push_back(std::move(rec));
        }
        if (table.records.size() != (std::size_t(1) << sites))
            throw std::runtime_error("record count mismatch");
        res.table = std::move(table);
    } catch (const std::exception&) {
        res.table.reset();
        res.corrupt = true;
    }
    return res;
}

/// Writes a table (all of its observable columns) atomically.
inline void cache_store(const std::filesystem::path& dir, const std::string& model_hash,
                        const SpectrumTable& table,
                        const std::vector<std::pair<std::string, std::string>>& obs_hashes) {
    std::filesystem::create_directories(dir);
    const auto path = detail::cache_file(dir, model_hash, table.sites);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        nlohmann::json header;
        header["schema"] = "eevconv.spectrum.v1";
        header["model"] = model_hash;
        header["sites"] = table.sites;
        header["observables"] = nlohmann::json::array();
        for (const auto& [id, hash] : obs_hashes)
            header["observables"].push_back({{"id", id}, {"hash", hash}});
        out << header.dump() << "\n";
        for (const auto& rec : table.records) {
            nlohmann::json jr;
            jr["e"] = rec.energy;
            jr["p"] = rec.momentum;
            jr["v"] = nlohmann::json::array();
            for (const auto& v : rec.eev) jr["v"].push_back({v.real(), v.imag()});
            out << jr.dump() << "\n";
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace eevconv
