#include "scir/manifest.hpp"

#include "scir/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace scir {

const char* to_string(Split split) noexcept {
    switch (split) {
        case Split::Train: return "train";
        case Split::Test: return "test";
        case Split::Validation: return "validation";
        case Split::Unassigned: return "unassigned";
    }
    return "unassigned";
}

Split parse_split(const std::string& text) {
    if (text == "train") return Split::Train;
    if (text == "test") return Split::Test;
    if (text == "validation") return Split::Validation;
    if (text == "unassigned" || text.empty()) return Split::Unassigned;
    throw Error(Errc::InvalidManifest, "unknown split tag '" + text + "'");
}

std::vector<std::string> DatasetManifest::subjects() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& e : entries) {
        if (seen.insert(e.subject).second) out.push_back(e.subject);
    }
    return out;
}

std::vector<ManifestEntry> DatasetManifest::select(Split split) const {
    std::vector<ManifestEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
                 [split](const ManifestEntry& e) { return e.split == split; });
    return out;
}

void DatasetManifest::validate() const {
    std::set<std::string> paths;
    std::set<std::string> train_subjects;
    for (const auto& e : entries) {
        if (!paths.insert(e.path).second) {
            throw Error(Errc::InvalidManifest, "duplicate path " + e.path);
        }
        if (e.split == Split::Train) train_subjects.insert(e.subject);
    }
    for (const auto& e : entries) {
        if (e.split == Split::Test && !train_subjects.count(e.subject)) {
            throw Error(Errc::InvalidManifest, "subject " + e.subject + " appears in test but not in train");
        }
    }
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::FileNotFound, path.string());

    DatasetManifest manifest;
    manifest.base_dir = path.parent_path();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, '\t')) fields.push_back(field);
        if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
            throw Error(Errc::InvalidManifest, path.string() + ":" + std::to_string(line_no) +
                                                   ": expected <path>\\t<subject>\\t<split>");
        }
        ManifestEntry entry{fields[0], fields[1], Split::Unassigned};
        if (fields.size() == 3) entry.split = parse_split(fields[2]);
        manifest.entries.push_back(std::move(entry));
    }
    manifest.validate();
    return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    out << "# path\tsubject\tsplit\n";
    for (const auto& e : manifest.entries) {
        out << e.path << '\t' << e.subject << '\t' << to_string(e.split) << '\n';
    }
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
}

DatasetManifest split_dataset(DatasetManifest manifest, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw Error(Errc::InvalidConfig, "train fraction must be in (0, 1]");
    }
    std::map<std::string, std::vector<std::size_t>> by_subject;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        if (manifest.entries[i].split != Split::Validation) by_subject[manifest.entries[i].subject].push_back(i);
    }
    std::mt19937_64 rng(seed);
    for (const auto& subject : manifest.subjects()) {
        auto it = by_subject.find(subject);
        if (it == by_subject.end()) continue;
        auto& idx = it->second;
        if (idx.size() < 2) {
            throw Error(Errc::TooFewImages, "subject " + subject + " has " + std::to_string(idx.size()) +
                                                " image(s); at least 2 are required");
        }
        const auto n = static_cast<double>(idx.size());
        auto n_train = static_cast<std::size_t>(std::floor(n * train_fraction + 0.5));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size());

        std::vector<std::size_t> order(idx.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t r = 0; r < order.size(); ++r) {
            manifest.entries[idx[order[r]]].split = r < n_train ? Split::Train : Split::Test;
        }
    }
    manifest.validate();
    return manifest;
}

}  // namespace scir
