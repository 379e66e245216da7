#include "scir/matcher.hpp"

#include "scir/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <set>

namespace scir {

void Gallery::enroll(const std::string& subject, const ReducedVector& templ) {
    if (bound_ && templ.fingerprint != fingerprint_) {
        throw Error(Errc::FingerprintMismatch, "template was produced by a different PCA model");
    }
    if (!entries_.empty() && templ.size() != dimension_) {
        throw Error(Errc::DimensionMismatch, "template has " + std::to_string(templ.size()) +
                                                 " components, gallery holds " + std::to_string(dimension_));
    }
    if (templ.values.empty()) throw Error(Errc::DimensionMismatch, "empty template");
    if (!bound_) {
        fingerprint_ = templ.fingerprint;
        bound_ = true;
    }
    dimension_ = templ.size();
    entries_.push_back({subject, templ.values});
}

MatchResult identify(const Gallery& gallery, const ReducedVector& probe, std::size_t components, bool ranked) {
    if (gallery.empty()) throw Error(Errc::EmptyGallery, "no templates enrolled");
    if (probe.fingerprint != gallery.fingerprint()) {
        throw Error(Errc::FingerprintMismatch, "probe was produced by a different PCA model");
    }
    const std::size_t k = components == 0 ? gallery.dimension() : components;
    if (k > gallery.dimension() || k > probe.size()) {
        throw Error(Errc::BadK, "cannot compare " + std::to_string(k) + " components (gallery " +
                                    std::to_string(gallery.dimension()) + ", probe " + std::to_string(probe.size()) + ")");
    }

    MatchResult result;
    result.distance = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::size_t, double>> all;
    if (ranked) all.reserve(gallery.size());
    const auto& entries = gallery.entries();
    for (std::size_t e = 0; e < entries.size(); ++e) {
        double sq = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double diff = entries[e].templ[c] - probe.values[c];
            sq += diff * diff;
        }
        const double dist = std::sqrt(sq);
        if (dist < result.distance) {
            result.runner_up = result.distance;
            result.distance = dist;
            result.index = e;
        } else if (dist < result.runner_up) {
            result.runner_up = dist;
        }
        if (ranked) all.emplace_back(e, dist);
    }
    result.subject = entries[result.index].subject;
    if (ranked) {
        std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
        result.ranking = std::move(all);
    }
    return result;
}

EvalReport evaluate(const Gallery& gallery, std::span<const Probe> probes, std::span<const std::size_t> k_grid) {
    if (probes.empty()) throw Error(Errc::EmptyProbeSet, "no probes to evaluate");
    if (gallery.empty()) throw Error(Errc::EmptyGallery, "no templates enrolled");

    EvalReport report;
    report.dimension = gallery.dimension();
    report.probe_count = probes.size();

    std::size_t correct = 0;
    double latency_ms = 0.0;
    for (const auto& probe : probes) {
        const auto start = std::chrono::steady_clock::now();
        const auto match = identify(gallery, probe.vec);
        latency_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (match.subject == probe.subject) ++correct;
        ++report.confusion[{probe.subject, match.subject}];
    }
    report.rank1_accuracy = static_cast<double>(correct) / static_cast<double>(probes.size());
    report.mean_latency_ms = latency_ms / static_cast<double>(probes.size());

    std::set<std::size_t> grid;
    for (auto k : k_grid) {
        if (k >= 1 && k <= gallery.dimension()) grid.insert(k);
    }
    for (auto k : grid) {
        std::size_t hits = 0;
        for (const auto& probe : probes) {
            if (identify(gallery, probe.vec, k).subject == probe.subject) ++hits;
        }
        report.curve.emplace_back(k, static_cast<double>(hits) / static_cast<double>(probes.size()));
    }
    return report;
}

nlohmann::json to_json(const EvalReport& report, bool include_timing) {
    nlohmann::json j;
    j["rank1_accuracy"] = report.rank1_accuracy;
    j["dimension"] = report.dimension;
    j["probe_count"] = report.probe_count;
    if (include_timing) j["mean_latency_ms"] = report.mean_latency_ms;
    j["curve"] = nlohmann::json::array();
    for (const auto& [k, acc] : report.curve) j["curve"].push_back({{"k", k}, {"accuracy", acc}});
    j["confusion"] = nlohmann::json::array();
    for (const auto& [key, count] : report.confusion) {
        j["confusion"].push_back({{"truth", key.first}, {"predicted", key.second}, {"count", count}});
    }
    return j;
}

void write_curve_csv(std::ostream& out, const EvalReport& report) {
    out << "K,accuracy\n";
    for (const auto& [k, acc] : report.curve) out << k << ',' << acc << '\n';
}

}  // namespace scir
