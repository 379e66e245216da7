#pragma once

#include "scir/pca.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace scir {

struct GalleryEntry {
    std::string subject;
    std::vector<double> templ;
};

/// Enrolled templates for nearest-template identification. Every entry shares
/// the PCA model fingerprint and dimension of the first enrolment.
class Gallery {
public:
    Gallery() = default;
    explicit Gallery(std::uint64_t fingerprint) : fingerprint_(fingerprint), bound_(true) {}

    /// Appends; a subject may hold several templates.
    void enroll(const std::string& subject, const ReducedVector& templ);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    std::size_t dimension() const { return dimension_; }
    std::uint64_t fingerprint() const { return fingerprint_; }
    const std::vector<GalleryEntry>& entries() const { return entries_; }

private:
    std::vector<GalleryEntry> entries_;
    std::uint64_t fingerprint_ = 0;
    std::size_t dimension_ = 0;
    bool bound_ = false;
};

struct MatchResult {
    std::string subject;
    std::size_t index = 0;  ///< enrolment index of the winner
    double distance = 0.0;
    double runner_up = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::size_t, double>> ranking;  ///< filled on request, nearest first
};

/// Minimum Euclidean distance over the leading `components` coordinates
/// (0 = all). Ties go to the earliest enrolment.
MatchResult identify(const Gallery& gallery, const ReducedVector& probe, std::size_t components = 0,
                     bool ranked = false);

struct Probe {
    std::string subject;
    ReducedVector vec;
};

struct EvalReport {
    double rank1_accuracy = 0.0;
    std::size_t dimension = 0;
    std::size_t probe_count = 0;
    std::vector<std::pair<std::size_t, double>> curve;  ///< (K, accuracy), K ascending
    std::map<std::pair<std::string, std::string>, std::size_t> confusion;  ///< (truth, predicted) -> count
    double mean_latency_ms = 0.0;
};

/// Rank-1 accuracy at the gallery dimension plus the accuracy at each K in
/// `k_grid` obtained by truncating templates and probes. Grid values above
/// the gallery dimension are dropped.
EvalReport evaluate(const Gallery& gallery, std::span<const Probe> probes, std::span<const std::size_t> k_grid = {});

/// Latency is wall-clock and varies run to run; it is only emitted when
/// `include_timing` is set so that reports stay reproducible.
nlohmann::json to_json(const EvalReport& report, bool include_timing = false);
/// `K,accuracy` header then one row per curve point.
void write_curve_csv(std::ostream& out, const EvalReport& report);

}  // namespace scir
