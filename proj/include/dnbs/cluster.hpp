#pragma once

// Two-level dictionary hierarchy: atoms are grouped around random centers by
// normalized overlap (mu-near sets), and the hierarchical solver scores only
// the centers plus the clusters whose center looks competitive.

#include "dnbs/doomp.hpp"
#include "dnbs/haar.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dnbs {

struct Cluster {
    std::size_t center = 0;
    std::vector<std::size_t> members;  // ascending, includes the center
};

struct ClusterIndex {
    double mu = 0.7;
    std::uint64_t seed = 0;
    int width = 0;
    int height = 0;
    std::vector<Cluster> clusters;

    /// Throws InvalidArgument unless the clusters partition a width x height
    /// dictionary and every member satisfies the mu inequality.
    void validate(const Dictionary& dict) const;
};

struct HierConfig {
    double ratio = 0.5;
    double mu = 0.7;
    /// Expand the center's whole mu-near set instead of its stored members.
    bool expand_full_near_set = false;

    void validate() const;
};

/// Atoms with haar_dot_haar(atom, center) >= mu, by scanning the dictionary.
std::vector<std::size_t> mu_near_set_bruteforce(const Dictionary& dict, std::size_t center, double mu,
                                                std::size_t* evaluations = nullptr);

/// Same set, enumerated geometrically from the rectangles a member can share
/// with the center. `evaluations` receives the number of overlap tests made.
std::vector<std::size_t> mu_near_set_fast(const Dictionary& dict, std::size_t center, double mu,
                                          std::size_t* evaluations = nullptr);

ClusterIndex cluster_dictionary(const Dictionary& dict, double mu, std::uint64_t seed);

SelectionResult select_hierarchical(const SampleSet& samples, const DnbsConfig& cfg, const HierConfig& hier,
                                    const ClusterIndex& index, const Dictionary& dict);

void save_cluster_index(const ClusterIndex& index, const std::filesystem::path& path);
ClusterIndex load_cluster_index(const std::filesystem::path& path);

}  // namespace dnbs
