#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tracebp/alphabet.hpp"

namespace tracebp {

/// Levenshtein distance with unit insert/delete/substitute costs.
int edit_distance(const std::vector<Symbol>& a, const std::vector<Symbol>& b);

/// Clustered reads paired with their reference sequences.
struct ClusterDataset {
    std::vector<Cluster> entries;
    int dropped_reads = 0; // reads rejected for symbols outside the alphabet
};

/// Loads a centers file (one reference per line) and a clusters file
/// (blocks of reads, one per line, separated by lines whose first character
/// is '='). Block i pairs with center line i. Reads containing characters
/// outside the alphabet are dropped and counted. Throws MismatchedCounts
/// when blocks and centers disagree, EmptyCluster on a block with no valid
/// reads.
ClusterDataset load_dataset(const std::string& centers_path,
                            const std::string& clusters_path, const Alphabet& alphabet);

void write_centers(std::ostream& os, const std::vector<Cluster>& clusters,
                   const Alphabet& alphabet);
void write_clusters(std::ostream& os, const std::vector<Cluster>& clusters,
                    const Alphabet& alphabet);

} // namespace tracebp
