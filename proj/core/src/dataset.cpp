#include "tracebp/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "tracebp/errors.hpp"

namespace tracebp {

int edit_distance(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    std::vector<int> prev(nb + 1), cur(nb + 1);
    for (std::size_t j = 0; j <= nb; ++j)
        prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= na; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= nb; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[nb];
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

} // namespace

ClusterDataset load_dataset(const std::string& centers_path,
                            const std::string& clusters_path, const Alphabet& alphabet) {
    std::vector<SourceSequence> centers;
    for (const std::string& line : read_lines(centers_path)) {
        if (line.empty())
            continue;
        centers.push_back(parse_source(line, alphabet));
    }

    // Split the clusters file into separator-delimited blocks. A leading or
    // trailing separator is tolerated; an interior empty block is not.
    std::vector<std::vector<std::string>> blocks(1);
    for (const std::string& line : read_lines(clusters_path)) {
        if (!line.empty() && line.front() == '=')
            blocks.emplace_back();
        else if (!line.empty())
            blocks.back().push_back(line);
    }
    if (!blocks.empty() && blocks.front().empty())
        blocks.erase(blocks.begin());
    if (!blocks.empty() && blocks.back().empty())
        blocks.pop_back();

    if (blocks.size() != centers.size())
        throw MismatchedCounts("clusters file has " + std::to_string(blocks.size()) +
                               " blocks but centers file has " +
                               std::to_string(centers.size()) + " lines");

    ClusterDataset dataset;
    dataset.entries.reserve(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        Cluster cluster;
        cluster.reference = centers[i];
        for (const std::string& read : blocks[i]) {
            bool valid = true;
            for (char c : read)
                if (!alphabet.index_of(c)) {
                    valid = false;
                    break;
                }
            if (valid)
                cluster.traces.push_back(parse_trace(read, alphabet));
            else
                ++dataset.dropped_reads;
        }
        if (cluster.traces.empty())
            throw EmptyCluster("cluster block " + std::to_string(i + 1) +
                               " has no valid reads");
        dataset.entries.push_back(std::move(cluster));
    }
    return dataset;
}

void write_centers(std::ostream& os, const std::vector<Cluster>& clusters,
                   const Alphabet& alphabet) {
    for (const Cluster& c : clusters)
        os << format_symbols(c.reference->symbols, alphabet) << '\n';
}

void write_clusters(std::ostream& os, const std::vector<Cluster>& clusters,
                    const Alphabet& alphabet) {
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (i > 0)
            os << "====================\n";
        for (const Trace& y : clusters[i].traces)
            os << format_symbols(y.symbols, alphabet) << '\n';
    }
}

} // namespace tracebp
