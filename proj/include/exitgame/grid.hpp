#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "exitgame/common.hpp"
#include "exitgame/geometry.hpp"

namespace exitgame {

struct Grid {
    int dim = 0;
    std::vector<int> nodes;  // per-axis node counts, >= 2
    Vec origin;
    Vec spacing;             // > 0 per axis

    static Grid regular(const BoxBounds& box, const std::vector<int>& nodes);

    std::size_t total() const;
    std::size_t index(const std::vector<int>& mi) const;
    std::vector<int> multi_index(std::size_t idx) const;
    Vec coords(std::size_t idx) const;
    void coords_into(std::size_t idx, double* out) const;
    double min_spacing() const;
    BoxBounds box() const;

    // True when the node sits on an outer face of the grid.
    bool on_edge(std::size_t idx) const;
};

enum class NodeClass : std::uint8_t {
    Interior = 0,  // x in G, solver updates it
    Target = 1,    // x in M1, pinned to sigma-tilde
    Lifeline = 2,  // x in M2, pinned to 1
    BoxEdge = 3,   // outer face outside M1 u M2, pinned to 1 (truncation)
};

// One class per node; a node inside both M1 and M2 contradicts
// d(M1,M2) > 0 and raises ConfigError.
std::vector<NodeClass> classify(const Grid& grid, const DomainGeometry& geo);

struct ValueField {
    Grid grid;
    std::vector<double> values;        // in [0,1]
    std::vector<NodeClass> classes;
    std::uint64_t scenario_hash = 0;
    double residual = 0.0;
    int iterations = 0;

    // Multilinear interpolation, exact at nodes, clamped to [0,1];
    // points outside the box read as 1 (box edge is lifeline-valued).
    double interpolate(ConstSpan x) const;
    double interpolate(const double* x) const;
};

// phi = -ln(1-u) per node; u = 1 maps to +inf.
std::vector<double> extract_phi(const ValueField& vf);

// CSV export/import: header with grid metadata, one row per node with
// coordinates then u, 17 significant digits (bit-exact round trip).
void write_value_csv(const ValueField& vf, std::ostream& os);
void write_value_csv(const ValueField& vf, const std::string& path);
ValueField read_value_csv(std::istream& is);
ValueField read_value_csv(const std::string& path);

}  // namespace exitgame
